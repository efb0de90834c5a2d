//! One-sided Jacobi SVD for the small dense real matrices used here.
//!
//! Columns are orthogonalized by plane rotations until every pair is
//! orthogonal to machine precision; the column norms are then the singular
//! values. This converges unconditionally and keeps high relative accuracy
//! on rank-deficient inputs with repeated singular values.

use nalgebra::DMatrix;

const MAX_SWEEPS: usize = 80;

#[derive(Clone, Debug)]
pub struct Svd {
    /// One per column of the input, unsorted.
    pub singular_values: Vec<f64>,
    /// Left singular vectors as columns; zero where the singular value is 0.
    pub u: DMatrix<f64>,
    /// Right singular vectors as columns (square, orthogonal).
    pub v: DMatrix<f64>,
}

impl Svd {
    /// Singular values, descending.
    pub fn sorted_values(&self) -> Vec<f64> {
        let mut sv = self.singular_values.clone();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }
}

/// Rotate columns `p < q` of a column-major buffer with `m` rows.
fn rotate(data: &mut [f64], m: usize, p: usize, q: usize, c: f64, s: f64) {
    let (left, right) = data.split_at_mut(q * m);
    for (x, y) in left[p * m..(p + 1) * m].iter_mut().zip(&mut right[..m]) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn jacobi_core(a: &DMatrix<f64>) -> Svd {
    let (m, k) = a.shape();
    let mut u = a.clone();
    let mut v = DMatrix::<f64>::identity(k, k);
    let mut norms: Vec<f64> = (0..k).map(|j| u.column(j).norm_squared()).collect();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let data = u.as_slice();
                let gamma = dot(&data[p * m..(p + 1) * m], &data[q * m..(q + 1) * m]);
                let (alpha, beta) = (norms[p], norms[q]);
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * alpha.sqrt() * beta.sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(u.as_mut_slice(), m, p, q, c, s);
                rotate(v.as_mut_slice(), k, p, q, c, s);
                let data = u.as_slice();
                norms[p] = dot(&data[p * m..(p + 1) * m], &data[p * m..(p + 1) * m]);
                norms[q] = dot(&data[q * m..(q + 1) * m], &data[q * m..(q + 1) * m]);
            }
        }
        if !rotated {
            break;
        }
    }
    let singular_values: Vec<f64> = (0..k).map(|j| u.column(j).norm()).collect();
    for (j, &s) in singular_values.iter().enumerate() {
        if s > 0.0 {
            u.column_mut(j).unscale_mut(s);
        }
    }
    Svd { singular_values, u, v }
}

pub fn jacobi_svd(a: &DMatrix<f64>) -> Svd {
    let (m, k) = a.shape();
    if m <= k || k == 0 {
        return jacobi_core(a);
    }
    // tall input: rotate the small triangular factor instead
    let qr = a.clone().qr();
    let inner = jacobi_core(&qr.r());
    Svd {
        singular_values: inner.singular_values,
        u: qr.q() * inner.u,
        v: inner.v,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn random_matrix(rows: usize, cols: usize, rng: &mut crate::rng::Rng) -> DMatrix<f64> {
        DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
    }

    fn check_decomposition(a: &DMatrix<f64>) {
        let svd = jacobi_svd(a);
        let sigma = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(svd.singular_values.clone()));
        let rebuilt = &svd.u * sigma * svd.v.transpose();
        assert!((rebuilt - a).amax() < 1e-12 * a.amax().max(1.0));
        let k = a.ncols();
        assert!((svd.v.transpose() * &svd.v - DMatrix::identity(k, k)).amax() < 1e-13);
        for i in 0..k {
            for j in 0..k {
                if svd.singular_values[i] > 1e-12 && svd.singular_values[j] > 1e-12 {
                    let d = svd.u.column(i).dot(&svd.u.column(j));
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((d - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn reconstructs_random_matrices() {
        let mut rng = crate::rng::seeded(8, 0);
        for (r, c) in [(4, 4), (8, 7), (32, 13), (3, 9), (1, 5), (6, 1)] {
            check_decomposition(&random_matrix(r, c, &mut rng));
        }
    }

    #[test]
    fn rank_deficient_with_repeated_values() {
        // columns e1, e1, e2, -e2, e3 + 0, and a zero column
        let a = DMatrix::from_column_slice(
            4,
            6,
            &[
                1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0,
                0.0, 0.0, 0.0, 0.0,
            ],
        );
        check_decomposition(&a);
        let sv = jacobi_svd(&a).sorted_values();
        let s2 = std::f64::consts::SQRT_2;
        let want = [s2, s2, 1.0, 0.0, 0.0, 0.0];
        for (x, y) in sv.iter().zip(want) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_values_match_gram_eigenvalues() {
        let mut rng = crate::rng::seeded(9, 0);
        let a = random_matrix(10, 5, &mut rng);
        let mut eig: Vec<f64> = (a.transpose() * &a)
            .symmetric_eigenvalues()
            .iter()
            .map(|l| l.max(0.0).sqrt())
            .collect();
        eig.sort_by(|x, y| y.total_cmp(x));
        for (x, y) in jacobi_svd(&a).sorted_values().iter().zip(eig) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_shapes() {
        let svd = jacobi_svd(&DMatrix::zeros(0, 3));
        assert_eq!(svd.singular_values, vec![0.0; 3]);
        assert_eq!(svd.v, DMatrix::identity(3, 3));
        assert!(jacobi_svd(&DMatrix::zeros(4, 0)).singular_values.is_empty());
    }
}
