//! Local unitary transformations `U_1 ⊗ ... ⊗ U_n`, `U_k ∈ SU(2)`.

use nalgebra::{Matrix2, Matrix3};
use num_complex::{Complex, Complex64};
use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::lie_action::Generator;
use crate::rng;
use crate::state_core::{check_qubit, gaussian_int, qubit_mask, Amplitudes, Mode, Scalar, StateVector};

pub type Su2 = Matrix2<Complex64>;

/// Deviation accepted by the SU(2) membership checks.
pub const SU2_TOL: f64 = 1e-10;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `[[a+ib, c+id], [-c+id, a-ib]]`; special unitary when `a²+b²+c²+d² = 1`.
pub fn su2_from_quaternion(q: [f64; 4]) -> Su2 {
    let [a, b, cc, d] = q;
    Matrix2::new(c(a, b), c(cc, d), c(-cc, d), c(a, -b))
}

/// Haar-random SU(2) element from a normalized 4-Gaussian quaternion.
pub fn random_su2(seed: u64) -> Su2 {
    random_su2_with(&mut rng::seeded(seed, 0))
}

pub fn random_su2_with(rng: &mut rng::Rng) -> Su2 {
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-300 {
            return su2_from_quaternion(q.map(|x| x / norm));
        }
    }
}

/// Largest deviation of `u` from `u†u = 1` and `det u = 1`.
pub fn su2_deviation(u: &Su2) -> f64 {
    let unitarity = (u.adjoint() * u - Su2::identity())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    unitarity.max((u.determinant() - c(1.0, 0.0)).norm())
}

fn check_su2(u: &Su2) -> Result<()> {
    let dev = su2_deviation(u);
    if dev.is_finite() && dev <= SU2_TOL {
        Ok(())
    } else {
        Err(Error::NotSpecialUnitary(dev))
    }
}

/// Basis matrix of `su(2)`: `A = iσz`, `B = iσy`, `C = iσx`.
pub fn generator_matrix(g: Generator) -> Su2 {
    let z = c(0.0, 0.0);
    match g {
        Generator::A => Matrix2::new(c(0.0, 1.0), z, z, c(0.0, -1.0)),
        Generator::B => Matrix2::new(z, c(1.0, 0.0), c(-1.0, 0.0), z),
        Generator::C => Matrix2::new(z, c(0.0, 1.0), c(0.0, 1.0), z),
    }
}

/// Matrix of `X ↦ U†XU` in the ordered basis `(A, B, C)`.
///
/// Column `j` holds the coordinates of `U† X_j U`. With this convention
/// `adjoint_rep(UV) = adjoint_rep(V) · adjoint_rep(U)`.
pub fn adjoint_rep(u: &Su2) -> Result<Matrix3<f64>> {
    check_su2(u)?;
    let basis = Generator::ALL.map(generator_matrix);
    // The basis is orthonormal for <X, Y> = Re tr(X†Y) / 2.
    Ok(Matrix3::from_fn(|i, j| {
        let image = u.adjoint() * basis[j] * u;
        (basis[i].adjoint() * image).trace().re / 2.0
    }))
}

/// An `n`-tuple of SU(2) factors acting qubit-wise.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalUnitary {
    factors: Vec<Su2>,
}

impl LocalUnitary {
    pub fn new(factors: Vec<Su2>) -> Result<Self> {
        for u in &factors {
            check_su2(u)?;
        }
        Ok(LocalUnitary { factors })
    }

    pub fn identity(n: usize) -> Self {
        LocalUnitary {
            factors: vec![Su2::identity(); n],
        }
    }

    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = rng::seeded(seed, 1);
        Self::random_with(n, &mut rng)
    }

    pub fn random_with(n: usize, rng: &mut rng::Rng) -> Self {
        LocalUnitary {
            factors: (0..n).map(|_| random_su2_with(rng)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[Su2] {
        &self.factors
    }

    pub fn factor(&self, k: usize) -> Result<&Su2> {
        check_qubit(self.n(), k)?;
        Ok(&self.factors[k - 1])
    }

    pub fn inverse(&self) -> Self {
        LocalUnitary {
            factors: self.factors.iter().map(|u| u.adjoint()).collect(),
        }
    }
}

/// Apply a 2×2 matrix `[m00, m01, m10, m11]` to qubit `k` in place.
fn apply_qubit<T: Scalar>(amps: &mut [Complex<T>], n: usize, k: usize, m: &[Complex<T>; 4]) {
    let mask = qubit_mask(n, k);
    for i in (0..amps.len()).filter(|i| i & mask == 0) {
        let (x0, x1) = (amps[i].clone(), amps[i | mask].clone());
        amps[i] = m[0].clone() * x0.clone() + m[1].clone() * x1.clone();
        amps[i | mask] = m[2].clone() * x0 + m[3].clone() * x1;
    }
}

/// `(U_1 ⊗ ... ⊗ U_n) ψ`, one qubit at a time. Exact inputs are converted to
/// floating mode first.
pub fn apply_local(psi: &StateVector, u: &LocalUnitary) -> Result<StateVector> {
    if u.n() != psi.n() {
        return Err(Error::SizeMismatch {
            expected: psi.n(),
            found: u.n(),
        });
    }
    StateVector::from_float(apply_local_raw(&psi.float_amplitudes(), u)?)
}

/// `(U_1 ⊗ ... ⊗ U_n) v` for an arbitrary vector of length `2^n`, without
/// normalizing.
pub fn apply_local_raw(v: &[Complex64], u: &LocalUnitary) -> Result<Vec<Complex64>> {
    let n = u.n();
    if v.len() != 1 << n {
        return Err(Error::SizeMismatch {
            expected: 1 << n,
            found: v.len(),
        });
    }
    let mut amps = v.to_vec();
    for (k, f) in (1..=n).zip(u.factors()) {
        apply_qubit(&mut amps, n, k, &[f[(0, 0)], f[(0, 1)], f[(1, 0)], f[(1, 1)]]);
    }
    Ok(amps)
}

/// Apply the scaled SU(2) elements `[[a+ib, c+id], [-c+id, a-ib]]` given by
/// integer quaternions to an exact state. Each factor is `|q|` times a
/// special unitary, so the result is LU-equivalent to `ψ` up to a positive
/// scale and stays Gaussian-rational.
pub fn apply_integer_quaternions(psi: &StateVector, quaternions: &[[i64; 4]]) -> Result<StateVector> {
    if quaternions.len() != psi.n() {
        return Err(Error::SizeMismatch {
            expected: psi.n(),
            found: quaternions.len(),
        });
    }
    if psi.mode() != Mode::Exact {
        return Err(Error::ModeMismatch);
    }
    if let Some(q) = quaternions.iter().find(|q| q.iter().all(|&x| x == 0)) {
        return Err(Error::Parse(format!("zero quaternion {q:?}")));
    }
    let n = psi.n();
    let Amplitudes::Exact(v) = psi.amplitudes() else {
        unreachable!()
    };
    let mut amps = v.clone();
    for (k, &[a, b, cc, d]) in (1..=n).zip(quaternions) {
        let m = [
            gaussian_int(a, b),
            gaussian_int(cc, d),
            gaussian_int(-cc, d),
            gaussian_int(a, -b),
        ];
        apply_qubit(&mut amps, n, k, &m);
    }
    StateVector::from_exact(amps)
}
