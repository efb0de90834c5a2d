//! Action of the su(2) basis `A = iσz`, `B = iσy`, `C = iσx` on single
//! qubits, and the side matrix `M` built from it.
//!
//! Every generator is applied by index arithmetic on the amplitude array:
//!
//! * `A_k`: coefficient of `|I>` is `i (-1)^{i_k} c_I`
//! * `B_k`: coefficient of `|I>` is `(-1)^{i_k} c_{I_k}`
//! * `C_k`: coefficient of `|I>` is `i c_{I_k}`

use nalgebra::DMatrix;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::state_core::{check_qubit, qubit_mask, rational_to_f64, Amplitudes, Mode, Scalar, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    A,
    B,
    C,
}

impl Generator {
    pub const ALL: [Generator; 3] = [Generator::A, Generator::B, Generator::C];
}

#[inline]
fn times_i<T: Scalar>(z: &Complex<T>) -> Complex<T> {
    Complex::new(-z.im.clone(), z.re.clone())
}

fn act<T: Scalar>(amps: &[Complex<T>], mask: usize, g: Generator) -> Vec<Complex<T>> {
    (0..amps.len())
        .map(|i| {
            let set = i & mask != 0;
            match g {
                Generator::A => {
                    let z = times_i(&amps[i]);
                    if set {
                        -z
                    } else {
                        z
                    }
                }
                Generator::B => {
                    let z = amps[i ^ mask].clone();
                    if set {
                        -z
                    } else {
                        z
                    }
                }
                Generator::C => times_i(&amps[i ^ mask]),
            }
        })
        .collect()
}

pub(crate) fn apply_raw(amps: &Amplitudes, n: usize, k: usize, g: Generator) -> Result<Amplitudes> {
    check_qubit(n, k)?;
    let mask = qubit_mask(n, k);
    Ok(match amps {
        Amplitudes::Float(v) => Amplitudes::Float(act(v, mask, g)),
        Amplitudes::Exact(v) => Amplitudes::Exact(act(v, mask, g)),
    })
}

/// `X_k psi` for generator `X` on qubit `k`.
pub fn apply(psi: &StateVector, k: usize, g: Generator) -> Result<Amplitudes> {
    apply_raw(psi.amplitudes(), psi.n(), k, g)
}

pub fn apply_a(psi: &StateVector, k: usize) -> Result<Amplitudes> {
    apply(psi, k, Generator::A)
}

pub fn apply_b(psi: &StateVector, k: usize) -> Result<Amplitudes> {
    apply(psi, k, Generator::B)
}

pub fn apply_c(psi: &StateVector, k: usize) -> Result<Amplitudes> {
    apply(psi, k, Generator::C)
}

fn minus_i(amps: &Amplitudes) -> Amplitudes {
    fn go<T: Scalar>(v: &[Complex<T>]) -> Vec<Complex<T>> {
        v.iter().map(|z| -times_i(z)).collect()
    }
    match amps {
        Amplitudes::Float(v) => Amplitudes::Float(go(v)),
        Amplitudes::Exact(v) => Amplitudes::Exact(go(v)),
    }
}

/// The `2^n × (3n+1)` matrix
/// `(A_1ψ, B_1ψ, C_1ψ, ..., A_nψ, B_nψ, C_nψ, -iψ)`.
#[derive(Clone, Debug)]
pub struct SideMatrix {
    n: usize,
    columns: Vec<Amplitudes>,
    source: StateVector,
}

impl SideMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> Mode {
        self.source.mode()
    }

    pub fn source(&self) -> &StateVector {
        &self.source
    }

    pub fn columns(&self) -> &[Amplitudes] {
        &self.columns
    }

    /// Column `j`, 0-based.
    pub fn column(&self, j: usize) -> &Amplitudes {
        &self.columns[j]
    }

    /// 0-based column indices of triple `T_k`.
    pub fn triple_indices(&self, k: usize) -> Result<[usize; 3]> {
        check_qubit(self.n, k)?;
        let base = 3 * (k - 1);
        Ok([base, base + 1, base + 2])
    }

    pub fn triple(&self, k: usize) -> Result<[&Amplitudes; 3]> {
        let [a, b, c] = self.triple_indices(k)?;
        Ok([&self.columns[a], &self.columns[b], &self.columns[c]])
    }

    pub fn last_index(&self) -> usize {
        3 * self.n
    }

    /// The rightmost column `-iψ`.
    pub fn last(&self) -> &Amplitudes {
        &self.columns[3 * self.n]
    }
}

/// Assemble `M` for `psi`. The columns are independent and built in
/// parallel.
pub fn side_matrix(psi: &StateVector) -> Result<SideMatrix> {
    use rayon::prelude::*;
    let n = psi.n();
    let mut columns: Vec<Amplitudes> = (0..3 * n)
        .into_par_iter()
        .map(|j| apply(psi, j / 3 + 1, Generator::ALL[j % 3]))
        .collect::<Result<_>>()?;
    columns.push(minus_i(psi.amplitudes()));
    Ok(SideMatrix {
        n,
        columns,
        source: psi.clone(),
    })
}

/// Complex vectors viewed as real vectors, `z_j = a_j + i b_j` stored as
/// consecutive entries `(a_j, b_j)`. Columns of the view are the selected
/// complex vectors.
#[derive(Clone, Debug, PartialEq)]
pub enum RealView {
    Float(DMatrix<f64>),
    /// Column-major: one rational vector per selected column.
    Exact(Vec<Vec<BigRational>>),
}

impl RealView {
    pub fn nrows(&self) -> usize {
        match self {
            RealView::Float(m) => m.nrows(),
            RealView::Exact(cols) => cols.first().map_or(0, Vec::len),
        }
    }

    pub fn ncols(&self) -> usize {
        match self {
            RealView::Float(m) => m.ncols(),
            RealView::Exact(cols) => cols.len(),
        }
    }

    /// Floating copy of the view.
    pub fn to_f64(&self) -> DMatrix<f64> {
        match self {
            RealView::Float(m) => m.clone(),
            RealView::Exact(cols) => DMatrix::from_fn(self.nrows(), cols.len(), |r, c| rational_to_f64(&cols[c][r])),
        }
    }

    /// Real dot product of columns `i` and `j`, as `f64`.
    pub fn dot(&self, i: usize, j: usize) -> f64 {
        match self {
            RealView::Float(m) => m.column(i).dot(&m.column(j)),
            RealView::Exact(cols) => rational_to_f64(&exact_dot(&cols[i], &cols[j])),
        }
    }
}

pub(crate) fn exact_dot(u: &[BigRational], v: &[BigRational]) -> BigRational {
    u.iter().zip(v).fold(BigRational::zero(), |acc, (a, b)| acc + a * b)
}

fn check_lengths(columns: &[&Amplitudes]) -> Result<()> {
    if let Some(first) = columns.first() {
        if let Some(bad) = columns.iter().find(|c| c.len() != first.len()) {
            return Err(Error::SizeMismatch {
                expected: first.len(),
                found: bad.len(),
            });
        }
    }
    Ok(())
}

/// Real view of the given columns, keeping their numeric mode.
pub fn real_view(columns: &[&Amplitudes]) -> Result<RealView> {
    check_lengths(columns)?;
    let mode = columns.first().map_or(Mode::Float, |c| c.mode());
    if columns.iter().any(|c| c.mode() != mode) {
        return Err(Error::ModeMismatch);
    }
    if mode == Mode::Float {
        return real_view_f64(columns);
    }
    let cols = columns
        .iter()
        .map(|c| match c {
            Amplitudes::Exact(v) => v.iter().flat_map(|z| [z.re.clone(), z.im.clone()]).collect(),
            Amplitudes::Float(_) => unreachable!(),
        })
        .collect();
    Ok(RealView::Exact(cols))
}

/// Floating real view of the given columns, rounding exact entries.
pub fn real_view_f64(columns: &[&Amplitudes]) -> Result<RealView> {
    check_lengths(columns)?;
    let rows = columns.first().map_or(0, |c| 2 * c.len());
    let mut m = DMatrix::zeros(rows, columns.len());
    for (j, col) in columns.iter().enumerate() {
        for (r, z) in col.to_f64().iter().enumerate() {
            m[(2 * r, j)] = z.re;
            m[(2 * r + 1, j)] = z.im;
        }
    }
    Ok(RealView::Float(m))
}
