//! Multi-indices, n-qubit state vectors and tensor-product bookkeeping.
//!
//! Qubits are numbered `1..=n` and qubit 1 is the most significant bit of the
//! integer code, so `|i_1 i_2 ... i_n>` sits at index `sum_k i_k 2^(n-k)`.
//!
//! States come in two numeric modes. Floating states are normalized on
//! construction. Exact states hold Gaussian-rational amplitudes and keep the
//! unnormalized representative, since normalization constants such as
//! `1/sqrt(2)` are irrational; ranks do not depend on scale.

use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive, Zero};
use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::orbit_analysis::SingletPairing;
use crate::rng;
use crate::svd::jacobi_svd;

/// A complex number with rational real and imaginary parts.
pub type GaussianRational = Complex<BigRational>;

/// Field-like scalars shared by the floating and exact code paths.
pub trait Scalar: Clone + Num + Neg<Output = Self> {}

impl<T: Clone + Num + Neg<Output = T>> Scalar for T {}

pub(crate) fn check_qubit(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        Err(Error::QubitOutOfRange { k, n })
    } else {
        Ok(())
    }
}

/// Bit mask of qubit `k` (1-based) in an `n`-qubit code.
#[inline]
pub(crate) fn qubit_mask(n: usize, k: usize) -> usize {
    1 << (n - k)
}

/// Multi-index `I = (i_1 ... i_n)` with its integer code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    n: usize,
    code: usize,
}

impl MultiIndex {
    pub fn new(n: usize, code: usize) -> Result<Self> {
        if n == 0 || n >= usize::BITS as usize {
            return Err(Error::QubitCount(n));
        }
        if code >= 1 << n {
            return Err(Error::IndexOutOfRange { code, n });
        }
        Ok(MultiIndex { n, code })
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let n = bits.len();
        let mut code = 0usize;
        for &b in bits {
            if b > 1 {
                return Err(Error::Parse(format!("bit value {b} is not 0 or 1")));
            }
            code = (code << 1) | b as usize;
        }
        MultiIndex::new(n, code)
    }

    /// Parse a bit string such as `"0110"`.
    pub fn parse(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Parse(format!("invalid bit string `{s}`"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        MultiIndex::from_bits(&bits)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn code(&self) -> usize {
        self.code
    }

    /// Digit `i_k`.
    pub fn bit(&self, k: usize) -> Result<u8> {
        check_qubit(self.n, k)?;
        Ok(((self.code & qubit_mask(self.n, k)) != 0) as u8)
    }

    pub fn bits(&self) -> Vec<u8> {
        (1..=self.n)
            .map(|k| ((self.code & qubit_mask(self.n, k)) != 0) as u8)
            .collect()
    }

    /// `I_k`: complement digit `k`.
    pub fn flip(self, k: usize) -> Result<Self> {
        check_qubit(self.n, k)?;
        Ok(MultiIndex {
            n: self.n,
            code: self.code ^ qubit_mask(self.n, k),
        })
    }

    /// `I_kl`: complement digits `k` and `l`.
    pub fn flip_pair(self, k: usize, l: usize) -> Result<Self> {
        self.flip(k)?.flip(l)
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for b in self.bits() {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Float,
    Exact,
}

/// A raw complex vector in one of the two numeric modes.
#[derive(Clone, Debug, PartialEq)]
pub enum Amplitudes {
    Float(Vec<Complex64>),
    Exact(Vec<GaussianRational>),
}

impl Amplitudes {
    pub fn len(&self) -> usize {
        match self {
            Amplitudes::Float(v) => v.len(),
            Amplitudes::Exact(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn mode(&self) -> Mode {
        match self {
            Amplitudes::Float(_) => Mode::Float,
            Amplitudes::Exact(_) => Mode::Exact,
        }
    }

    /// Floating copy. Exact entries are rounded to the nearest `f64`.
    pub fn to_f64(&self) -> Vec<Complex64> {
        match self {
            Amplitudes::Float(v) => v.clone(),
            Amplitudes::Exact(v) => v.iter().map(gaussian_to_f64).collect(),
        }
    }

    pub fn norm_sqr_f64(&self) -> f64 {
        self.to_f64().iter().map(|z| z.norm_sqr()).sum()
    }

    fn is_zero(&self) -> bool {
        match self {
            Amplitudes::Float(v) => v.iter().all(|z| z.norm_sqr() == 0.0),
            Amplitudes::Exact(v) => v.iter().all(|z| z.is_zero()),
        }
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn gaussian_to_f64(z: &GaussianRational) -> Complex64 {
    Complex64::new(rational_to_f64(&z.re), rational_to_f64(&z.im))
}

pub fn gaussian_int(re: i64, im: i64) -> GaussianRational {
    Complex::new(
        BigRational::from_integer(BigInt::from(re)),
        BigRational::from_integer(BigInt::from(im)),
    )
}

fn exact_norm_sqr(v: &[GaussianRational]) -> BigRational {
    v.iter().fold(BigRational::zero(), |acc, z| acc + z.norm_sqr())
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::BadLength(len));
    }
    Ok(len.trailing_zeros() as usize)
}

/// An `n`-qubit pure state vector `sum_I c_I |I>`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amplitudes: Amplitudes,
}

impl StateVector {
    /// Floating state from raw amplitudes; normalizes.
    pub fn from_float(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = qubits_for_len(amplitudes.len())?;
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(Error::ZeroVector);
        }
        // leave already-normalized input bit-for-bit intact
        let amplitudes = if (norm - 1.0).abs() <= 4.0 * f64::EPSILON {
            amplitudes
        } else {
            amplitudes.into_iter().map(|z| z / norm).collect()
        };
        Ok(StateVector {
            n,
            amplitudes: Amplitudes::Float(amplitudes),
        })
    }

    /// Exact state from Gaussian-rational amplitudes, stored unnormalized.
    pub fn from_exact(amplitudes: Vec<GaussianRational>) -> Result<Self> {
        let n = qubits_for_len(amplitudes.len())?;
        let state = StateVector {
            n,
            amplitudes: Amplitudes::Exact(amplitudes),
        };
        if state.amplitudes.is_zero() {
            return Err(Error::ZeroVector);
        }
        Ok(state)
    }

    pub(crate) fn from_amplitudes(amplitudes: Amplitudes) -> Result<Self> {
        match amplitudes {
            Amplitudes::Float(v) => StateVector::from_float(v),
            Amplitudes::Exact(v) => StateVector::from_exact(v),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn mode(&self) -> Mode {
        self.amplitudes.mode()
    }

    pub fn amplitudes(&self) -> &Amplitudes {
        &self.amplitudes
    }

    /// Amplitude `c_I` as a floating complex number (exact values rounded).
    pub fn amplitude(&self, index: MultiIndex) -> Result<Complex64> {
        if index.n() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                found: index.n(),
            });
        }
        Ok(match &self.amplitudes {
            Amplitudes::Float(v) => v[index.code()],
            Amplitudes::Exact(v) => gaussian_to_f64(&v[index.code()]),
        })
    }

    /// Squared norm of the stored representative. Exactly 1 up to rounding
    /// in floating mode.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_sqr_f64()
    }

    /// Exact squared norm of an exact representative.
    pub fn exact_norm_sqr(&self) -> Option<BigRational> {
        match &self.amplitudes {
            Amplitudes::Float(_) => None,
            Amplitudes::Exact(v) => Some(exact_norm_sqr(v)),
        }
    }

    /// Normalized floating copy.
    pub fn to_float(&self) -> StateVector {
        match &self.amplitudes {
            Amplitudes::Float(_) => self.clone(),
            Amplitudes::Exact(v) => StateVector::from_float(v.iter().map(gaussian_to_f64).collect())
                .expect("nonzero exact state rounds to a nonzero float state"),
        }
    }

    pub fn float_amplitudes(&self) -> Vec<Complex64> {
        self.to_float().amplitudes.to_f64()
    }

    /// Indices with nonzero amplitude.
    pub fn support(&self) -> Vec<usize> {
        match &self.amplitudes {
            Amplitudes::Float(v) => (0..v.len()).filter(|&i| v[i].norm_sqr() > 0.0).collect(),
            Amplitudes::Exact(v) => (0..v.len()).filter(|&i| !v[i].is_zero()).collect(),
        }
    }
}

/// Squared overlap `|<a|b>|^2 / (|a|^2 |b|^2)`; 1 iff equal up to phase and scale.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::SizeMismatch {
            expected: a.n(),
            found: b.n(),
        });
    }
    let (x, y) = (a.amplitudes.to_f64(), b.amplitudes.to_f64());
    let inner: Complex64 = x.iter().zip(&y).map(|(p, q)| p.conj() * q).sum();
    let nx: f64 = x.iter().map(|z| z.norm_sqr()).sum();
    let ny: f64 = y.iter().map(|z| z.norm_sqr()).sum();
    Ok(inner.norm_sqr() / (nx * ny))
}

fn unit<T: Scalar>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

fn from_support(n: usize, support: &[usize], mode: Mode) -> Result<StateVector> {
    let dim = 1usize << n;
    match mode {
        Mode::Float => {
            let mut v = vec![Complex64::zero(); dim];
            for &i in support {
                v[i] = Complex64::new(1.0, 0.0);
            }
            StateVector::from_float(v)
        }
        Mode::Exact => {
            let mut v = vec![GaussianRational::zero(); dim];
            for &i in support {
                v[i] = unit();
            }
            StateVector::from_exact(v)
        }
    }
}

/// Computational basis state `|I>`.
pub fn basis_state(n: usize, index: MultiIndex, mode: Mode) -> Result<StateVector> {
    if index.n() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            found: index.n(),
        });
    }
    from_support(n, &[index.code()], mode)
}

/// `(|0...0> + |1...1>)/sqrt(2)`.
pub fn ghz_state(n: usize, mode: Mode) -> Result<StateVector> {
    if n == 0 || n >= 32 {
        return Err(Error::QubitCount(n));
    }
    from_support(n, &[0, (1 << n) - 1], mode)
}

/// Uniform superposition of the weight-one basis states.
pub fn w_state(n: usize, mode: Mode) -> Result<StateVector> {
    if n == 0 || n >= 32 {
        return Err(Error::QubitCount(n));
    }
    let support: Vec<usize> = (1..=n).map(|k| qubit_mask(n, k)).collect();
    from_support(n, &support, mode)
}

/// Canonical pair state `(|00> + |11>)/sqrt(2)`.
pub fn pair_state(mode: Mode) -> StateVector {
    ghz_state(2, mode).expect("two qubits")
}

/// Haar-random state: `2^(n+1)` standard Gaussians, normalized.
pub fn random_state(n: usize, seed: u64) -> Result<StateVector> {
    let mut rng = rng::seeded(seed, 0);
    random_state_with(n, &mut rng)
}

pub fn random_state_with(n: usize, rng: &mut rng::Rng) -> Result<StateVector> {
    if n == 0 || n >= 32 {
        return Err(Error::QubitCount(n));
    }
    let v = (0..1usize << n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im)
        })
        .collect();
    StateVector::from_float(v)
}

/// Exact state with Gaussian-integer amplitudes drawn from `[-bound, bound]`.
pub fn random_gaussian_integer_state(n: usize, bound: i64, rng: &mut rng::Rng) -> Result<StateVector> {
    if n == 0 || n >= 32 {
        return Err(Error::QubitCount(n));
    }
    loop {
        let v: Vec<_> = (0..1usize << n)
            .map(|_| gaussian_int(rng.random_range(-bound..=bound), rng.random_range(-bound..=bound)))
            .collect();
        if let Ok(state) = StateVector::from_exact(v) {
            return Ok(state);
        }
    }
}

fn tensor_vec<T: Scalar>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x.clone() * y.clone());
        }
    }
    out
}

/// `a ⊗ b`, with `a`'s qubits first.
pub fn tensor(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    let amplitudes = match (&a.amplitudes, &b.amplitudes) {
        (Amplitudes::Float(x), Amplitudes::Float(y)) => Amplitudes::Float(tensor_vec(x, y)),
        (Amplitudes::Exact(x), Amplitudes::Exact(y)) => Amplitudes::Exact(tensor_vec(x, y)),
        _ => return Err(Error::ModeMismatch),
    };
    StateVector::from_amplitudes(amplitudes)
}

/// Extract the bits of `code` at the given global qubits into a local code,
/// first listed qubit most significant.
fn gather_bits(n: usize, code: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .fold(0, |acc, &q| (acc << 1) | ((code & qubit_mask(n, q)) != 0) as usize)
}

fn compose_vec<T: Scalar>(n: usize, parts: &[(&[usize], &[Complex<T>])]) -> Vec<Complex<T>> {
    (0..1usize << n)
        .map(|code| {
            parts.iter().fold(unit::<T>(), |acc, (qubits, amps)| {
                acc * amps[gather_bits(n, code, qubits)].clone()
            })
        })
        .collect()
}

/// Tensor product of factors placed on arbitrary global qubits.
///
/// `factors[j].0` lists the global positions (1-based) of factor `j`'s
/// qubits in its own order; the lists must partition `1..=n`.
pub fn compose(n: usize, factors: &[(Vec<usize>, &StateVector)]) -> Result<StateVector> {
    if n == 0 || n >= 32 {
        return Err(Error::QubitCount(n));
    }
    let mut seen = vec![false; n + 1];
    for (qubits, state) in factors {
        if qubits.len() != state.n() {
            return Err(Error::SizeMismatch {
                expected: state.n(),
                found: qubits.len(),
            });
        }
        for &q in qubits {
            check_qubit(n, q)?;
            if std::mem::replace(&mut seen[q], true) {
                return Err(Error::InvalidPairing(format!("qubit {q} assigned twice")));
            }
        }
    }
    if let Some(q) = (1..=n).find(|&q| !seen[q]) {
        return Err(Error::InvalidPairing(format!("qubit {q} not covered")));
    }
    let mode = factors.first().map(|(_, s)| s.mode()).unwrap_or(Mode::Float);
    if factors.iter().any(|(_, s)| s.mode() != mode) {
        return Err(Error::ModeMismatch);
    }
    let amplitudes = match mode {
        Mode::Float => {
            let parts: Vec<(&[usize], &[Complex64])> = factors
                .iter()
                .map(|(q, s)| match &s.amplitudes {
                    Amplitudes::Float(v) => (q.as_slice(), v.as_slice()),
                    Amplitudes::Exact(_) => unreachable!(),
                })
                .collect();
            Amplitudes::Float(compose_vec(n, &parts))
        }
        Mode::Exact => {
            let parts: Vec<(&[usize], &[GaussianRational])> = factors
                .iter()
                .map(|(q, s)| match &s.amplitudes {
                    Amplitudes::Exact(v) => (q.as_slice(), v.as_slice()),
                    Amplitudes::Float(_) => unreachable!(),
                })
                .collect();
            Amplitudes::Exact(compose_vec(n, &parts))
        }
    };
    StateVector::from_amplitudes(amplitudes)
}

/// Product of canonical pair states on each pair of `pairing`, with `|0>` on
/// the lone qubit when there is one.
pub fn singlet_product(pairing: &SingletPairing, mode: Mode) -> Result<StateVector> {
    let pair = pair_state(mode);
    let zero = basis_state(1, MultiIndex::new(1, 0)?, mode)?;
    let mut factors: Vec<(Vec<usize>, &StateVector)> =
        pairing.pairs().iter().map(|&(l, m)| (vec![l, m], &pair)).collect();
    if let Some(j) = pairing.lone() {
        factors.push((vec![j], &zero));
    }
    compose(pairing.n(), &factors)
}

fn contract_vec<T: Scalar>(n: usize, amps: &[Complex<T>], l: usize, m: usize) -> Vec<Complex<T>> {
    let rest: Vec<usize> = (1..=n).filter(|&q| q != l && q != m).collect();
    let both = qubit_mask(n, l) | qubit_mask(n, m);
    (0..1usize << (n - 2))
        .map(|local| {
            let base = rest.iter().enumerate().fold(0usize, |acc, (pos, &q)| {
                if local & (1 << (rest.len() - 1 - pos)) != 0 {
                    acc | qubit_mask(n, q)
                } else {
                    acc
                }
            });
            amps[base].clone() + amps[base | both].clone()
        })
        .collect()
}

/// Residual `<s'|_{l,l'} psi` on the remaining `n-2` qubits, in their
/// original relative order. Floating results are normalized.
///
/// If `psi = s'_{l,l'} ⊗ phi` the result equals `phi` up to phase.
pub fn contract_pair(psi: &StateVector, l: usize, m: usize) -> Result<StateVector> {
    let n = psi.n();
    check_qubit(n, l)?;
    check_qubit(n, m)?;
    if l == m {
        return Err(Error::InvalidPairing(format!("pair ({l}, {m}) repeats a qubit")));
    }
    if n < 3 {
        return Err(Error::QubitCount(n));
    }
    let amplitudes = match &psi.amplitudes {
        Amplitudes::Float(v) => {
            let out = contract_vec(n, v, l, m);
            let norm_sqr: f64 = out.iter().map(|z| z.norm_sqr()).sum();
            // Relative to |psi|^2 = 1; below this the pair is not canonical.
            if norm_sqr < 1e-20 {
                return Err(Error::ZeroResidual(l, m));
            }
            Amplitudes::Float(out)
        }
        Amplitudes::Exact(v) => {
            let out = contract_vec(n, v, l, m);
            if out.iter().all(|z| z.is_zero()) {
                return Err(Error::ZeroResidual(l, m));
            }
            Amplitudes::Exact(out)
        }
    };
    StateVector::from_amplitudes(amplitudes)
}

/// Schmidt coefficients of `psi` across the cut `subsystem | rest`,
/// descending. `subsystem` lists 1-based qubits.
pub fn schmidt_coefficients(psi: &StateVector, subsystem: &[usize]) -> Result<Vec<f64>> {
    let n = psi.n();
    for &q in subsystem {
        check_qubit(n, q)?;
    }
    let rest: Vec<usize> = (1..=n).filter(|q| !subsystem.contains(q)).collect();
    if subsystem.is_empty() || rest.is_empty() {
        return Ok(vec![1.0]);
    }
    // real embedding [[Re, -Im], [Im, Re]] doubles each singular value
    let (r, c) = (1usize << subsystem.len(), 1usize << rest.len());
    let mut mat = nalgebra::DMatrix::<f64>::zeros(2 * r, 2 * c);
    for (code, z) in psi.float_amplitudes().iter().enumerate() {
        let (i, j) = (gather_bits(n, code, subsystem), gather_bits(n, code, &rest));
        mat[(i, j)] = z.re;
        mat[(i, c + j)] = -z.im;
        mat[(r + i, j)] = z.im;
        mat[(r + i, c + j)] = z.re;
    }
    let sv = jacobi_svd(&mat).sorted_values();
    Ok(sv.into_iter().step_by(2).take(r.min(c)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn basis_states_follow_bit_convention() {
        let s = basis_state(1, MultiIndex::new(1, 0).unwrap(), Mode::Float).unwrap();
        assert_eq!(s.float_amplitudes(), vec![c(1.0, 0.0), c(0.0, 0.0)]);

        let idx = MultiIndex::parse("01").unwrap();
        assert_eq!(idx.code(), 1);
        let s = basis_state(2, idx, Mode::Float).unwrap();
        assert_eq!(s.support(), vec![1]);

        let idx = MultiIndex::parse("111").unwrap();
        assert_eq!(idx.code(), 7);
        let s = basis_state(3, idx, Mode::Exact).unwrap();
        assert_eq!(s.support(), vec![7]);

        assert!(matches!(
            MultiIndex::new(2, 4),
            Err(Error::IndexOutOfRange { code: 4, n: 2 })
        ));
    }

    #[test]
    fn flip_examples() {
        let i = MultiIndex::parse("01").unwrap();
        assert_eq!(i.flip(1).unwrap(), MultiIndex::parse("11").unwrap());
        assert_eq!(i.flip(2).unwrap(), MultiIndex::parse("00").unwrap());
        let j = MultiIndex::parse("101").unwrap();
        assert_eq!(j.flip(2).unwrap(), MultiIndex::parse("111").unwrap());
        assert!(matches!(j.flip(4), Err(Error::QubitOutOfRange { k: 4, n: 3 })));
        assert!(matches!(j.flip(0), Err(Error::QubitOutOfRange { .. })));
        assert_eq!(j.flip_pair(1, 3).unwrap(), MultiIndex::parse("000").unwrap());
    }

    #[test]
    fn tensor_of_basis_states() {
        let zero = basis_state(1, MultiIndex::new(1, 0).unwrap(), Mode::Float).unwrap();
        let one = basis_state(1, MultiIndex::new(1, 1).unwrap(), Mode::Float).unwrap();
        let t = tensor(&zero, &one).unwrap();
        assert_eq!(t.support(), vec![MultiIndex::parse("01").unwrap().code()]);

        let t = tensor(&pair_state(Mode::Float), &zero).unwrap();
        assert_eq!(t.support(), vec![0b000, 0b110]);

        let exact = pair_state(Mode::Exact);
        assert!(matches!(tensor(&exact, &zero), Err(Error::ModeMismatch)));
    }

    #[test]
    fn singlet_product_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = singlet_product(&SingletPairing::new(2, vec![(1, 2)], None).unwrap(), Mode::Float).unwrap();
        let a = s.float_amplitudes();
        assert_abs_diff_eq!(a[0].re, h, epsilon = 1e-15);
        assert_abs_diff_eq!(a[3].re, h, epsilon = 1e-15);
        assert_eq!(s.support(), vec![0, 3]);

        let s = singlet_product(&SingletPairing::new(3, vec![(1, 2)], Some(3)).unwrap(), Mode::Float).unwrap();
        assert_eq!(s.support(), vec![0b000, 0b110]);

        // Oracle: qubits 1,3 equal and 2,4 equal, enumerated by hand.
        let s = singlet_product(
            &SingletPairing::new(4, vec![(1, 3), (2, 4)], None).unwrap(),
            Mode::Float,
        )
        .unwrap();
        assert_eq!(s.support(), vec![0b0000, 0b0101, 0b1010, 0b1111]);
        for &i in &s.support() {
            assert_abs_diff_eq!(s.float_amplitudes()[i].re, 0.5, epsilon = 1e-15);
        }

        let e = singlet_product(
            &SingletPairing::new(4, vec![(1, 3), (2, 4)], None).unwrap(),
            Mode::Exact,
        )
        .unwrap();
        assert_eq!(e.exact_norm_sqr().unwrap(), BigRational::from_integer(4.into()));
    }

    #[test]
    fn random_state_is_normalized_and_deterministic() {
        let a = random_state(1, 11).unwrap();
        assert_abs_diff_eq!(a.norm_sqr(), 1.0, epsilon = 1e-12);
        let b = random_state(3, 99).unwrap();
        let b2 = random_state(3, 99).unwrap();
        assert_eq!(b, b2);
        assert_ne!(b, random_state(3, 100).unwrap());
    }

    #[test]
    fn zero_and_malformed_vectors_are_rejected() {
        assert!(matches!(
            StateVector::from_float(vec![Complex64::zero(); 4]),
            Err(Error::ZeroVector)
        ));
        assert!(matches!(
            StateVector::from_float(vec![Complex64::new(1.0, 0.0); 3]),
            Err(Error::BadLength(3))
        ));
        assert!(matches!(
            StateVector::from_exact(vec![GaussianRational::zero(); 2]),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn contract_pair_examples() {
        let one = basis_state(1, MultiIndex::new(1, 1).unwrap(), Mode::Float).unwrap();
        let psi = tensor(&pair_state(Mode::Float), &one).unwrap();
        let r = contract_pair(&psi, 1, 2).unwrap();
        assert_abs_diff_eq!(fidelity(&r, &one).unwrap(), 1.0, epsilon = 1e-14);

        let p = SingletPairing::new(4, vec![(1, 2), (3, 4)], None).unwrap();
        let psi = singlet_product(&p, Mode::Float).unwrap();
        let r = contract_pair(&psi, 1, 2).unwrap();
        assert_abs_diff_eq!(fidelity(&r, &pair_state(Mode::Float)).unwrap(), 1.0, epsilon = 1e-14);

        // the spin singlet is annihilated by <s'|
        let singlet = StateVector::from_float(vec![c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let psi = tensor(&singlet, &one).unwrap();
        assert!(matches!(contract_pair(&psi, 1, 2), Err(Error::ZeroResidual(1, 2))));
        assert!(matches!(contract_pair(&psi, 2, 2), Err(Error::InvalidPairing(_))));
    }

    #[test]
    fn contract_then_retensor_matches_on_products() {
        // Pair on non-adjacent qubits 2 and 4 of a 5-qubit product.
        let phi = random_state(3, 5).unwrap();
        let pair = pair_state(Mode::Float);
        let psi = compose(5, &[(vec![2, 4], &pair), (vec![1, 3, 5], &phi)]).unwrap();
        let r = contract_pair(&psi, 2, 4).unwrap();
        // amplitude-ratio oracle: r must be proportional to phi entrywise
        let (ra, pa) = (r.float_amplitudes(), phi.float_amplitudes());
        let k = (0..8).max_by(|&i, &j| pa[i].norm().total_cmp(&pa[j].norm())).unwrap();
        let ratio = ra[k] / pa[k];
        for i in 0..8 {
            assert_abs_diff_eq!((pa[i] * ratio - ra[i]).norm(), 0.0, epsilon = 1e-12);
        }
        let back = compose(5, &[(vec![2, 4], &pair), (vec![1, 3, 5], &r)]).unwrap();
        assert_abs_diff_eq!(fidelity(&back, &psi).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn exact_contraction_keeps_rationals() {
        let p = SingletPairing::new(3, vec![(1, 3)], Some(2)).unwrap();
        let psi = singlet_product(&p, Mode::Exact).unwrap();
        let r = contract_pair(&psi, 1, 3).unwrap();
        assert_eq!(r.mode(), Mode::Exact);
        assert_eq!(r.support(), vec![0]);
    }

    #[test]
    fn schmidt_coefficients_of_pair_state() {
        let s = schmidt_coefficients(&pair_state(Mode::Float), &[1]).unwrap();
        assert_abs_diff_eq!(s[0], std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-14);
        assert_abs_diff_eq!(s[1], std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-14);
        let prod = tensor(&random_state(1, 1).unwrap(), &random_state(2, 2).unwrap()).unwrap();
        let s = schmidt_coefficients(&prod, &[1]).unwrap();
        assert!(s[1] < 1e-12);
    }

    #[test]
    fn w_and_ghz_supports() {
        assert_eq!(w_state(3, Mode::Exact).unwrap().support(), vec![1, 2, 4]);
        assert_eq!(ghz_state(3, Mode::Float).unwrap().support(), vec![0, 7]);
    }
}
