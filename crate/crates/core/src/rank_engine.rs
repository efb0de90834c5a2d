//! Real ranks and span dimensions of column selections of the side matrix.
//!
//! Two backends:
//!
//! * **float**: singular values of the real view; `σ_i` counts toward the
//!   rank iff `σ_i > tol · σ_max` (a value exactly at the cutoff is
//!   discarded). Every verdict carries the gap ratio between the smallest
//!   retained and the largest discarded singular value.
//! * **exact**: fraction-free (Bareiss) elimination over the integers after
//!   clearing denominators. Tolerance-free; requires an exact-mode state.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie_action::{exact_dot, real_view, real_view_f64, RealView, SideMatrix};
use crate::state_core::{check_qubit, Amplitudes, Mode};
use crate::svd::jacobi_svd;

/// Default relative threshold for unit-norm floating states.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Verdicts whose gap ratio falls below this are flagged as low confidence.
pub const LOW_CONFIDENCE_GAP: f64 = 1e3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Float,
    Exact,
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "float" => Ok(Backend::Float),
            "exact" => Ok(Backend::Exact),
            other => Err(Error::Parse(format!("unknown backend `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankOptions {
    pub backend: Backend,
    pub tol: f64,
}

impl Default for RankOptions {
    fn default() -> Self {
        RankOptions {
            backend: Backend::Float,
            tol: DEFAULT_TOL,
        }
    }
}

impl RankOptions {
    pub fn exact() -> Self {
        RankOptions {
            backend: Backend::Exact,
            tol: DEFAULT_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankResult {
    pub rank: usize,
    /// Descending; empty for the exact backend.
    pub singular_values: Vec<f64>,
    /// Smallest retained over largest discarded singular value; infinite
    /// when nothing (or only exact zeros) was discarded.
    pub gap_ratio: f64,
    pub backend: Backend,
}

impl RankResult {
    pub fn low_confidence(&self) -> bool {
        self.gap_ratio < LOW_CONFIDENCE_GAP
    }
}

/// A union of triples `T_k`, optionally with the rightmost column `-iψ`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ColumnSelector {
    triples: BTreeSet<usize>,
    include_last: bool,
}

impl ColumnSelector {
    pub fn new(triples: impl IntoIterator<Item = usize>, include_last: bool) -> Self {
        ColumnSelector {
            triples: triples.into_iter().collect(),
            include_last,
        }
    }

    /// Every column of `M` for `n` qubits.
    pub fn all(n: usize) -> Self {
        ColumnSelector::new(1..=n, true)
    }

    pub fn last_only() -> Self {
        ColumnSelector::new([], true)
    }

    pub fn triples(&self) -> &BTreeSet<usize> {
        &self.triples
    }

    pub fn include_last(&self) -> bool {
        self.include_last
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty() && !self.include_last
    }

    /// 0-based column indices into `m`.
    pub fn indices(&self, m: &SideMatrix) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(3 * self.triples.len() + 1);
        for &k in &self.triples {
            out.extend(m.triple_indices(k)?);
        }
        if self.include_last {
            out.push(m.last_index());
        }
        Ok(out)
    }
}

/// Rank from singular values under a relative threshold.
pub fn rank_from_singular_values(mut sv: Vec<f64>, tol: f64) -> RankResult {
    sv.sort_by(|a, b| b.total_cmp(a));
    let smax = sv.first().copied().unwrap_or(0.0);
    let cutoff = tol * smax;
    let rank = if smax > 0.0 {
        sv.iter().take_while(|&&s| s > cutoff).count()
    } else {
        0
    };
    let gap_ratio = match (rank, sv.get(rank)) {
        (0, _) | (_, None) => f64::INFINITY,
        (r, Some(&discarded)) => sv[r - 1] / discarded,
    };
    RankResult {
        rank,
        singular_values: sv,
        gap_ratio,
        backend: Backend::Float,
    }
}

/// Floating rank of a real matrix.
pub fn float_rank(view: &DMatrix<f64>, tol: f64) -> RankResult {
    if view.is_empty() {
        return rank_from_singular_values(vec![], tol);
    }
    rank_from_singular_values(jacobi_svd(view).singular_values, tol)
}

fn clear_denominators(v: &[BigRational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    v.iter().map(|r| r.numer() * (&lcm / r.denom())).collect()
}

/// Rank of integer row vectors by Bareiss fraction-free elimination.
fn bareiss_rank(mut rows: Vec<Vec<BigInt>>) -> usize {
    let m = rows.len();
    let width = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..width {
        if rank == m {
            break;
        }
        let Some(p) = (rank..m).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            let lead = std::mem::take(&mut row[col]);
            for j in col + 1..width {
                // exact by Sylvester's determinant identity
                row[j] = (&pivot[col] * &row[j] - &lead * &pivot[j]) / &prev;
            }
        }
        prev = pivot[col].clone();
        rank += 1;
    }
    rank
}

/// Exact real rank of rational vectors.
pub fn exact_rank(vectors: &[Vec<BigRational>]) -> usize {
    let rows: Vec<Vec<BigInt>> = vectors
        .iter()
        .map(|v| clear_denominators(v))
        .filter(|v| v.iter().any(|x| !x.is_zero()))
        .collect();
    bareiss_rank(rows)
}

fn selected<'a>(m: &'a SideMatrix, sel: &ColumnSelector) -> Result<Vec<&'a Amplitudes>> {
    for &k in sel.triples() {
        check_qubit(m.n(), k)?;
    }
    if sel.is_empty() {
        return Err(Error::EmptySelection);
    }
    Ok(sel.indices(m)?.into_iter().map(|j| m.column(j)).collect())
}

fn float_view(columns: &[&Amplitudes]) -> Result<DMatrix<f64>> {
    match real_view_f64(columns)? {
        RealView::Float(v) => Ok(v),
        RealView::Exact(_) => unreachable!("real_view_f64 returns a float view"),
    }
}

fn exact_view(columns: &[&Amplitudes]) -> Result<Vec<Vec<BigRational>>> {
    match real_view(columns)? {
        RealView::Exact(v) => Ok(v),
        RealView::Float(_) => Err(Error::ExactUnavailable),
    }
}

/// Real rank of the selected columns of `m`.
pub fn real_rank(m: &SideMatrix, sel: &ColumnSelector, opts: &RankOptions) -> Result<RankResult> {
    let columns = selected(m, sel)?;
    match opts.backend {
        Backend::Float => Ok(float_rank(&float_view(&columns)?, opts.tol)),
        Backend::Exact => {
            if m.mode() != Mode::Exact {
                return Err(Error::ExactUnavailable);
            }
            Ok(RankResult {
                rank: exact_rank(&exact_view(&columns)?),
                singular_values: Vec::new(),
                gap_ratio: f64::INFINITY,
                backend: Backend::Exact,
            })
        }
    }
}

/// `dim <T_k : k in triples>` (plus `-iψ` when `include_last`).
pub fn span_dim(
    m: &SideMatrix,
    triples: impl IntoIterator<Item = usize>,
    include_last: bool,
    opts: &RankOptions,
) -> Result<usize> {
    real_rank(m, &ColumnSelector::new(triples, include_last), opts).map(|r| r.rank)
}

fn check_complement_args(m: &SideMatrix, inside: usize, against: &ColumnSelector) -> Result<()> {
    check_qubit(m.n(), inside)?;
    for &k in against.triples() {
        check_qubit(m.n(), k)?;
    }
    if against.triples().contains(&inside) {
        return Err(Error::OverlappingSelection(inside));
    }
    Ok(())
}

/// Orthonormal basis (as columns) of the span of `view`, keeping
/// directions with `σ > tol · σ_max`.
fn orthonormal_basis(view: DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let svd = jacobi_svd(&view);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| smax > 0.0 && svd.singular_values[i] > tol * smax)
        .collect();
    DMatrix::from_fn(svd.u.nrows(), keep.len(), |r, c| svd.u[(r, keep[c])])
}

/// Principal-angle cosines between `<T_inside>` and the span of `against`,
/// with the left singular vectors in `<T_inside>` coordinates.
fn principal_cosines(
    m: &SideMatrix,
    inside: usize,
    against: &ColumnSelector,
    tol: f64,
) -> Result<(DMatrix<f64>, DMatrix<f64>, DVector<f64>)> {
    let triple = m.triple(inside)?;
    let q = orthonormal_basis(float_view(&triple)?, tol);
    let other = if against.is_empty() {
        DMatrix::zeros(q.nrows(), 0)
    } else {
        orthonormal_basis(float_view(&selected(m, against)?)?, tol)
    };
    // right singular vectors of the transpose form a full basis of
    // <T_inside> coordinates, one per cosine
    let svd = jacobi_svd(&(other.transpose() * &q));
    Ok((q, svd.v, DVector::from_vec(svd.singular_values)))
}

/// Dimension of the subspace of `<T_inside>` orthogonal to every column
/// selected by `against`.
///
/// The float backend counts principal-angle cosines above `tol` (absolute,
/// since cosines lie in `[0, 1]`); the exact backend computes
/// `rank T − rank(Tᵀ B)` from exact real dot products.
pub fn complement_dim(m: &SideMatrix, inside: usize, against: &ColumnSelector, opts: &RankOptions) -> Result<usize> {
    check_complement_args(m, inside, against)?;
    match opts.backend {
        Backend::Float => {
            let (q, _, cosines) = principal_cosines(m, inside, against, opts.tol)?;
            let hit = cosines.iter().filter(|&&c| c > opts.tol).count();
            Ok(q.ncols().saturating_sub(hit))
        }
        Backend::Exact => {
            if m.mode() != Mode::Exact {
                return Err(Error::ExactUnavailable);
            }
            let triple = exact_view(&m.triple(inside)?)?;
            let own = exact_rank(&triple);
            if against.is_empty() {
                return Ok(own);
            }
            let other = exact_view(&selected(m, against)?)?;
            let cross: Vec<Vec<BigRational>> = other
                .iter()
                .map(|b| triple.iter().map(|t| exact_dot(t, b)).collect())
                .collect();
            Ok(own - exact_rank(&cross))
        }
    }
}

/// Orthonormal basis (real-view vectors) of the subspace counted by
/// [`complement_dim`] with the float backend.
pub fn complement_basis(
    m: &SideMatrix,
    inside: usize,
    against: &ColumnSelector,
    tol: f64,
) -> Result<Vec<DVector<f64>>> {
    check_complement_args(m, inside, against)?;
    let (q, u, cosines) = principal_cosines(m, inside, against, tol)?;
    Ok((0..q.ncols())
        .filter(|&i| cosines.get(i).is_none_or(|&c| c <= tol))
        .map(|i| &q * u.column(i))
        .collect())
}
