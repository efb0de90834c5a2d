//! Orbit dimension, minimality, singlet-pair and unentangled-qubit
//! detection, and classification of minimum-orbit states by their pairing.
//!
//! The orbit dimension of a state is `rank_R(M) - 1`. A pair of triples
//! spanning exactly three real dimensions marks a singlet factor on those two
//! qubits; a triple spanning three dimensions together with `-iψ` marks an
//! unentangled qubit. Minimum-orbit states are exactly singlet products (plus
//! one unentangled qubit for odd `n`), classified up to local unitaries by
//! which qubits are paired.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::json::num;
use crate::lie_action::{side_matrix, SideMatrix};
use crate::rank_engine::{real_rank, Backend, ColumnSelector, RankOptions, RankResult};
use crate::rng;
use crate::state_core::{compose, contract_pair, fidelity, pair_state, StateVector};

/// Smallest orbit dimension for `n` qubits: `3n/2` (even) or `(3n+1)/2` (odd).
pub fn min_orbit_dimension(n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::QubitCount(n));
    }
    Ok((3 * n + n % 2) / 2)
}

/// Lower bound on the span of `q` triples together with `-iψ`.
pub fn subset_span_lower_bound(q: usize) -> usize {
    (3 * q + q % 2) / 2 + 1
}

/// Disjoint qubit pairs plus, for odd `n`, the one remaining qubit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SingletPairing {
    n: usize,
    pairs: BTreeSet<(usize, usize)>,
    lone: Option<usize>,
}

impl SingletPairing {
    pub fn new(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>, lone: Option<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::QubitCount(n));
        }
        let mut covered = vec![false; n + 1];
        let mut mark = |q: usize| -> Result<()> {
            if q == 0 || q > n {
                return Err(Error::InvalidPairing(format!("qubit {q} outside 1..={n}")));
            }
            if std::mem::replace(&mut covered[q], true) {
                return Err(Error::InvalidPairing(format!("qubit {q} used twice")));
            }
            Ok(())
        };
        let mut set = BTreeSet::new();
        for (a, b) in pairs {
            if a == b {
                return Err(Error::InvalidPairing(format!("pair ({a}, {b}) repeats a qubit")));
            }
            mark(a)?;
            mark(b)?;
            set.insert((a.min(b), a.max(b)));
        }
        if let Some(j) = lone {
            mark(j)?;
        }
        if (n % 2 == 1) != lone.is_some() {
            return Err(Error::InvalidPairing(format!(
                "a lone qubit is required iff n is odd (n = {n})"
            )));
        }
        if let Some(q) = (1..=n).find(|&q| !covered[q]) {
            return Err(Error::InvalidPairing(format!("qubit {q} not covered")));
        }
        Ok(SingletPairing { n, pairs: set, lone })
    }

    /// Uniformly random pairing: shuffle the qubits and pair neighbours.
    pub fn random(n: usize, rng: &mut rng::Rng) -> Result<Self> {
        use rand::seq::SliceRandom;
        let mut qubits: Vec<usize> = (1..=n).collect();
        qubits.shuffle(rng);
        let lone = if n % 2 == 1 { qubits.pop() } else { None };
        SingletPairing::new(n, qubits.chunks(2).map(|p| (p[0], p[1])), lone)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> &BTreeSet<(usize, usize)> {
        &self.pairs
    }

    pub fn lone(&self) -> Option<usize> {
        self.lone
    }

    pub fn to_json(&self) -> Value {
        json!({
            "pairs": self.pairs.iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>(),
            "lone": self.lone,
        })
    }
}

/// True iff both pairings use the same set of unordered pairs.
pub fn pairing_equal(p: &SingletPairing, q: &SingletPairing) -> Result<bool> {
    if p.n != q.n {
        return Err(Error::SizeMismatch {
            expected: p.n,
            found: q.n,
        });
    }
    Ok(p.pairs == q.pairs)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    pub backend: Backend,
    pub tol: f64,
    pub singular_values: Vec<f64>,
    /// Gap ratio of the full-rank verdict.
    pub rank_gap_ratio: f64,
    /// Smallest gap ratio over every rank verdict in the report.
    pub min_gap_ratio: f64,
    pub warnings: Vec<String>,
}

impl Diagnostics {
    fn new(opts: &RankOptions, full: &RankResult) -> Self {
        let mut d = Diagnostics {
            backend: opts.backend,
            tol: opts.tol,
            singular_values: full.singular_values.clone(),
            rank_gap_ratio: full.gap_ratio,
            min_gap_ratio: f64::INFINITY,
            warnings: Vec::new(),
        };
        d.record("rank of M", full);
        d
    }

    fn record(&mut self, what: &str, r: &RankResult) {
        self.min_gap_ratio = self.min_gap_ratio.min(r.gap_ratio);
        if r.low_confidence() {
            self.warnings.push(format!(
                "low-confidence verdict for {what}: rank {} with gap ratio {:.3e}",
                r.rank, r.gap_ratio
            ));
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "backend": self.backend,
            "tol": num(self.tol),
            "singular_values": self.singular_values.iter().map(|&s| num(s)).collect::<Vec<_>>(),
            "rank_gap_ratio": num(self.rank_gap_ratio),
            "min_gap_ratio": num(self.min_gap_ratio),
            "warnings": self.warnings,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitReport {
    pub n: usize,
    pub rank: usize,
    pub orbit_dimension: usize,
    pub min_orbit_dimension: usize,
    pub is_minimal: bool,
    /// `pair_span[l-1][m-1] = dim <T_l, T_m>`; the diagonal holds `dim <T_l>`.
    pub pair_span: Vec<Vec<usize>>,
    /// `lone_span[j-1] = dim <T_j, -iψ>`.
    pub lone_span: Vec<usize>,
    /// Present when the state is minimal and its pairing is consistent.
    pub pairing: Option<SingletPairing>,
    pub diagnostics: Diagnostics,
}

impl OrbitReport {
    pub fn singlet_pairs(&self) -> BTreeSet<(usize, usize)> {
        pairs_from_spans(&self.pair_span)
    }

    pub fn unentangled(&self) -> BTreeSet<usize> {
        unentangled_from_spans(&self.lone_span)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "rank": self.rank,
            "orbit_dimension": self.orbit_dimension,
            "min_orbit_dimension": self.min_orbit_dimension,
            "is_minimal": self.is_minimal,
            "pair_span": self.pair_span,
            "lone_span": self.lone_span,
            "pairing": self.pairing.as_ref().map(SingletPairing::to_json),
            "diagnostics": self.diagnostics.to_json(),
        })
    }
}

fn pairs_from_spans(pair_span: &[Vec<usize>]) -> BTreeSet<(usize, usize)> {
    let n = pair_span.len();
    (1..=n)
        .flat_map(|l| (l + 1..=n).map(move |m| (l, m)))
        .filter(|&(l, m)| pair_span[l - 1][m - 1] == 3)
        .collect()
}

fn unentangled_from_spans(lone_span: &[usize]) -> BTreeSet<usize> {
    (1..=lone_span.len()).filter(|&j| lone_span[j - 1] == 3).collect()
}

fn full_rank(m: &SideMatrix, opts: &RankOptions) -> Result<RankResult> {
    real_rank(m, &ColumnSelector::all(m.n()), opts)
}

/// Pair table, lone table, and every labelled verdict behind them.
type SpanTables = (Vec<Vec<usize>>, Vec<usize>, Vec<(String, RankResult)>);

/// Span tables: `dim <T_l, T_m>` for all pairs and `dim <T_j, -iψ>`.
fn span_tables(m: &SideMatrix, opts: &RankOptions) -> Result<SpanTables> {
    let n = m.n();
    let mut queries: Vec<(usize, usize)> = (1..=n).flat_map(|l| (l + 1..=n).map(move |r| (l, r))).collect();
    // (j, 0) encodes the lone query for qubit j
    queries.extend((1..=n).map(|j| (j, 0)));
    let results: Vec<RankResult> = queries
        .par_iter()
        .map(|&(l, r)| {
            let sel = if r == 0 {
                ColumnSelector::new([l], true)
            } else {
                ColumnSelector::new([l, r], false)
            };
            real_rank(m, &sel, opts)
        })
        .collect::<Result<_>>()?;
    let mut pair_span = vec![vec![3; n]; n];
    let mut lone_span = vec![0; n];
    let mut verdicts = Vec::with_capacity(queries.len());
    for (&(l, r), res) in queries.iter().zip(results) {
        if r == 0 {
            lone_span[l - 1] = res.rank;
            verdicts.push((format!("T_{l} with -i psi"), res));
        } else {
            pair_span[l - 1][r - 1] = res.rank;
            pair_span[r - 1][l - 1] = res.rank;
            verdicts.push((format!("T_{l}, T_{r}"), res));
        }
    }
    Ok((pair_span, lone_span, verdicts))
}

/// Pairing read off the span tables of a minimal state, plus whether the
/// unentangled-qubit detector independently confirms the lone qubit.
fn pairing_from_spans(n: usize, pair_span: &[Vec<usize>], lone_span: &[usize]) -> Result<(SingletPairing, bool)> {
    let pairs = pairs_from_spans(pair_span);
    let mut owner = vec![None; n + 1];
    for &(l, m) in &pairs {
        for q in [l, m] {
            if let Some((a, b)) = owner[q].replace((l, m)) {
                return Err(Error::InconsistentStructure(format!(
                    "qubit {q} appears in detected pairs ({a}, {b}) and ({l}, {m})"
                )));
            }
        }
    }
    let uncovered: Vec<usize> = (1..=n).filter(|&q| owner[q].is_none()).collect();
    if uncovered.len() != n % 2 {
        return Err(Error::InconsistentStructure(format!(
            "detected pairs {pairs:?} leave qubits {uncovered:?} uncovered"
        )));
    }
    let lone = uncovered.first().copied();
    let confirmed = unentangled_from_spans(lone_span) == lone.into_iter().collect();
    let pairing = SingletPairing::new(n, pairs, lone).map_err(|e| Error::InconsistentStructure(e.to_string()))?;
    Ok((pairing, confirmed))
}

/// Full report: rank, orbit dimension, minimality, span tables, pairing.
pub fn analyze(psi: &StateVector, opts: &RankOptions) -> Result<OrbitReport> {
    let n = psi.n();
    let m = side_matrix(psi)?;
    let full = full_rank(&m, opts)?;
    let mut diagnostics = Diagnostics::new(opts, &full);
    let (pair_span, lone_span, verdicts) = span_tables(&m, opts)?;
    for (what, r) in &verdicts {
        diagnostics.record(what, r);
    }
    let min = min_orbit_dimension(n)?;
    let orbit_dimension = full.rank.saturating_sub(1);
    let is_minimal = orbit_dimension == min;
    let pairing = if is_minimal {
        match pairing_from_spans(n, &pair_span, &lone_span) {
            Ok((p, confirmed)) => {
                if !confirmed {
                    diagnostics
                        .warnings
                        .push("unentangled-qubit detection disagrees with the lone qubit from pair coverage".into());
                }
                Some(p)
            }
            Err(e) => {
                diagnostics.warnings.push(e.to_string());
                None
            }
        }
    } else {
        None
    };
    Ok(OrbitReport {
        n,
        rank: full.rank,
        orbit_dimension,
        min_orbit_dimension: min,
        is_minimal,
        pair_span,
        lone_span,
        pairing,
        diagnostics,
    })
}

/// `rank_R(M) - 1`.
pub fn orbit_dimension(psi: &StateVector, opts: &RankOptions) -> Result<usize> {
    Ok(full_rank(&side_matrix(psi)?, opts)?.rank.saturating_sub(1))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinimalityVerdict {
    pub is_minimal: bool,
    pub orbit_dimension: usize,
    pub min_orbit_dimension: usize,
    pub rank: RankResult,
}

pub fn is_minimum_orbit(psi: &StateVector, opts: &RankOptions) -> Result<MinimalityVerdict> {
    let rank = full_rank(&side_matrix(psi)?, opts)?;
    let min = min_orbit_dimension(psi.n())?;
    let orbit_dimension = rank.rank.saturating_sub(1);
    Ok(MinimalityVerdict {
        is_minimal: orbit_dimension == min,
        orbit_dimension,
        min_orbit_dimension: min,
        rank,
    })
}

/// Pairs `(l, m)`, `l < m`, whose triples span exactly three dimensions.
pub fn detect_singlet_pairs(psi: &StateVector, opts: &RankOptions) -> Result<BTreeSet<(usize, usize)>> {
    let (pair_span, _, _) = span_tables(&side_matrix(psi)?, opts)?;
    Ok(pairs_from_spans(&pair_span))
}

/// Qubits `j` with `dim <T_j, -iψ> = 3`.
pub fn detect_unentangled(psi: &StateVector, opts: &RankOptions) -> Result<BTreeSet<usize>> {
    let (_, lone_span, _) = span_tables(&side_matrix(psi)?, opts)?;
    Ok(unentangled_from_spans(&lone_span))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Classification {
    Minimal {
        pairing: SingletPairing,
        /// The unentangled-qubit detector agrees with the lone qubit implied
        /// by pair coverage (no unentangled qubits for even `n`).
        lone_confirmed: bool,
    },
    NotMinimal {
        orbit_dimension: usize,
        min_orbit_dimension: usize,
    },
}

impl Classification {
    pub fn pairing(&self) -> Option<&SingletPairing> {
        match self {
            Classification::Minimal { pairing, .. } => Some(pairing),
            Classification::NotMinimal { .. } => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Classification::Minimal { pairing, .. } => pairing.to_json(),
            Classification::NotMinimal { orbit_dimension, .. } => {
                json!({ "not_minimal": true, "orbit_dimension": orbit_dimension })
            }
        }
    }
}

/// Singlet pairing of a minimum-orbit state, or `NotMinimal`.
///
/// Fails with `InconsistentStructure` when the state is minimal but the
/// detected pairs overlap or do not cover the qubits; that can only come
/// from a tolerance failure.
pub fn classify_min_orbit(psi: &StateVector, opts: &RankOptions) -> Result<Classification> {
    let m = side_matrix(psi)?;
    let full = full_rank(&m, opts)?;
    let min = min_orbit_dimension(psi.n())?;
    let orbit_dimension = full.rank.saturating_sub(1);
    if orbit_dimension != min {
        return Ok(Classification::NotMinimal {
            orbit_dimension,
            min_orbit_dimension: min,
        });
    }
    let (pair_span, lone_span, _) = span_tables(&m, opts)?;
    let (pairing, lone_confirmed) = pairing_from_spans(psi.n(), &pair_span, &lone_span)?;
    Ok(Classification::Minimal {
        pairing,
        lone_confirmed,
    })
}

/// One tensor factor of a state, living on the listed global qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    pub qubits: Vec<usize>,
    pub state: StateVector,
}

/// Fidelity below `1 - FACTOR_TOL` means a contraction did not split off an
/// exact pair-state factor.
const FACTOR_TOL: f64 = 1e-10;

/// Split a minimum-orbit state in canonical product form into its pair
/// factors (and the lone qubit for odd `n`).
///
/// Each round detects a singlet pair, contracts it with `(|00> + |11>)/√2`
/// and checks that re-tensoring reproduces the current state. States that
/// are only LU-equivalent to a canonical product fail with
/// `NonCanonicalFactor`; classify those with [`classify_min_orbit`].
pub fn factor_state(psi: &StateVector, opts: &RankOptions) -> Result<Vec<Factor>> {
    if let Classification::NotMinimal {
        orbit_dimension,
        min_orbit_dimension,
    } = classify_min_orbit(psi, opts)?
    {
        return Err(Error::NotMinimal {
            orbit_dimension,
            minimum: min_orbit_dimension,
        });
    }
    let pair = pair_state(psi.mode());
    let mut labels: Vec<usize> = (1..=psi.n()).collect();
    let mut current = psi.clone();
    let mut factors = Vec::new();
    while current.n() >= 3 {
        let detected = detect_singlet_pairs(&current, opts)?;
        let &(l, m) = detected
            .iter()
            .next()
            .ok_or_else(|| Error::InconsistentStructure(format!("no singlet pair among qubits {labels:?}")))?;
        let (gl, gm) = (labels[l - 1], labels[m - 1]);
        let residual = contract_pair(&current, l, m).map_err(|e| match e {
            Error::ZeroResidual(..) => Error::NonCanonicalFactor(gl, gm),
            other => other,
        })?;
        let rest: Vec<usize> = (1..=current.n()).filter(|&q| q != l && q != m).collect();
        let rebuilt = compose(current.n(), &[(vec![l, m], &pair), (rest.clone(), &residual)])?;
        if fidelity(&rebuilt, &current)? < 1.0 - FACTOR_TOL {
            return Err(Error::NonCanonicalFactor(gl, gm));
        }
        factors.push(Factor {
            qubits: vec![gl, gm],
            state: pair.clone(),
        });
        labels = rest.iter().map(|&q| labels[q - 1]).collect();
        current = residual;
    }
    if current.n() == 2 {
        if fidelity(&current, &pair)? < 1.0 - FACTOR_TOL {
            return Err(Error::NonCanonicalFactor(labels[0], labels[1]));
        }
        factors.push(Factor {
            qubits: labels,
            state: pair,
        });
    } else {
        factors.push(Factor {
            qubits: labels,
            state: current,
        });
    }
    Ok(factors)
}

/// Tensor the factors back together on `n` qubits.
pub fn recompose(n: usize, factors: &[Factor]) -> Result<StateVector> {
    let parts: Vec<(Vec<usize>, &StateVector)> = factors.iter().map(|f| (f.qubits.clone(), &f.state)).collect();
    compose(n, &parts)
}
