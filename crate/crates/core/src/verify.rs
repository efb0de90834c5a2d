//! Property suites over generated instances.
//!
//! Each suite runs `trials` independent instances, trial `t` drawing from its
//! own stream of the suite seed, so reports are reproducible and independent
//! of thread scheduling. Violations carry a dump of the offending state.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::json::state_to_json;
use crate::lie_action::{exact_dot, real_view, side_matrix, Generator, RealView, SideMatrix};
use crate::lu_group::{adjoint_rep, apply_integer_quaternions, apply_local, apply_local_raw, LocalUnitary};
use crate::orbit_analysis::{
    classify_min_orbit, min_orbit_dimension, orbit_dimension, pairing_equal, subset_span_lower_bound, Classification,
    SingletPairing,
};
use crate::rank_engine::{
    complement_basis, complement_dim, float_rank, real_rank, span_dim, Backend, ColumnSelector, RankOptions,
};
use crate::rng::{self, Rng};
use crate::state_core::{
    compose, gaussian_int, ghz_state, pair_state, random_gaussian_integer_state, random_state_with,
    schmidt_coefficients, singlet_product, tensor, w_state, Amplitudes, Mode, StateVector,
};

/// Entry bound for random Gaussian-integer states.
const EXACT_BOUND: i64 = 3;
/// Orthogonality and column-identity tolerance for unit-norm float states.
const COLUMN_TOL: f64 = 1e-12;
/// Schmidt coefficients below this count as zero; within it of `1/√2` as
/// maximally entangled.
const SCHMIDT_TOL: f64 = 1e-7;
/// Above this many qubits, subset suites sample rather than enumerate.
const ENUMERATE_SUBSETS_UP_TO: usize = 6;
const SAMPLED_SUBSETS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    TripleOrthogonality,
    LuInvariance,
    CanonicalPairColumns,
    DeficientPairOrthogonality,
    FiveSpanIndependence,
    SubsetLowerBound,
    RankAdditivity,
    PairFactorization,
    LoneQubitFactorization,
    UnentangledSpan,
    PairSpanTrichotomy,
    ClassificationRoundTrip,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::TripleOrthogonality,
        Suite::LuInvariance,
        Suite::CanonicalPairColumns,
        Suite::DeficientPairOrthogonality,
        Suite::FiveSpanIndependence,
        Suite::SubsetLowerBound,
        Suite::RankAdditivity,
        Suite::PairFactorization,
        Suite::LoneQubitFactorization,
        Suite::UnentangledSpan,
        Suite::PairSpanTrichotomy,
        Suite::ClassificationRoundTrip,
    ];

    /// Registered command-line name.
    pub fn id(self) -> &'static str {
        match self {
            Suite::TripleOrthogonality => "triplesprop",
            Suite::LuInvariance => "ranktripluinv",
            Suite::CanonicalPairColumns => "twocommonstrong",
            Suite::DeficientPairOrthogonality => "twocommonstronggen",
            Suite::FiveSpanIndependence => "twotripspan5",
            Suite::SubsetLowerBound => "minrankMstrong",
            Suite::RankAdditivity => "bipartiteranksadd",
            Suite::PairFactorization => "twotripspan3factors",
            Suite::LoneQubitFactorization => "trippluslonelyspan3",
            Suite::UnentangledSpan => "unentrank",
            Suite::PairSpanTrichotomy => "pair_span_trichotomy",
            Suite::ClassificationRoundTrip => "minorbclassthm_roundtrip",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Suite::TripleOrthogonality => "the three columns of each triple are mutually orthogonal",
            Suite::LuInvariance => {
                "span dimensions of triple unions are LU invariant; triples rotate by the adjoint map"
            }
            Suite::CanonicalPairColumns => {
                "canonical pair factors give B_l = -B_l', span 3, and orthogonality to all other columns"
            }
            Suite::DeficientPairOrthogonality => {
                "pairs spanning at most 4 span 3 and are orthogonal to all other columns"
            }
            Suite::FiveSpanIndependence => {
                "pairs spanning 5 leave two independent directions per triple orthogonal to the rest"
            }
            Suite::SubsetLowerBound => "every union of q triples with -i psi spans at least the minimum-rank bound",
            Suite::RankAdditivity => "orbit dimensions add under tensor products",
            Suite::PairFactorization => "pair span 3 iff the pair carries a maximally entangled factor",
            Suite::LoneQubitFactorization => "triple plus -i psi spans 3 iff the qubit is unentangled",
            Suite::UnentangledSpan => "k unentangled qubits: their triples with -i psi span 2k+1",
            Suite::PairSpanTrichotomy => "every pair of triples spans 3, 5 or 6 dimensions",
            Suite::ClassificationRoundTrip => "classification of scrambled singlet products recovers the pairing",
        }
    }

    fn min_qubits(self) -> usize {
        match self {
            Suite::CanonicalPairColumns | Suite::RankAdditivity => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.id() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub trial: usize,
    pub message: String,
    pub state: Value,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    /// Individual assertions evaluated across all trials.
    pub checks: usize,
    pub failures: Vec<Failure>,
    /// Set when the suite does not apply at this qubit count.
    pub skipped: Option<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite.id(),
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "checks": self.checks,
            "passed": self.passed(),
            "skipped": self.skipped,
            "failures": self.failures.iter().map(|f| json!({
                "trial": f.trial,
                "message": f.message,
                "state": f.state,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Outcome of one trial: assertions made and messages for those that failed.
#[derive(Default)]
struct Trial {
    checks: usize,
    failures: Vec<String>,
    dump: Option<Value>,
}

impl Trial {
    fn check(&mut self, ok: bool, message: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(message());
        }
    }

    fn subject(&mut self, psi: &StateVector) {
        self.dump = Some(state_to_json(psi));
    }
}

/// Run `suite` on `trials` instances of `n` qubits.
///
/// Instances are exact Gaussian-rational states when `opts.backend` is
/// exact and floating Haar-based states otherwise.
pub fn verify_proposition(suite: Suite, n: usize, trials: usize, seed: u64, opts: &RankOptions) -> Result<SuiteReport> {
    if n == 0 || n >= 16 {
        return Err(Error::QubitCount(n));
    }
    let mut report = SuiteReport {
        suite,
        n,
        trials,
        seed,
        checks: 0,
        failures: Vec::new(),
        skipped: None,
    };
    if n < suite.min_qubits() {
        report.skipped = Some(format!("needs at least {} qubits", suite.min_qubits()));
        return Ok(report);
    }
    let suite_seed = rng::derive_seed(seed, suite as u64);
    let outcomes: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng::seeded(suite_seed, t as u64);
            run_trial(suite, n, &mut rng, opts)
        })
        .collect::<Result<_>>()?;
    for (t, outcome) in outcomes.into_iter().enumerate() {
        report.checks += outcome.checks;
        let state = outcome.dump.unwrap_or(Value::Null);
        report
            .failures
            .extend(outcome.failures.into_iter().map(|message| Failure {
                trial: t,
                message,
                state: state.clone(),
            }));
    }
    Ok(report)
}

/// Run every registered suite.
pub fn verify_all(n: usize, trials: usize, seed: u64, opts: &RankOptions) -> Result<Vec<SuiteReport>> {
    Suite::ALL
        .iter()
        .map(|&s| verify_proposition(s, n, trials, seed, opts))
        .collect()
}

fn instance_mode(opts: &RankOptions) -> Mode {
    match opts.backend {
        Backend::Float => Mode::Float,
        Backend::Exact => Mode::Exact,
    }
}

fn run_trial(suite: Suite, n: usize, rng: &mut Rng, opts: &RankOptions) -> Result<Trial> {
    let mode = instance_mode(opts);
    let mut trial = Trial::default();
    match suite {
        Suite::TripleOrthogonality => triple_orthogonality(&mut trial, n, mode, rng, opts)?,
        Suite::LuInvariance => lu_invariance(&mut trial, n, mode, rng, opts)?,
        Suite::CanonicalPairColumns => canonical_pair_columns(&mut trial, n, mode, rng, opts)?,
        Suite::DeficientPairOrthogonality => deficient_pair_orthogonality(&mut trial, n, mode, rng, opts)?,
        Suite::FiveSpanIndependence => five_span_independence(&mut trial, n, mode, rng, opts)?,
        Suite::SubsetLowerBound => subset_lower_bound(&mut trial, n, mode, rng, opts)?,
        Suite::RankAdditivity => rank_additivity(&mut trial, n, mode, rng, opts)?,
        Suite::PairFactorization => pair_factorization(&mut trial, n, mode, rng, opts)?,
        Suite::LoneQubitFactorization => lone_qubit_factorization(&mut trial, n, mode, rng, opts)?,
        Suite::UnentangledSpan => unentangled_span(&mut trial, n, mode, rng, opts)?,
        Suite::PairSpanTrichotomy => pair_span_trichotomy(&mut trial, n, mode, rng, opts)?,
        Suite::ClassificationRoundTrip => classification_round_trip(&mut trial, n, mode, rng, opts)?,
    }
    Ok(trial)
}

// ---- instance generation ----

/// Random state of `n` qubits: Haar-based in float mode, small Gaussian
/// integers in exact mode.
pub fn random_instance(n: usize, mode: Mode, rng: &mut Rng) -> Result<StateVector> {
    match mode {
        Mode::Float => random_state_with(n, rng),
        Mode::Exact => random_gaussian_integer_state(n, EXACT_BOUND, rng),
    }
}

/// Random local unitary applied to `psi`. Exact states are scrambled by
/// integer-quaternion frames, which stay exact and act as a local unitary
/// up to a positive scale.
pub fn scramble(psi: &StateVector, rng: &mut Rng) -> Result<StateVector> {
    match psi.mode() {
        Mode::Float => apply_local(psi, &LocalUnitary::random_with(psi.n(), rng)),
        Mode::Exact => {
            let quaternions: Vec<[i64; 4]> = (0..psi.n())
                .map(|_| loop {
                    let q: [i64; 4] = std::array::from_fn(|_| rng.random_range(-3..=3));
                    if q.iter().any(|&x| x != 0) {
                        break q;
                    }
                })
                .collect();
            apply_integer_quaternions(psi, &quaternions)
        }
    }
}

/// `a|00> + b|11>` with `a ≠ b`: entangled but not maximally.
fn lopsided_pair(mode: Mode, rng: &mut Rng) -> Result<StateVector> {
    match mode {
        Mode::Float => {
            let a: f64 = rng.random_range(0.2..0.65);
            let b = (1.0 - a * a).sqrt();
            let z = num_complex::Complex64::new(0.0, 0.0);
            StateVector::from_float(vec![
                num_complex::Complex64::new(a, 0.0),
                z,
                z,
                num_complex::Complex64::new(b, 0.0),
            ])
        }
        Mode::Exact => {
            let a = rng.random_range(1..=4);
            let b = loop {
                let b = rng.random_range(1..=4);
                if b != a {
                    break b;
                }
            };
            let zero = gaussian_int(0, 0);
            StateVector::from_exact(vec![gaussian_int(a, 0), zero.clone(), zero, gaussian_int(b, 0)])
        }
    }
}

fn block_state(size: usize, mode: Mode, rng: &mut Rng) -> Result<StateVector> {
    match (size, rng.random_range(0..3)) {
        (2, 0) => Ok(pair_state(mode)),
        (2, 1) => lopsided_pair(mode, rng),
        (3, 0) => ghz_state(3, mode),
        (3, 1) => w_state(3, mode),
        _ => random_instance(size, mode, rng),
    }
}

/// Product of random blocks of one to three qubits on shuffled positions.
fn random_block_product(n: usize, mode: Mode, rng: &mut Rng) -> Result<StateVector> {
    let mut qubits: Vec<usize> = (1..=n).collect();
    qubits.shuffle(rng);
    let mut blocks = Vec::new();
    let mut rest = qubits.as_slice();
    while !rest.is_empty() {
        let size = rng.random_range(1..=rest.len().min(3));
        let (block, tail) = rest.split_at(size);
        blocks.push((block.to_vec(), block_state(size, mode, rng)?));
        rest = tail;
    }
    let parts: Vec<(Vec<usize>, &StateVector)> = blocks.iter().map(|(q, s)| (q.clone(), s)).collect();
    compose(n, &parts)
}

/// Mixed instance distribution: generic states, singlet products, and
/// products of small blocks (pairs, lopsided pairs, GHZ, W, single qubits),
/// each scrambled by a random local unitary half of the time.
pub fn structured_instance(n: usize, mode: Mode, rng: &mut Rng) -> Result<StateVector> {
    let psi = match rng.random_range(0..4) {
        0 => random_instance(n, mode, rng)?,
        1 => singlet_product(&SingletPairing::random(n, rng)?, mode)?,
        _ => random_block_product(n, mode, rng)?,
    };
    if rng.random_bool(0.5) {
        scramble(&psi, rng)
    } else {
        Ok(psi)
    }
}

// ---- helpers ----

fn triple_union(n: usize, mask: u64) -> Vec<usize> {
    (1..=n).filter(|&k| mask & (1 << (k - 1)) != 0).collect()
}

/// Nonempty triple subsets as bitmasks: all of them for small `n`, a random
/// sample otherwise.
fn triple_subsets(n: usize, rng: &mut Rng) -> Vec<u64> {
    if n <= ENUMERATE_SUBSETS_UP_TO {
        (1..1u64 << n).collect()
    } else {
        (0..SAMPLED_SUBSETS).map(|_| rng.random_range(1..1u64 << n)).collect()
    }
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=n).flat_map(move |l| (l + 1..=n).map(move |m| (l, m)))
}

fn view_of(m: &SideMatrix, indices: &[usize]) -> Result<RealView> {
    let cols: Vec<&Amplitudes> = indices.iter().map(|&j| m.column(j)).collect();
    real_view(&cols)
}

fn orthogonal(view: &RealView, i: usize, j: usize) -> bool {
    match view {
        RealView::Float(_) => view.dot(i, j).abs() <= COLUMN_TOL,
        RealView::Exact(cols) => num_traits::Zero::is_zero(&exact_dot(&cols[i], &cols[j])),
    }
}

/// `a == sign · b`, exactly or within the column tolerance.
fn columns_match(a: &Amplitudes, b: &Amplitudes, sign: i64) -> bool {
    match (a, b) {
        (Amplitudes::Float(x), Amplitudes::Float(y)) => {
            x.iter().zip(y).all(|(p, q)| (p - q * sign as f64).norm() <= COLUMN_TOL)
        }
        (Amplitudes::Exact(x), Amplitudes::Exact(y)) => {
            let s = gaussian_int(sign, 0);
            x.iter().zip(y).all(|(p, q)| *p == q.clone() * s.clone())
        }
        _ => false,
    }
}

/// Columns of `M` outside the triples of `exclude`, plus `-iψ`.
fn others_with_last(n: usize, exclude: &[usize]) -> ColumnSelector {
    ColumnSelector::new((1..=n).filter(|k| !exclude.contains(k)), true)
}

fn is_unentangled(psi: &StateVector, j: usize) -> Result<bool> {
    Ok(schmidt_coefficients(psi, &[j])?.get(1).is_none_or(|&s| s < SCHMIDT_TOL))
}

/// Qubits `l, m` carry a maximally entangled pure factor.
fn carries_singlet(psi: &StateVector, l: usize, m: usize) -> Result<bool> {
    let product = schmidt_coefficients(psi, &[l, m])?
        .get(1)
        .is_none_or(|&s| s < SCHMIDT_TOL);
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let maximal = schmidt_coefficients(psi, &[l])?
        .iter()
        .all(|&s| (s - half).abs() < SCHMIDT_TOL);
    Ok(product && maximal)
}

// ---- suites ----

fn triple_orthogonality(t: &mut Trial, n: usize, mode: Mode, rng: &mut Rng, opts: &RankOptions) -> Result<()> {
    let psi = structured_instance(n, mode, rng)?;
    t.subject(&psi);
    let m = side_matrix(&psi)?;
    for k in 1..=n {
        let view = view_of(&m, &m.triple_indices(k)?)?;
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            t.check(orthogonal(&view, i, j), || {
                format!(
                    "triple {k}: columns {i} and {j} not orthogonal (dot {:e})",
                    view.dot(i, j)
                )
            });
        }
        let d = span_dim(&m, [k], false, opts)?;
        t.check(d == 3, || format!("triple {k} spans {d}, expected 3"));
    }
    Ok(())
}

fn lu_invariance(t: &mut Trial, n: usize, mode: Mode, rng: &mut Rng, opts: &RankOptions) -> Result<()> {
    let psi = structured_instance(n, mode, rng)?;
    t.subject(&psi);
    let (moved, u) = match mode {
        Mode::Float => {
            let u = LocalUnitary::random_with(n, rng);
            (apply_local(&psi, &u)?, Some(u))
        }
        Mode::Exact => (scramble(&psi, rng)?, None),
    };
    let m = side_matrix(&psi)?;
    let m2 = side_matrix(&moved)?;
    for mask in triple_subsets(n, rng) {
        let triples = triple_union(n, mask);
        for last in [false, true] {
            let a = span_dim(&m, triples.iter().copied(), last, opts)?;
            let b = span_dim(&m2, triples.iter().copied(), last, opts)?;
            t.check(a == b, || {
                format!("span of triples {triples:?} (last: {last}) changed from {a} to {b} under LU")
            });
        }
    }
    // T_k(Uψ) = U · (T_k(ψ) rotated by Ad(U_k))
    if let Some(u) = u {
        for k in 1..=n {
            let r = adjoint_rep(u.factor(k)?)?;
            for (j, _) in Generator::ALL.iter().enumerate() {
                let target = m2.column(m2.triple_indices(k)?[j]).to_f64();
                let mut mix = vec![num_complex::Complex64::new(0.0, 0.0); psi.dim()];
                for (i, &col) in m.triple_indices(k)?.iter().enumerate() {
                    for (acc, z) in mix.iter_mut().zip(m.column(col).to_f64()) {
                        *acc += z * r[(i, j)];
                    }
                }
                let rebuilt = apply_local_raw(&mix, &u)?;
                let err = rebuilt
                    .iter()
                    .zip(&target)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                t.check(err <= 1e-10, || {
                    format!("triple {k}, generator {j}: rotated reconstruction off by {err:e}")
                });
            }
        }
    }
    Ok(())
}

fn canonical_pair_columns(t: &mut Trial, n: usize, mode: Mode, rng: &mut Rng, opts: &RankOptions) -> Result<()> {
    let mut order: Vec<usize> = (1..=n).collect();
    order.shuffle(rng);
    let (l, lp) = (order[0].min(order[1]), order[0].max(order[1]));
    let rest: Vec<usize> = (1..=n).filter(|&q| q != l && q != lp).collect();
    let pair = pair_state(mode);
    let psi = if rest.is_empty() {
        pair
    } else {
        let phi = structured_instance(rest.len(), mode, rng)?;
        compose(n, &[(vec![l, lp], &pair), (rest.clone(), &phi)])?
    };
    t.subject(&psi);
    let m = side_matrix(&psi)?;
    let [al, bl, cl] = m.triple(l)?;
    let [alp, blp, clp] = m.triple(lp)?;
    t.check(columns_match(al, alp, 1), || {
        format!("A_{l} ψ ≠ A_{lp} ψ on a canonical pair")
    });
    t.check(columns_match(cl, clp, 1), || {
        format!("C_{l} ψ ≠ C_{lp} ψ on a canonical pair")
    });
    t.check(columns_match(bl, blp, -1), || format!("B_{l} ψ ≠ -B_{lp} ψ"));
    let d = span_dim(&m, [l, lp], false, opts)?;
    t.check(d == 3, || format!("pair ({l}, {lp}) spans {d}, expected 3"));

    let inside: Vec<usize> = [m.triple_indices(l)?, m.triple_indices(lp)?].concat();
    let outside: Vec<usize> = rest
        .iter()
        .map(|&k| m.triple_indices(k))
        .collect::<Result<Vec<_>>>()?
        .concat()
        .into_iter()
        .chain([m.last_index()])
        .collect();
    let all: Vec<usize> = inside.iter().chain(&outside).copied().collect();
    let view = view_of(&m, &all)?;
    for i in 0..inside.len() {
        for j in inside.len()..all.len() {
            t.check(orthogonal(&view, i, j), || {
                format!("column {} of the pair is not orthogonal to column {}", all[i], all[j])
            });
        }
    }
    Ok(())
}

fn deficient_pair_orthogonality(t: &mut Trial, n: usize, mode: Mode, rng: &mut Rng, opts: &RankOptions) -> Result<()> {
    let psi = structured_instance(n, mode, rng)?;
    t.subject(&psi);
    let m = side_matrix(&psi)?;
    for (l, lp) in pairs(n) {
        let d = span_dim(&m, [l, lp], false, opts)?;
        if d > 4 {
            continue;
        }
        t.check(d == 3, || format!("pair ({l}, {lp}) spans {d}; at most 4 forces 3"));
        let against = others_with_last(n, &[l, lp]);
        for k in [l, lp] {
            let c = complement_dim(&m, k, &against, opts)?;
            t.check(c == 3, || {
                format!("pair ({l}, {lp}) spans {d} but only {c} directions of T_{k} are orthogonal to the rest")
            });
        }
    }
    Ok(())
}

fn five_span_independence(t: &mut Trial, n: usize, mode: Mode, rng: &mut Rng, opts: &RankOptions) -> Result<()> {
    let psi = structured_instance(n, mode, rng)?;
    t.subject(&psi);
    let m = side_matrix(&psi)?;
    let mf = side_matrix(&psi.to_float())?;
    for (l, lp) in pairs(n) {
        if span_dim(&m, [l, lp], false, opts)? != 5 {
            continue;
        }
        let against = others_with_last(n, &[l, lp]);
        for k in [l, lp] {
            let c = complement_dim(&m, k, &against, opts)?;
            t.check(c >= 2, || {
                format!("pair ({l}, {lp}) spans 5 but T_{k} has only {c} directions orthogonal to the rest")
            });
        }
        let vectors: Vec<_> = [l, lp]
            .into_iter()
            .map(|k| complement_basis(&mf, k, &against, opts.tol))
            .collect::<Result<Vec<_>>>()?
            .concat();
        let stacked = nalgebra::DMatrix::from_columns(&vectors);
        let r = if vectors.is_empty() {
            0
        } else {
            float_rank(&stacked, opts.tol).rank
        };
        t.check(r >= 4, || {
            format!("pair ({l}, {lp}): orthogonal directions span {r}, expected at least 4")
        });
    }
    Ok(())
}

fn subset_lower_bound(t: &mut Trial, n: usize, mode: Mode, rng: &mut Rng, opts: &RankOptions) -> Result<()> {
    let psi = structured_instance(n, mode, rng)?;
    t.subject(&psi);
    let m = side_matrix(&psi)?;
    for mask in triple_subsets(n, rng) {
        let triples = triple_union(n, mask);
        let q = triples.len();
        let d = span_dim(&m, triples.iter().copied(), true, opts)?;
        let bound = subset_span_lower_bound(q);
        t.check(d >= bound, || {
            format!("triples {triples:?} with -iψ span {d} < {bound}")
        });
    }
    let dim = real_rank(&m, &ColumnSelector::all(n), opts)?.rank - 1;
    let min = min_orbit_dimension(n)?;
    t.check(min <= dim && dim <= 3 * n, || {
        format!("orbit dimension {dim} outside [{min}, {}]", 3 * n)
    });
    Ok(())
}

fn rank_additivity(t: &mut Trial, n: usize, mode: Mode, rng: &mut Rng, opts: &RankOptions) -> Result<()> {
    let n1 = rng.random_range(1..n);
    let a = structured_instance(n1, mode, rng)?;
    let b = structured_instance(n - n1, mode, rng)?;
    let psi = tensor(&a, &b)?;
    t.subject(&psi);
    let (da, db, d) = (
        orbit_dimension(&a, opts)?,
        orbit_dimension(&b, opts)?,
        orbit_dimension(&psi, opts)?,
    );
    t.check(d == da + db, || {
        format!(
            "orbit dimension {d} of the product ≠ {da} + {db} ({n1} + {} qubits)",
            n - n1
        )
    });
    Ok(())
}

fn pair_factorization(t: &mut Trial, n: usize, mode: Mode, rng: &mut Rng, opts: &RankOptions) -> Result<()> {
    let psi = structured_instance(n, mode, rng)?;
    t.subject(&psi);
    let m = side_matrix(&psi)?;
    let float = psi.to_float();
    for (l, lp) in pairs(n) {
        let d = span_dim(&m, [l, lp], false, opts)?;
        let singlet = carries_singlet(&float, l, lp)?;
        t.check((d == 3) == singlet, || {
            format!("pair ({l}, {lp}) spans {d} but maximally entangled factor present: {singlet}")
        });
    }
    Ok(())
}

fn lone_qubit_factorization(t: &mut Trial, n: usize, mode: Mode, rng: &mut Rng, opts: &RankOptions) -> Result<()> {
    let psi = structured_instance(n, mode, rng)?;
    t.subject(&psi);
    let m = side_matrix(&psi)?;
    let float = psi.to_float();
    for j in 1..=n {
        let d = span_dim(&m, [j], true, opts)?;
        let free = is_unentangled(&float, j)?;
        t.check((d == 3) == free, || {
            format!("T_{j} with -iψ spans {d} but qubit unentangled: {free}")
        });
    }
    Ok(())
}

/// Random state on `n` qubits with no unentangled qubit.
fn entangled_block(n: usize, mode: Mode, rng: &mut Rng) -> Result<StateVector> {
    loop {
        let phi = random_instance(n, mode, rng)?;
        let float = phi.to_float();
        let mut clean = true;
        for j in 1..=n {
            if is_unentangled(&float, j)? {
                clean = false;
            }
        }
        if clean {
            return Ok(phi);
        }
    }
}

fn unentangled_span(t: &mut Trial, n: usize, mode: Mode, rng: &mut Rng, opts: &RankOptions) -> Result<()> {
    let mut k = rng.random_range(0..=n.min(4));
    // a single leftover qubit is itself unentangled
    if n - k == 1 {
        k = n;
    }
    let mut order: Vec<usize> = (1..=n).collect();
    order.shuffle(rng);
    let (free, rest) = order.split_at(k);
    let mut factors = Vec::new();
    for &q in free {
        factors.push((vec![q], random_instance(1, mode, rng)?));
    }
    if !rest.is_empty() {
        let mut rest = rest.to_vec();
        rest.sort_unstable();
        factors.push((rest.clone(), entangled_block(rest.len(), mode, rng)?));
    }
    let parts: Vec<(Vec<usize>, &StateVector)> = factors.iter().map(|(q, s)| (q.clone(), s)).collect();
    let psi = scramble(&compose(n, &parts)?, rng)?;
    t.subject(&psi);
    let m = side_matrix(&psi)?;
    let d = span_dim(&m, free.iter().copied(), true, opts)?;
    t.check(d == 2 * k + 1, || {
        format!("{k} unentangled qubits {free:?}: span {d}, expected {}", 2 * k + 1)
    });
    let expected: BTreeSet<usize> = free.iter().copied().collect();
    let detected: BTreeSet<usize> = (1..=n)
        .map(|j| Ok((j, span_dim(&m, [j], true, opts)? == 3)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter_map(|(j, hit)| hit.then_some(j))
        .collect();
    t.check(detected == expected, || {
        format!("detected unentangled {detected:?}, expected {expected:?}")
    });
    Ok(())
}

fn pair_span_trichotomy(t: &mut Trial, n: usize, mode: Mode, rng: &mut Rng, opts: &RankOptions) -> Result<()> {
    let psi = structured_instance(n, mode, rng)?;
    t.subject(&psi);
    let m = side_matrix(&psi)?;
    for (l, lp) in pairs(n) {
        let d = span_dim(&m, [l, lp], false, opts)?;
        t.check(matches!(d, 3 | 5 | 6), || {
            format!("pair ({l}, {lp}) spans {d}, not in {{3, 5, 6}}")
        });
    }
    Ok(())
}

fn classification_round_trip(t: &mut Trial, n: usize, mode: Mode, rng: &mut Rng, opts: &RankOptions) -> Result<()> {
    let pairing = SingletPairing::random(n, rng)?;
    let psi = scramble(&singlet_product(&pairing, mode)?, rng)?;
    t.subject(&psi);
    match classify_min_orbit(&psi, opts) {
        Ok(Classification::Minimal { pairing: found, .. }) => {
            let same = pairing_equal(&found, &pairing)?;
            t.check(same, || {
                format!("recovered {:?}, generated {:?}", found.pairs(), pairing.pairs())
            });
        }
        Ok(Classification::NotMinimal { orbit_dimension, .. }) => {
            t.check(false, || {
                format!("scrambled singlet product reported non-minimal (dimension {orbit_dimension})")
            });
        }
        Err(Error::InconsistentStructure(msg)) => t.check(false, || msg),
        Err(e) => return Err(e),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.id().parse::<Suite>().unwrap(), s);
        }
        assert!(matches!("nope".parse::<Suite>(), Err(Error::UnknownSuite(_))));
    }

    #[test]
    fn reports_are_deterministic() {
        let opts = RankOptions::default();
        let a = verify_proposition(Suite::PairSpanTrichotomy, 3, 8, 5, &opts).unwrap();
        let b = verify_proposition(Suite::PairSpanTrichotomy, 3, 8, 5, &opts).unwrap();
        assert_eq!(a, b);
        assert!(a.passed());
        assert!(a.checks >= 24);
    }

    #[test]
    fn small_suites_pass() {
        let opts = RankOptions::default();
        for s in Suite::ALL {
            for n in 1..=3 {
                let r = verify_proposition(s, n, 10, 11, &opts).unwrap();
                assert!(r.passed(), "{s} n={n}: {:?}", r.failures);
            }
        }
    }

    #[test]
    fn exact_suites_pass() {
        let opts = RankOptions::exact();
        for s in Suite::ALL {
            let r = verify_proposition(s, 3, 5, 2, &opts).unwrap();
            assert!(r.passed(), "{s}: {:?}", r.failures);
        }
    }

    #[test]
    fn rank_additivity_skips_one_qubit() {
        let r = verify_proposition(Suite::RankAdditivity, 1, 5, 0, &RankOptions::default()).unwrap();
        assert!(r.skipped.is_some());
        assert_eq!(r.checks, 0);
    }

    #[test]
    fn structured_instances_cover_all_pair_spans() {
        let opts = RankOptions::default();
        let mut rng = rng::seeded(3, 0);
        let mut seen = BTreeSet::new();
        for _ in 0..60 {
            let psi = structured_instance(4, Mode::Float, &mut rng).unwrap();
            let m = side_matrix(&psi).unwrap();
            for (l, lp) in pairs(4) {
                seen.insert(span_dim(&m, [l, lp], false, &opts).unwrap());
            }
        }
        assert_eq!(seen, [3, 5, 6].into());
    }
}
