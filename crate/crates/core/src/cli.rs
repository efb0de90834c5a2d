//! Command-line interface.
//!
//! Exit codes: 0 success, 1 analysis failure (zero state, inconsistent
//! structure, non-minimal input to `compare`, failing suites), 2 usage or
//! input errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::json::{amplitudes_to_json, state_from_str, state_to_json};
use crate::lie_action::side_matrix;
use crate::orbit_analysis::{analyze, classify_min_orbit, pairing_equal, Classification, SingletPairing};
use crate::rank_engine::{Backend, RankOptions, DEFAULT_TOL};
use crate::rng;
use crate::state_core::{
    basis_state, ghz_state, random_state, singlet_product, w_state, Mode, MultiIndex, StateVector,
};
use crate::verify::{scramble, verify_all, verify_proposition, Suite, SuiteReport};

#[derive(Parser, Debug)]
#[command(
    name = "lu-orbit",
    version,
    about = "Local-unitary orbit dimensions and singlet pairings of n-qubit states"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct RankArgs {
    /// Relative singular-value threshold.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Rank backend: float or exact (exact needs an exact-mode state).
    #[arg(long, default_value = "float")]
    backend: Backend,
}

impl RankArgs {
    fn options(&self) -> Result<RankOptions> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::Parse(format!("--tol must lie in (0, 1), got {}", self.tol)));
        }
        Ok(RankOptions {
            backend: self.backend,
            tol: self.tol,
        })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    SingletProduct,
    Ghz,
    W,
    Basis,
    Random,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Float,
    Exact,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Orbit dimension, span tables and pairing of a state file.
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        rank: RankArgs,
        /// Apply a random local unitary with this seed before analysis.
        #[arg(long)]
        lu_seed: Option<u64>,
        /// Print the columns of M (A_k, B_k, C_k for each qubit, then -i psi) instead of the report.
        #[arg(long)]
        matrix: bool,
    },
    /// Singlet pairing of a minimum-orbit state, or its orbit dimension.
    Classify {
        file: PathBuf,
        #[command(flatten)]
        rank: RankArgs,
        #[arg(long)]
        lu_seed: Option<u64>,
    },
    /// Write a state file.
    Generate {
        kind: Kind,
        #[arg(long)]
        qubits: Option<usize>,
        /// Pairs for singlet-product, e.g. `1:2,3:4`; random from --seed when omitted.
        #[arg(long)]
        pairs: Option<String>,
        /// Unpaired qubit for singlet-product with odd n.
        #[arg(long)]
        lone: Option<usize>,
        /// Bit string for basis, e.g. `0101` (qubit 1 first).
        #[arg(long)]
        index: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Scramble the generated state with a random local unitary.
        #[arg(long)]
        lu_seed: Option<u64>,
        /// Numeric mode; defaults to exact for basis and float otherwise.
        #[arg(long)]
        mode: Option<ModeArg>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run property suites on generated instances.
    Verify {
        /// Suite name or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 4)]
        qubits: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        rank: RankArgs,
        /// Print full JSON reports instead of summary lines.
        #[arg(long)]
        json: bool,
    },
    /// Whether two minimum-orbit states have the same singlet pairing.
    Compare {
        file_a: PathBuf,
        file_b: PathBuf,
        #[command(flatten)]
        rank: RankArgs,
    },
}

/// Failure category, mapped to an exit code.
enum Fail {
    Usage(String),
    Analysis(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::ZeroVector
            | Error::InconsistentStructure(_)
            | Error::NotMinimal { .. }
            | Error::NonCanonicalFactor(..)
            | Error::ZeroResidual(..) => Fail::Analysis(e.to_string()),
            _ => Fail::Usage(e.to_string()),
        }
    }
}

/// Run the CLI with `args` (including the program name) and return the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(err, "{e}");
                2
            } else {
                let _ = write!(out, "{e}");
                0
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(Fail::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Fail::Analysis(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn read_state(path: &Path) -> std::result::Result<StateVector, Fail> {
    let text = std::fs::read_to_string(path).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))?;
    state_from_str(&text).map_err(|e| match e {
        Error::ZeroVector => Fail::Analysis(format!("{}: {e}", path.display())),
        other => Fail::Usage(format!("{}: {other}", path.display())),
    })
}

fn maybe_scramble(psi: StateVector, lu_seed: Option<u64>) -> Result<StateVector> {
    match lu_seed {
        Some(seed) => scramble(&psi, &mut rng::seeded(seed, 1)),
        None => Ok(psi),
    }
}

fn emit(out: &mut dyn Write, v: &Value, pretty: bool) -> std::result::Result<(), Fail> {
    let text = if pretty {
        serde_json::to_string_pretty(v)
    } else {
        serde_json::to_string(v)
    }
    .expect("JSON values serialize");
    writeln!(out, "{text}").map_err(|e| Fail::Usage(e.to_string()))
}

fn parse_pairs(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let bad = || Error::Parse(format!("pair `{p}` is not of the form l:m"));
            let (a, b) = p.split_once(':').ok_or_else(bad)?;
            Ok((
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            ))
        })
        .collect()
}

fn need_qubits(qubits: Option<usize>, kind: &str) -> Result<usize> {
    qubits.ok_or_else(|| Error::Parse(format!("{kind} needs --qubits")))
}

#[allow(clippy::too_many_arguments)]
fn generate(
    kind: Kind,
    qubits: Option<usize>,
    pairs: Option<String>,
    lone: Option<usize>,
    index: Option<String>,
    seed: u64,
    mode: Option<ModeArg>,
) -> Result<StateVector> {
    let mode = match mode {
        Some(ModeArg::Exact) => Mode::Exact,
        Some(ModeArg::Float) => Mode::Float,
        None if kind == Kind::Basis => Mode::Exact,
        None => Mode::Float,
    };
    let psi = match kind {
        Kind::SingletProduct => {
            let pairing = match pairs {
                Some(pairs) => {
                    let pairs = parse_pairs(&pairs)?;
                    let n = qubits
                        .unwrap_or_else(|| pairs.iter().flat_map(|&(a, b)| [a, b]).chain(lone).max().unwrap_or(0));
                    SingletPairing::new(n, pairs, lone)?
                }
                None => SingletPairing::random(need_qubits(qubits, "singlet-product")?, &mut rng::seeded(seed, 0))?,
            };
            singlet_product(&pairing, mode)?
        }
        Kind::Ghz => ghz_state(need_qubits(qubits, "ghz")?, mode)?,
        Kind::W => w_state(need_qubits(qubits, "w")?, mode)?,
        Kind::Basis => {
            let index = match (index, qubits) {
                (Some(bits), q) => {
                    let idx = MultiIndex::parse(&bits)?;
                    if q.is_some_and(|q| q != idx.n()) {
                        return Err(Error::Parse(format!(
                            "--index {bits} does not have {} bits",
                            q.unwrap()
                        )));
                    }
                    idx
                }
                (None, Some(q)) => MultiIndex::new(q, 0)?,
                (None, None) => return Err(Error::Parse("basis needs --index or --qubits".into())),
            };
            basis_state(index.n(), index, mode)?
        }
        Kind::Random => {
            let psi = random_state(need_qubits(qubits, "random")?, seed)?;
            if mode == Mode::Exact {
                return Err(Error::Parse("random states are float only".into()));
            }
            psi
        }
    };
    Ok(psi)
}

fn verify_line(r: &SuiteReport) -> String {
    let status = match (&r.skipped, r.passed()) {
        (Some(_), _) => "SKIP",
        (None, true) => "PASS",
        (None, false) => "FAIL",
    };
    let mut line = format!(
        "{status} {} n={} trials={} checks={} failures={}",
        r.suite.id(),
        r.n,
        r.trials,
        r.checks,
        r.failures.len()
    );
    if let Some(why) = &r.skipped {
        line.push_str(&format!(" ({why})"));
    }
    line
}

fn execute(command: Command, out: &mut dyn Write) -> std::result::Result<i32, Fail> {
    match command {
        Command::Analyze {
            file,
            rank,
            lu_seed,
            matrix,
        } => {
            let opts = rank.options()?;
            let psi = maybe_scramble(read_state(&file)?, lu_seed)?;
            if matrix {
                let columns: Vec<Value> = side_matrix(&psi)?.columns().iter().map(amplitudes_to_json).collect();
                emit(out, &Value::Array(columns), false)?;
                return Ok(0);
            }
            emit(out, &analyze(&psi, &opts)?.to_json(), true)?;
            Ok(0)
        }
        Command::Classify { file, rank, lu_seed } => {
            let opts = rank.options()?;
            let psi = maybe_scramble(read_state(&file)?, lu_seed)?;
            emit(out, &classify_min_orbit(&psi, &opts)?.to_json(), false)?;
            Ok(0)
        }
        Command::Generate {
            kind,
            qubits,
            pairs,
            lone,
            index,
            seed,
            lu_seed,
            mode,
            out: path,
        } => {
            let psi = maybe_scramble(generate(kind, qubits, pairs, lone, index, seed, mode)?, lu_seed)?;
            let v = state_to_json(&psi);
            match path {
                Some(path) => {
                    let text = serde_json::to_string_pretty(&v).expect("JSON values serialize") + "\n";
                    std::fs::write(&path, text).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))?;
                }
                None => emit(out, &v, true)?,
            }
            Ok(0)
        }
        Command::Verify {
            suite,
            qubits,
            trials,
            seed,
            rank,
            json,
        } => {
            let opts = rank.options()?;
            let reports = if suite == "all" {
                verify_all(qubits, trials, seed, &opts)?
            } else {
                vec![verify_proposition(
                    suite.parse::<Suite>()?,
                    qubits,
                    trials,
                    seed,
                    &opts,
                )?]
            };
            if json {
                emit(
                    out,
                    &Value::Array(reports.iter().map(SuiteReport::to_json).collect()),
                    true,
                )?;
            } else {
                let mut text = String::new();
                for r in &reports {
                    text.push_str(&verify_line(r));
                    text.push('\n');
                    for f in &r.failures {
                        text.push_str(&format!("  trial {}: {}\n    state: {}\n", f.trial, f.message, f.state));
                    }
                }
                out.write_all(text.as_bytes()).map_err(|e| Fail::Usage(e.to_string()))?;
            }
            Ok(if reports.iter().all(SuiteReport::passed) { 0 } else { 1 })
        }
        Command::Compare { file_a, file_b, rank } => {
            let opts = rank.options()?;
            let mut pairings = Vec::new();
            for path in [&file_a, &file_b] {
                match classify_min_orbit(&read_state(path)?, &opts)? {
                    Classification::Minimal { pairing, .. } => pairings.push(pairing),
                    Classification::NotMinimal {
                        orbit_dimension,
                        min_orbit_dimension,
                    } => {
                        return Err(Fail::Analysis(format!(
                            "{} is not a minimum-orbit state (orbit dimension {orbit_dimension}, minimum {min_orbit_dimension})",
                            path.display()
                        )))
                    }
                }
            }
            let equal = pairing_equal(&pairings[0], &pairings[1])?;
            emit(
                out,
                &json!({ "equal": equal, "a": pairings[0].to_json(), "b": pairings[1].to_json() }),
                false,
            )?;
            Ok(0)
        }
    }
}
