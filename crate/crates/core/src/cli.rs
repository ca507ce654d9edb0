//! Command-line front end: state files, protocol scripts and JSON reports.
//!
//! State files are `{"dims": [dim_a, dim_b], "matrix": [[[re, im], ...], ...]}`
//! with Alice-major row/column order. All floating-point numbers are written
//! with 17 significant digits so files round-trip bit-exactly.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::ser::{CompactFormatter, Formatter, PrettyFormatter};
use thiserror::Error;

use crate::channels::{BasisAngles, LocalBasis};
use crate::deficit::{
    closed_form, deficit_lower_bound, dominant_pure_state, maxcorr_deficit,
    one_way_deficit_directed, oracle_one_way_deficit, pure_state_deficit, ClosedForm, Direction,
    Family, OptimizerConfig, OptimizerDiagnostics,
};
use crate::protocol::{builtin_script, BuiltinScript, ProtocolLedger, ProtocolStep};
use crate::qstate::{entropy_unchecked, partial_trace, BipartiteState, ComplexMatrix, Party, C64};
use crate::states::{self, FamilySpec};
use crate::Error;

pub const TOOL: &str = "workdeficit";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Caps the worker threads used for optimiser restarts; `0` means automatic.
pub const THREADS_ENV: &str = "WORKDEFICIT_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("not applicable: {0}")]
    Mismatch(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Io(_) => 2,
            CliError::InvalidState(_) => 3,
            CliError::Mismatch(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NotHermitian(_) | Error::InvalidState(_) => {
                CliError::InvalidState(e.to_string())
            }
            Error::InvalidParameter(_) | Error::InvalidDistribution(_) => {
                CliError::Parse(e.to_string())
            }
            Error::NotUnitary(_)
            | Error::DimensionMismatch(_)
            | Error::NotQubits(..)
            | Error::Locality(_)
            | Error::NotMaxCorrelated(_)
            | Error::NotPure(_)
            | Error::Unsupported(_) => CliError::Mismatch(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

// ---------------------------------------------------------------------------
// JSON encoding

/// Writes every `f64` as `{:.16e}` and delegates layout to `F`.
struct SigDigits<F>(F);

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*)),* $(,)?) => {
        $(
            fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
                self.0.$name(w $(, $arg)*)
            }
        )*
    };
}

impl<F: Formatter> Formatter for SigDigits<F> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    delegate! {
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        end_object_key(),
        begin_object_value(),
        end_object_value(),
    }
}

fn encode<T: Serialize, F: Formatter>(value: &T, formatter: F) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits(formatter));
    value
        .serialize(&mut ser)
        .expect("in-memory serialisation cannot fail");
    let mut s = String::from_utf8(buf).expect("serde_json writes UTF-8");
    s.push('\n');
    s
}

pub fn to_compact_json<T: Serialize>(value: &T) -> String {
    encode(value, CompactFormatter)
}

pub fn to_pretty_json<T: Serialize>(value: &T) -> String {
    encode(value, PrettyFormatter::new())
}

// ---------------------------------------------------------------------------
// State files

pub type MatrixRecord = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dims: [usize; 2],
    pub matrix: MatrixRecord,
}

pub fn matrix_to_record(m: &ComplexMatrix) -> MatrixRecord {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

pub fn record_to_matrix(rows: &MatrixRecord) -> CliResult<ComplexMatrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if n == 0 || rows.iter().any(|r| r.len() != m) {
        return Err(CliError::Parse("matrix rows are empty or ragged".into()));
    }
    Ok(ComplexMatrix::from_fn(n, m, |i, j| {
        C64::new(rows[i][j][0], rows[i][j][1])
    }))
}

impl StateFile {
    pub fn from_state(s: &BipartiteState) -> Self {
        StateFile {
            dims: [s.dim_a(), s.dim_b()],
            matrix: matrix_to_record(s.rho()),
        }
    }

    pub fn into_state(self) -> CliResult<BipartiteState> {
        let [da, db] = self.dims;
        let m = record_to_matrix(&self.matrix)?;
        if da == 0 || db == 0 || m.nrows() != da * db || m.ncols() != da * db {
            return Err(CliError::Parse(format!(
                "{}x{} matrix for dims [{da}, {db}]",
                m.nrows(),
                m.ncols()
            )));
        }
        BipartiteState::new(da, db, m).map_err(|e| CliError::InvalidState(e.to_string()))
    }
}

pub fn serialize_state(s: &BipartiteState) -> String {
    to_compact_json(&StateFile::from_state(s))
}

pub fn parse_state(text: &str) -> CliResult<BipartiteState> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    file.into_state()
}

pub fn load_state(path: &Path) -> CliResult<BipartiteState> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    parse_state(&text)
}

// ---------------------------------------------------------------------------
// Protocol scripts

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnglesRecord {
    pub theta: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum UnitaryRecord {
    Named(String),
    Matrix(MatrixRecord),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptRecord {
    pub op: String,
    pub party: Party,
    #[serde(default)]
    pub qubits: Vec<usize>,
    #[serde(default)]
    pub basis: Option<AnglesRecord>,
    #[serde(default)]
    pub to: Option<Party>,
    #[serde(default)]
    pub unitary: Option<UnitaryRecord>,
}

impl ScriptRecord {
    pub fn to_step(&self) -> CliResult<ProtocolStep> {
        match self.op.as_str() {
            "add-ancilla" => Ok(ProtocolStep::AddAncilla { party: self.party }),
            "local-unitary" => {
                let unitary = match &self.unitary {
                    Some(UnitaryRecord::Named(name)) if name == "cnot" => {
                        crate::channels::cnot_gate()
                    }
                    Some(UnitaryRecord::Named(name)) => {
                        return Err(CliError::Parse(format!("unknown unitary {name:?}")))
                    }
                    Some(UnitaryRecord::Matrix(rows)) => record_to_matrix(rows)?,
                    None => return Err(CliError::Parse("local-unitary needs a unitary".into())),
                };
                Ok(ProtocolStep::LocalUnitary {
                    party: self.party,
                    qubits: self.qubits.clone(),
                    unitary,
                })
            }
            "dephase-send" => {
                let [qubit] = self.qubits[..] else {
                    return Err(CliError::Parse(
                        "dephase-send takes exactly one qubit".into(),
                    ));
                };
                let basis = match &self.basis {
                    Some(a) => LocalBasis::from_angles(&BasisAngles::Qubit {
                        theta: a.theta,
                        phi: a.phi,
                    }),
                    None => LocalBasis::computational(2),
                };
                Ok(ProtocolStep::DephaseAndSend {
                    qubit,
                    basis,
                    from: self.party,
                    to: self.to.unwrap_or(self.party.other()),
                })
            }
            other => Err(CliError::Parse(format!("unknown op {other:?}"))),
        }
    }
}

pub fn parse_script(text: &str) -> CliResult<Vec<ProtocolStep>> {
    let records: Vec<ScriptRecord> =
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    records.iter().map(ScriptRecord::to_step).collect()
}

// ---------------------------------------------------------------------------
// Reports

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSection {
    pub grid_theta: usize,
    pub grid_phi: usize,
    pub value: f64,
    pub theta: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSection {
    pub script: String,
    pub steps: usize,
    pub w_local: f64,
    pub w_local_by_party: f64,
    pub delta: f64,
    pub k: usize,
    pub s_a_final: f64,
    pub s_b_final: f64,
    pub n_a_final: usize,
    pub n_b_final: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub mode: Option<String>,
    pub seed: Option<u64>,
    pub dims: [usize; 2],
    pub n: Option<usize>,
    pub w_total: Option<f64>,
    pub s_a: f64,
    pub s_b: f64,
    pub s_total: f64,
    pub lower_bound: f64,
    pub delta_one_way: Option<f64>,
    pub direction: Option<Direction>,
    pub best_basis: Option<BasisAngles>,
    pub closed_form: Option<ClosedForm>,
    pub optimizer: Option<OptimizerConfig>,
    pub diagnostics: Option<OptimizerDiagnostics>,
    pub oracle: Option<OracleSection>,
    pub protocol: Option<ProtocolSection>,
    pub duration_seconds: f64,
}

impl ReportFile {
    fn base(command: &str, s: &BipartiteState) -> Self {
        let s_total = entropy_unchecked(s.rho());
        let n = s.qubit_counts().map(|(a, b)| a + b);
        ReportFile {
            tool: TOOL.into(),
            version: VERSION.into(),
            command: command.into(),
            mode: None,
            seed: None,
            dims: [s.dim_a(), s.dim_b()],
            n,
            w_total: n.map(|n| n as f64 - s_total),
            s_a: entropy_unchecked(&partial_trace(s, Party::Alice)),
            s_b: entropy_unchecked(&partial_trace(s, Party::Bob)),
            s_total,
            lower_bound: deficit_lower_bound(s),
            delta_one_way: None,
            direction: None,
            best_basis: None,
            closed_form: None,
            optimizer: None,
            diagnostics: None,
            oracle: None,
            protocol: None,
            duration_seconds: 0.0,
        }
    }

    pub fn to_json(&self) -> String {
        to_pretty_json(self)
    }
}

// ---------------------------------------------------------------------------
// Commands

#[derive(Debug, Parser)]
#[command(
    name = "workdeficit",
    version,
    about = "Work deficit of bipartite quantum states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a state from one of the built-in families.
    Gen(GenArgs),
    /// Compute work and deficit quantities for a state file.
    Compute(ComputeArgs),
    /// Brute-force grid minimum of the one-way deficit (qubit sender).
    Oracle(OracleArgs),
    /// Replay a protocol script and account for local work.
    Protocol(ProtocolArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    MaxEntangled,
    CcPair,
    ClassicallyCorrelated,
    MaxCorrelated,
    PhiMixture,
    RandomMixed,
    RandomPure,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Local dimension for max-entangled.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Mixing weight for phi-mixture.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 2)]
    pub dim_a: usize,
    #[arg(long, default_value_t = 2)]
    pub dim_b: usize,
    /// Rank for random-mixed; defaults to full rank.
    #[arg(long)]
    pub rank: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Probability table for classically-correlated, rows separated by `;`,
    /// entries by `,`.
    #[arg(long)]
    pub probs: Option<String>,
    /// Coefficient matrix for max-correlated as JSON `[[[re, im], ...], ...]`.
    #[arg(long)]
    pub sigma: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    OneWay,
    Bound,
    Pure,
    Maxcorr,
}

impl Mode {
    fn label(self) -> &'static str {
        match self {
            Mode::OneWay => "one-way",
            Mode::Bound => "bound",
            Mode::Pure => "pure",
            Mode::Maxcorr => "maxcorr",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    AToB,
    BToA,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    pub state: PathBuf,
    #[arg(long, value_enum, default_value = "one-way")]
    pub mode: Mode,
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    #[arg(long, default_value_t = 2000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub f_tol: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub x_tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "a-to-b")]
    pub direction: DirectionArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    pub state: PathBuf,
    #[arg(long, default_value_t = 181)]
    pub grid_theta: usize,
    #[arg(long, default_value_t = 360)]
    pub grid_phi: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["script", "builtin"])))]
pub struct ProtocolArgs {
    pub state: PathBuf,
    #[arg(long)]
    pub script: Option<PathBuf>,
    /// cc-measure-send, schmidt-dephase or maxcorr-dephase.
    #[arg(long)]
    pub builtin: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_probs(text: &str) -> CliResult<Vec<Vec<f64>>> {
    text.split(';')
        .map(|row| {
            row.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|e| CliError::Parse(format!("probability {x:?}: {e}")))
                })
                .collect()
        })
        .collect()
}

pub fn family_spec(args: &GenArgs) -> CliResult<FamilySpec> {
    Ok(match args.family {
        FamilyArg::MaxEntangled => FamilySpec::MaxEntangled { d: args.d },
        FamilyArg::CcPair => FamilySpec::CcPair,
        FamilyArg::ClassicallyCorrelated => {
            let probs = args
                .probs
                .as_deref()
                .ok_or_else(|| CliError::Parse("--probs is required".into()))?;
            FamilySpec::ClassicallyCorrelated {
                probs: parse_probs(probs)?,
                basis_a: None,
                basis_b: None,
            }
        }
        FamilyArg::MaxCorrelated => {
            let text = args
                .sigma
                .as_deref()
                .ok_or_else(|| CliError::Parse("--sigma is required".into()))?;
            let rows: MatrixRecord =
                serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
            FamilySpec::MaxCorrelated {
                sigma: record_to_matrix(&rows)?,
            }
        }
        FamilyArg::PhiMixture => FamilySpec::PhiMixture {
            p: args
                .p
                .ok_or_else(|| CliError::Parse("--p is required".into()))?,
        },
        FamilyArg::RandomMixed => FamilySpec::RandomMixed {
            dim_a: args.dim_a,
            dim_b: args.dim_b,
            rank: args.rank.unwrap_or(args.dim_a * args.dim_b),
            seed: args.seed,
        },
        FamilyArg::RandomPure => FamilySpec::RandomPure {
            dim_a: args.dim_a,
            dim_b: args.dim_b,
            seed: args.seed,
        },
    })
}

pub fn cmd_gen(args: &GenArgs) -> CliResult<String> {
    let spec = family_spec(args)?;
    let state = states::gen(&spec)
        .map_err(|e| CliError::Parse(e.to_string()))?
        .into_state();
    Ok(serialize_state(&state))
}

pub fn compute_report(s: &BipartiteState, args: &ComputeArgs) -> CliResult<ReportFile> {
    let mut report = ReportFile::base("compute", s);
    report.mode = Some(args.mode.label().into());
    match args.mode {
        Mode::OneWay => {
            let cfg = OptimizerConfig {
                restarts: args.restarts,
                max_iters: args.max_iters,
                f_tol: args.f_tol,
                x_tol: args.x_tol,
                seed: args.seed,
            };
            cfg.validate()?;
            let direction = match args.direction {
                DirectionArg::AToB => Direction::AliceToBob,
                DirectionArg::BToA => Direction::BobToAlice,
            };
            let r = one_way_deficit_directed(s, &cfg, direction)?;
            report.seed = Some(args.seed);
            report.delta_one_way = Some(r.delta_one_way);
            report.direction = Some(r.direction);
            report.best_basis = Some(r.best_basis);
            report.closed_form = r.closed_form;
            report.optimizer = Some(cfg);
            report.diagnostics = Some(r.diagnostics);
        }
        Mode::Bound => {
            report.closed_form = closed_form(s);
        }
        // Closed forms are exact values of the one-way deficit.
        Mode::Pure => {
            let value = pure_state_deficit(&dominant_pure_state(s)?);
            report.delta_one_way = Some(value);
            report.closed_form = Some(ClosedForm {
                family: Family::Pure,
                value,
            });
        }
        Mode::Maxcorr => {
            let value = maxcorr_deficit(s)?;
            report.delta_one_way = Some(value);
            report.closed_form = Some(ClosedForm {
                family: Family::MaxCorrelated,
                value,
            });
        }
    }
    Ok(report)
}

pub fn oracle_report(s: &BipartiteState, args: &OracleArgs) -> CliResult<ReportFile> {
    let mut report = ReportFile::base("oracle", s);
    let m = oracle_one_way_deficit(s, args.grid_theta, args.grid_phi)?;
    report.delta_one_way = Some(m.value);
    report.direction = Some(Direction::AliceToBob);
    report.best_basis = Some(BasisAngles::Qubit {
        theta: m.theta,
        phi: m.phi,
    });
    report.oracle = Some(OracleSection {
        grid_theta: args.grid_theta,
        grid_phi: args.grid_phi,
        value: m.value,
        theta: m.theta,
        phi: m.phi,
    });
    Ok(report)
}

pub fn protocol_report(
    s: &BipartiteState,
    label: &str,
    steps: &[ProtocolStep],
) -> CliResult<ReportFile> {
    let mut report = ReportFile::base("protocol", s);
    let ledger = ProtocolLedger::new(s)?;
    let work = ledger.replay(steps)?.finalize()?;
    let w_total = report
        .w_total
        .expect("ledger construction guarantees qubit dimensions");
    report.protocol = Some(ProtocolSection {
        script: label.into(),
        steps: steps.len(),
        w_local: work.w_local,
        w_local_by_party: work.w_local_by_party,
        delta: w_total - work.w_local,
        k: work.k,
        s_a_final: work.s_a_final,
        s_b_final: work.s_b_final,
        n_a_final: work.n_a_final,
        n_b_final: work.n_b_final,
    });
    Ok(report)
}

fn builtin_steps(s: &BipartiteState, name: &str) -> CliResult<Vec<ProtocolStep>> {
    let script: BuiltinScript = name
        .parse()
        .map_err(|e: Error| CliError::Parse(e.to_string()))?;
    let ledger = ProtocolLedger::new(s)?;
    Ok(builtin_script(script, &ledger, None)?)
}

fn timed<F>(f: F) -> CliResult<String>
where
    F: FnOnce() -> CliResult<ReportFile>,
{
    let start = Instant::now();
    let mut report = f()?;
    report.duration_seconds = start.elapsed().as_secs_f64();
    Ok(report.to_json())
}

/// Runs a parsed command and returns the text destined for stdout or `--out`.
pub fn run(cli: &Cli) -> CliResult<(String, Option<PathBuf>)> {
    match &cli.command {
        Command::Gen(args) => Ok((cmd_gen(args)?, args.out.clone())),
        Command::Compute(args) => {
            let s = load_state(&args.state)?;
            Ok((timed(|| compute_report(&s, args))?, args.out.clone()))
        }
        Command::Oracle(args) => {
            let s = load_state(&args.state)?;
            Ok((timed(|| oracle_report(&s, args))?, args.out.clone()))
        }
        Command::Protocol(args) => {
            let s = load_state(&args.state)?;
            let (label, steps) = match (&args.script, &args.builtin) {
                (Some(path), _) => {
                    let text = fs::read_to_string(path)
                        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
                    (path.display().to_string(), parse_script(&text)?)
                }
                (None, Some(name)) => (name.clone(), builtin_steps(&s, name)?),
                (None, None) => {
                    return Err(CliError::Parse("--script or --builtin is required".into()))
                }
            };
            Ok((
                timed(|| protocol_report(&s, &label, &steps))?,
                args.out.clone(),
            ))
        }
    }
}

/// Reads the thread cap from the environment; `None` means automatic.
pub fn thread_cap() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(0) => Ok(None),
            Ok(n) => Ok(Some(n)),
            Err(e) => Err(CliError::Parse(format!("{THREADS_ENV}={v:?}: {e}"))),
        },
    }
}
