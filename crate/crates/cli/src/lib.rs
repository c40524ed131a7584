//! Command-line front end: code generation, sampling runs, oracle verification,
//! graphic certification and the quantum sampler.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or I/O error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use codesw::code::Direction;
use codesw::dynamics::KernelId;
use codesw::par::Execution;

mod commands;
pub mod spec;

pub use spec::{CodeSpec, GraphSpec};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{path}: {source}", path = .0.display(), source = .1)]
    Io(PathBuf, std::io::Error),
    #[error(transparent)]
    Core(#[from] codesw::Error),
    #[error("output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "codesw", version, about = "Code Swendsen-Wang sampling and exact verification")]
pub struct Cli {
    /// Run every data-parallel kernel on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write check-list, graph and stabilizer files for a code family.
    Gen(GenArgs),
    /// Run a chain and write CSV traces plus a JSON summary.
    Sample(SampleArgs),
    /// Run exact oracle suites; exit 1 if any check fails.
    Verify(VerifyArgs),
    /// Certify that a code is Δ-graphic or Δ-cographic with respect to a graph.
    Certify(CertifyArgs),
    /// Simulate the quantum Gibbs sampler exactly or by Pauli-frame trajectories.
    Quantum(QuantumArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// ising-graph:<graph>, toric2d:L, toric4d:L, bell, or from-file:<path>.
    #[arg(long)]
    pub code: CodeSpec,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Classical code: ising-graph:<graph>, toric2d:L[:x|z], toric4d:L[:x|z], or from-file:<path>.
    #[arg(long)]
    pub code: CodeSpec,
    #[arg(long, default_value = "sw")]
    pub chain: KernelId,
    /// Inverse temperature (default 1.0).
    #[arg(long, conflicts_with = "p")]
    pub beta: Option<f64>,
    /// Bond probability `1 − e^{−2β}`.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    /// Discarded prefix for TV and autocorrelation (default: half the steps).
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub replicas: usize,
    /// Output prefix: `<out>.csv` (or `<out>-r<i>.csv`) and `<out>.json`.
    #[arg(long)]
    pub out: PathBuf,
    /// Coupled graph for the worm chain.
    #[arg(long)]
    pub graph: Option<GraphSpec>,
    /// Lift direction setting the worm weight.
    #[arg(long, default_value = "primal")]
    pub direction: Direction,
    /// Significance level of the replica consistency test.
    #[arg(long, default_value_t = codesw::analysis::KS_ALPHA)]
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Stationarity,
    Coupling,
    AppendixA,
    Comparison,
    Flows,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FaultArg {
    None,
    InvertedMetropolis,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub code: CodeSpec,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "all")]
    pub suite: Vec<Suite>,
    /// Bond probabilities, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<f64>,
    /// Inverse temperatures, comma separated (converted to p).
    #[arg(long, value_delimiter = ',')]
    pub beta: Vec<f64>,
    /// Override every suite's tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Graph for primal (graphic) couplings.
    #[arg(long)]
    pub graph: Option<GraphSpec>,
    /// Graph for dual (cographic) couplings.
    #[arg(long)]
    pub dual_graph: Option<GraphSpec>,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "none", hide = true)]
    pub fault: FaultArg,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long)]
    pub code: CodeSpec,
    #[arg(long)]
    pub graph: GraphSpec,
    #[arg(long, default_value = "primal")]
    pub direction: Direction,
    /// Largest acceptable Δ.
    #[arg(long)]
    pub delta: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QuantumMode {
    Exact,
    Trajectory,
}

#[derive(Debug, Args)]
pub struct QuantumArgs {
    /// bell, toric2d:L, toric4d:L, or from-file:<stabilizer file>.
    #[arg(long)]
    pub code: CodeSpec,
    #[arg(long, default_value_t = 0.7)]
    pub beta: f64,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: QuantumMode,
    /// Classical kernel Q on error configurations.
    #[arg(long, default_value = "glauber")]
    pub chain: KernelId,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Exact mode: final trace distance allowed (default 1e-8). Trajectory mode: TV allowed (default 0.02).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Exact mode: computational basis state the quantum register starts in.
    #[arg(long, default_value_t = 0)]
    pub init: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Outcome of a subcommand that ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    pub fn from_passed(passed: bool) -> Self {
        if passed {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
        }
    }
}

/// Parse `args` (including the program name) and run; human-readable output goes to `out`.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = write!(out, "{e}");
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(outcome) => outcome.exit_code(),
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> CliResult<Outcome> {
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::best()
    };
    match &cli.command {
        Command::Gen(a) => commands::gen(a, out),
        Command::Sample(a) => commands::sample(a, exec, out),
        Command::Verify(a) => commands::verify(a, exec, out),
        Command::Certify(a) => commands::certify(a, out),
        Command::Quantum(a) => commands::quantum(a, out),
    }
}

pub(crate) fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

pub(crate) fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialise");
    s.push('\n');
    s
}
