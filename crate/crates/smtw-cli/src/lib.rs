//! The `smtw` command line: solve instances, inspect rotation posets,
//! build and verify reduction instances, and run the oracle-equivalence
//! suite in batch.
//!
//! Every command writes one structured report to the output stream. Exit
//! status is 0 on success, 2 on malformed input or a validation error, 3 when
//! a size guard is exceeded and 1 when a check ran but failed.

mod fuzz;
mod reduce;
mod solve;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use smtw_instance::{InstanceError, SolveError};
use smtw_reduce::ReduceError;
use smtw_td::TdError;

pub use fuzz::{check_strict, check_tied, run_trials, FuzzSummary};
pub use reduce::parse_kind;
pub use solve::{report_json, solve_instance, GraphKind};

#[derive(Parser, Debug)]
#[command(
    name = "smtw",
    version,
    about = "Stable marriage optimisation over tree decompositions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve one instance and print a JSON report.
    Solve(SolveArgs),
    /// Print the rotation poset of a strict instance.
    Rotations(RotationsArgs),
    /// Build a reduction instance and print its verification report.
    VerifyReduction(ReductionArgs),
    /// Build a reduction instance and write it with its side-car file.
    Generate(GenerateArgs),
    /// Cross-check all solvers against the oracles on random instances.
    Fuzz(FuzzArgs),
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// sesm, bsm, max-smt, min-smt or gsm.
    #[arg(long)]
    pub problem: smtw_instance::Problem,
    /// xp, fpt, oracle or gs.
    #[arg(long)]
    pub method: smtw_instance::Method,
    #[arg(long)]
    pub instance: PathBuf,
    /// Decomposition in PACE `.td` format; min-fill when absent.
    #[arg(long)]
    pub td: Option<PathBuf>,
    /// Graph the decomposition covers; defaults to primal for xp, rotation for fpt.
    #[arg(long, value_enum)]
    pub graph: Option<GraphKind>,
    /// Include the matching as 1-based (man, woman) pairs.
    #[arg(long)]
    pub witness: bool,
}

#[derive(Args, Debug)]
pub struct RotationsArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Graphviz output instead of JSON.
    #[arg(long)]
    pub dot: bool,
}

#[derive(Args, Debug)]
pub struct ReductionArgs {
    /// clique-sesm, clique-bsm, clique-max-smt, clique-min-smt, sat-sesm or sat-bsm.
    #[arg(long)]
    pub kind: String,
    /// Edge list (`n m` then `u v` lines) or DIMACS CNF.
    #[arg(long)]
    pub input: PathBuf,
    /// Color classes, one line of vertices each. May instead appear in the
    /// graph file as `class v1 v2 ...` lines.
    #[arg(long)]
    pub partition: Option<PathBuf>,
    /// Clauses per block for SAT inputs.
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    /// Small spacer counts in place of the nominal ones.
    #[arg(long)]
    pub relaxed: bool,
    /// SAT spacer scale in relaxed mode.
    #[arg(long, default_value_t = 1)]
    pub spacer_scale: u64,
    #[arg(long, default_value_t = 1)]
    pub s10: u64,
    #[arg(long, default_value_t = 1)]
    pub s20: u64,
    #[arg(long, default_value_t = 1)]
    pub s30: u64,
    /// Defaults to the smallest value keeping the happy-pair count non-negative.
    #[arg(long)]
    pub s40: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub alpha_mult: u64,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub reduction: ReductionArgs,
    /// Writes `<out>.smti` and `<out>.meta`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct FuzzArgs {
    /// Largest number of agents per side; sizes are drawn from 2..=n.
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; trials are independent.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

/// A failure with its exit status.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Guard(String),
    /// A check ran and found a disagreement.
    Failed(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Guard(_) => 3,
            CliError::Failed(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Guard(m) | CliError::Failed(m) => m,
        }
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Guard(_) => CliError::Guard(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<ReduceError> for CliError {
    fn from(e: ReduceError) -> Self {
        match e {
            ReduceError::Guard(_) | ReduceError::Solve(SolveError::Guard(_)) => {
                CliError::Guard(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<InstanceError> for CliError {
    fn from(e: InstanceError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<TdError> for CliError {
    fn from(e: TdError) -> Self {
        CliError::Validation(format!("decomposition: {e}"))
    }
}

pub(crate) fn read_file(path: &std::path::Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

pub(crate) fn print_json(out: &mut dyn Write, v: &serde_json::Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(v).expect("values serialise");
    writeln!(out, "{text}").map_err(|e| CliError::Validation(format!("write: {e}")))
}

/// Runs a parsed command, writing its report to `out`.
pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(a) => solve::solve(&a, out),
        Command::Rotations(a) => solve::rotations(&a, out),
        Command::VerifyReduction(a) => reduce::verify(&a, out),
        Command::Generate(a) => reduce::generate(&a, out),
        Command::Fuzz(a) => fuzz::fuzz(&a, out),
    }
}

/// Parses `args` (program name first) and runs the command. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.code()
        }
    }
}
