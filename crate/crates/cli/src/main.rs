//! `resdep`: solve, verify, dispatch and simulate from the command line.

/// Like `print!`/`println!`, but a closed stdout (e.g. piping into `head`)
/// is ignored instead of panicking.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = write!(std::io::stdout(), $($arg)*);
    }};
}

macro_rules! outln {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

mod error;
mod manifest;
mod run;
mod solve;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use resdep_core::solver::SolveMode;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "resdep", version, about = "Resilient deployment planning for distributed actors")]
struct Cli {
    /// Seed for randomized components (simulation timers).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Wall-clock budget for the placement search.
    #[arg(long, global = true, default_value_t = 60.0)]
    time_budget_s: f64,
    /// Where outputs and manifests are written.
    #[arg(long, global = true, default_value = ".")]
    output_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute a deployment and write `<app>.depl`.
    Solve(SolveArgs),
    /// Check a deployment file against the specifications.
    Verify(VerifyArgs),
    /// Solve a power dispatch problem file.
    Dispatch(DispatchArgs),
    /// Replay a fault scenario against a simulated group.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Feasible,
    MaxRedundancy,
    MinCost,
}

impl From<ModeArg> for SolveMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Feasible => SolveMode::Feasibility,
            ModeArg::MaxRedundancy => SolveMode::MaximizeCopies,
            ModeArg::MinCost => SolveMode::MinimizeNodesUsed,
        }
    }
}

#[derive(Debug, Args)]
pub struct SpecArgs {
    /// Application model (`.riaps`).
    #[arg(long)]
    model: PathBuf,
    /// Deployment specification (`.dspec`).
    #[arg(long)]
    dspec: PathBuf,
    /// Hardware specification (INI).
    #[arg(long)]
    hwspec: Option<PathBuf>,
    /// Comma-separated node ids.
    #[arg(long, value_delimiter = ',', conflicts_with = "node_count")]
    nodes: Vec<String>,
    /// Number of nodes, named h1..hN.
    #[arg(long)]
    node_count: Option<usize>,
    /// NIC average rate in kbps; overrides the hardware spec.
    #[arg(long)]
    nic_rate: Option<f64>,
    /// NIC burst ceiling in kbps; overrides the hardware spec.
    #[arg(long)]
    nic_ceil: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, value_enum, default_value_t = ModeArg::Feasible)]
    mode: ModeArg,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Deployment file to check.
    #[arg(long)]
    depl: PathBuf,
    /// `max-redundancy` accepts copy counts above the declared ones.
    #[arg(long, value_enum, default_value_t = ModeArg::Feasible)]
    mode: ModeArg,
}

#[derive(Debug, Args)]
pub struct DispatchArgs {
    /// Problem file: `N K`, weights, N request rows, grid row.
    problem: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PatternArg {
    Redundancy,
    Consensus,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario file of `time_ms ACTION args` records.
    scenario: PathBuf,
    #[arg(long, value_enum, default_value_t = PatternArg::Consensus)]
    pattern: PatternArg,
    /// Comma-separated member ids.
    #[arg(long, value_delimiter = ',', conflicts_with = "members")]
    member_ids: Vec<String>,
    /// Number of members, named m1..mN.
    #[arg(long)]
    members: Option<usize>,
    /// Simulated time; defaults to the scenario's END record.
    #[arg(long)]
    duration_ms: Option<u64>,
    #[arg(long, default_value_t = 500)]
    timeout_min_ms: u64,
    #[arg(long, default_value_t = 1000)]
    timeout_max_ms: u64,
    #[arg(long, default_value_t = 100)]
    heartbeat_ms: u64,
    #[arg(long, default_value_t = 50)]
    vote_timeout_ms: u64,
    #[arg(long, default_value_t = 1000)]
    vote_interval_ms: u64,
    #[arg(long, default_value_t = 5)]
    latency_ms: u64,
    #[arg(long, default_value_t = 0.0)]
    drop_probability: f64,
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
}

#[derive(Debug, Clone)]
pub struct Globals {
    pub seed: u64,
    pub time_budget_s: f64,
    pub output_dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let globals = Globals { seed: cli.seed, time_budget_s: cli.time_budget_s, output_dir: cli.output_dir };
    let result = match &cli.command {
        Command::Solve(args) => solve::cmd_solve(&globals, args),
        Command::Verify(args) => solve::cmd_verify(&globals, args),
        Command::Dispatch(args) => run::cmd_dispatch(&globals, args),
        Command::Simulate(args) => run::cmd_simulate(&globals, args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn ensure_output_dir(g: &Globals) -> Result<(), CliError> {
    std::fs::create_dir_all(&g.output_dir).map_err(|e| CliError::io(&g.output_dir, e))
}
