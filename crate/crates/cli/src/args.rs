//! Command-line surface: subcommands, flags, and their defaults.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Environment variable holding the bearer token for the remote solver.
pub const CQM_TOKEN_ENV: &str = "NETMEND_CQM_TOKEN";

#[derive(Debug, Parser)]
#[command(
    name = "netmend",
    version,
    about = "Equitable road-network restoration planning",
    long_about = "Plans budget-constrained capacity restoration on a damaged road \
                  network, balancing total travel-time deficiency against an income \
                  equity term. Runs without arguments on a built-in Sioux Falls \
                  dataset; supply --network/--trips/--scenario to use your own."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one solver on one scenario and report the plan.
    Solve(SolveArgs),
    /// Run the full (budget, mu, solver, seed) grid and stream report rows.
    Sweep(SweepArgs),
    /// Solve user equilibrium only and report link flows.
    Assign(AssignArgs),
    /// Summarize and compare a sweep's report rows per solver.
    Report(ReportArgs),
    /// Check a (network, trips, scenario) triple and list every violation.
    Validate(InputArgs),
}

/// Input files, each falling back to the built-in dataset when omitted.
#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Road network file (from to capacity free_flow_time per line).
    #[arg(long, value_name = "FILE")]
    pub network: Option<PathBuf>,
    /// Trip table file (origin destination demand per line, or Origin blocks).
    #[arg(long, value_name = "FILE")]
    pub trips: Option<PathBuf>,
    /// Damage scenario file (TOML).
    #[arg(long, value_name = "FILE")]
    pub scenario: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverKind {
    Sa,
    Ga,
    Greedy,
    Oracle,
    Cqm,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Sa => "sa",
            SolverKind::Ga => "ga",
            SolverKind::Greedy => "greedy",
            SolverKind::Oracle => "oracle",
            SolverKind::Cqm => "cqm",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatKind {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EquityKind {
    Literal,
    Quadratic,
    Responsive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PenaltyKind {
    Equality,
    #[value(name = "one-sided")]
    OneSided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitnessKind {
    /// Frozen reference flows; fast, used by annealing-style walks.
    Surrogate,
    /// Re-solve equilibrium per evaluation; slow, exact.
    Full,
}

/// Flags shared by `solve` and `sweep` that shape the objective.
#[derive(Debug, Clone, Args)]
pub struct ObjectiveArgs {
    /// Equity term entering the objective.
    #[arg(long, value_enum, default_value = "responsive")]
    pub equity: EquityKind,
    /// Budget penalty form: punish any deviation, or overspend only.
    #[arg(long, value_enum, default_value = "equality")]
    pub penalty: PenaltyKind,
    /// Deficiency evaluation; default is the solver's own (ga: full, others:
    /// surrogate).
    #[arg(long, value_enum)]
    pub fitness: Option<FitnessKind>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "sa")]
    pub solver: SolverKind,
    /// Override the scenario's restoration budget.
    #[arg(long)]
    pub budget: Option<f64>,
    /// Override the scenario's deficiency weight (0 = equity only, 1 =
    /// deficiency only).
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub objective: ObjectiveArgs,
    /// Write the report row here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatKind,
    /// Write the solver's progress trace (sa: per temperature level, ga: per
    /// generation) to this file.
    #[arg(long, value_name = "FILE")]
    pub trace_out: Option<PathBuf>,
    /// Remote solver endpoint (required for --solver cqm); the bearer token
    /// is read from NETMEND_CQM_TOKEN.
    #[arg(long, value_name = "URL")]
    pub cqm_endpoint: Option<String>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Budgets to sweep.
    #[arg(long, value_delimiter = ',', default_values_t = vec![75.0, 150.0, 225.0, 300.0])]
    pub budgets: Vec<f64>,
    /// Deficiency weights to sweep.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.0, 0.25, 0.5, 0.75, 1.0])]
    pub mus: Vec<f64>,
    /// Solvers to run per cell.
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["sa", "greedy"])]
    pub solvers: Vec<SolverKind>,
    /// Seeds to run per cell.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0u64])]
    pub seeds: Vec<u64>,
    /// Parallel sweep cells; defaults to the number of CPUs.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[command(flatten)]
    pub objective: ObjectiveArgs,
    /// Append rows here (created with a header when new) instead of stdout;
    /// rows are flushed as they complete, in grid order.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatKind,
    /// Remote solver endpoint (required when the solver list includes cqm).
    #[arg(long, value_name = "URL")]
    pub cqm_endpoint: Option<String>,
}

#[derive(Debug, Args)]
pub struct AssignArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Apply the scenario's damage (no restoration) before solving; without
    /// this flag the intact network is used.
    #[arg(long)]
    pub damaged: bool,
    /// Write per-link flows here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatKind,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Report rows produced by `sweep` or `solve` (CSV).
    #[arg(long = "input", value_name = "FILE")]
    pub input: PathBuf,
    /// Write the comparison here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatKind,
    /// Also write tidy long-format plot rows (variable, group, budget,
    /// value) to this file.
    #[arg(long, value_name = "FILE")]
    pub plot_out: Option<PathBuf>,
}
