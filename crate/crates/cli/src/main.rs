mod commands;
mod plot;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dstbench_core::harness::Scale;

/// Simulated direct state measurement (DST) versus linear-inversion tomography.
///
/// Exit codes: 0 success, 1 I/O failure, 2 invalid configuration or arguments,
/// 3 sweep finished with failed rows (see the `status` column).
#[derive(Debug, Parser)]
#[command(name = "dstbench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the experiments of a JSON config file; writes <stem>.csv and <stem>_summary.csv.
    Run(RunArgs),
    /// Run a figure preset; writes <name>.csv, <name>_summary.csv and <name>.svg.
    Figure(FigureArgs),
    /// Tabulate the bias estimate D' of a pure state over couplings.
    Bias(BiasArgs),
    /// Reconstruct at several couplings and extrapolate the state to phi -> 0.
    Extrapolate(ExtrapolateArgs),
    /// Print a state specification as state JSON ({d, re, im}).
    State(StateArgs),
}

#[derive(Debug, Args)]
pub struct ExecArgs {
    /// Output directory (created if absent).
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Override the master seed of every experiment.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads [default: available cores].
    #[arg(long, env = "DSTBENCH_THREADS")]
    pub threads: Option<usize>,
    /// Use exact expectation values (N -> infinity) instead of sampling.
    #[arg(long)]
    pub exact: bool,
    /// Overwrite an existing sweep CSV.
    #[arg(long)]
    pub force: bool,
    /// Keep rows already present in the output (or its .partial file) and compute only the rest.
    #[arg(long)]
    pub resume: bool,
    /// Record per-row wall time in the `ms` column (output is then not reproducible).
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Experiment config: one object or a list (see config.schema.json).
    #[arg(long)]
    pub config: PathBuf,
    #[command(flatten)]
    pub exec: ExecArgs,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    /// fig1a | fig1b | fig2a | fig2b | fig3a | fig3b | fig4
    pub name: String,
    /// Parameter scale: `full` (N up to 1e8) or `desk` (N up to 1e6).
    #[arg(long, default_value = "desk")]
    pub scale: Scale,
    #[command(flatten)]
    pub exec: ExecArgs,
}

/// One of the state sources; `--alpha` is the default kind.
#[derive(Debug, Args)]
pub struct StateSource {
    /// Hilbert-space dimension.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Spin-coherent state with this real part of alpha.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["state", "random", "complementary"])]
    pub alpha: Option<f64>,
    /// Imaginary part of alpha.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha_im: f64,
    /// State JSON file ({d, re, im}).
    #[arg(long, conflicts_with_all = ["random", "complementary"])]
    pub state: Option<PathBuf>,
    /// Haar-random state from this seed.
    #[arg(long, conflicts_with = "complementary")]
    pub random: Option<u64>,
    /// Rank of the random state (1 = pure).
    #[arg(long, default_value_t = 1)]
    pub rank: usize,
    /// Complementary-basis state |c_k>.
    #[arg(long)]
    pub complementary: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PointerChoice {
    Qubit,
    Gaussian,
    Both,
}

#[derive(Debug, Args)]
pub struct BiasArgs {
    #[command(flatten)]
    pub state: StateSource,
    /// Comma-separated couplings.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub phi: Vec<f64>,
    /// Pointer model; `both` prints one table per pointer.
    #[arg(long, value_enum, default_value = "qubit")]
    pub pointer: PointerChoice,
    /// Treat the input as the true state and also print D(rho_a, rho_t).
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Args)]
pub struct ExtrapolateArgs {
    #[command(flatten)]
    pub state: StateSource,
    /// Comma-separated couplings to reconstruct at.
    #[arg(long, value_delimiter = ',', required = true)]
    pub phis: Vec<f64>,
    /// Polynomial degree in phi (1 or 2).
    #[arg(long, default_value_t = 2)]
    pub degree: usize,
    /// Pointer model; `both` extrapolates once per pointer.
    #[arg(long, value_enum, default_value = "qubit")]
    pub pointer: PointerChoice,
    /// Sample this many copies per coupling; without it the exact mode is used.
    #[arg(long)]
    pub copies: Option<u64>,
    /// Master seed for sampled reconstructions.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory for extrapolated_<pointer>.json.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct StateArgs {
    #[command(flatten)]
    pub state: StateSource,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => commands::run(&a),
        Command::Figure(a) => commands::figure(&a),
        Command::Bias(a) => commands::bias(&a),
        Command::Extrapolate(a) => commands::extrapolate(&a),
        Command::State(a) => commands::state(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
