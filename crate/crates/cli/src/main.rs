use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod load;

#[derive(Parser)]
#[command(name = "glex", version, about = "Functional decomposition and explanations for tree ensembles")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write every identified component per row, plus a metadata sidecar.
    Decompose(DecomposeArgs),
    /// Write SHAP values derived from the components.
    Shap(ShapArgs),
    /// Write a partial dependence curve for a feature subset.
    Pdp(PdpArgs),
    /// Write SHAP, split and per-component importance.
    Importance(ImportanceArgs),
    /// Drop every component touching the removed features.
    Debias(DebiasArgs),
    /// Draw a simulated dataset with its target column.
    Simulate(SimulateArgs),
    /// Fit a boosted tree ensemble and write it in the native format.
    Fit(FitArgs),
    /// Time the naive and fast decomposition paths.
    Bench(BenchArgs),
    /// Check a model's structural invariants.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    Naive,
    Fast,
    Grid,
}

impl AlgorithmArg {
    pub fn name(self) -> &'static str {
        match self {
            AlgorithmArg::Naive => "naive",
            AlgorithmArg::Fast => "fast",
            AlgorithmArg::Grid => "grid",
        }
    }
}

#[derive(Args, Clone)]
pub struct ModelArgs {
    /// Native model JSON or booster dump (a JSON array).
    #[arg(long)]
    pub model: PathBuf,
    /// Feature names for a booster dump, comma separated or `@file` with one per line.
    #[arg(long, alias = "feature-names")]
    pub features: Option<String>,
    /// Global offset added to a booster dump's predictions.
    #[arg(long, default_value_t = 0.0)]
    pub base_offset: f64,
}

#[derive(Args, Clone)]
pub struct ExplainArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// CSV with a header row; columns are matched to the model's feature names.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// `grid` uses the empirical density of --data instead of tree covers.
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Fast)]
    pub algorithm: AlgorithmArg,
}

#[derive(Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub common: ExplainArgs,
    /// Metadata path (default: --out with a `.json` extension).
    #[arg(long)]
    pub meta: Option<PathBuf>,
}

#[derive(Args)]
pub struct ShapArgs {
    #[command(flatten)]
    pub common: ExplainArgs,
    /// Exact subset enumeration instead of the components (d <= 20).
    #[arg(long)]
    pub oracle: bool,
    /// Fail unless phi0 plus all values reproduces each prediction.
    #[arg(long)]
    pub check_efficiency: bool,
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
}

#[derive(Args)]
pub struct PdpArgs {
    #[command(flatten)]
    pub common: ExplainArgs,
    /// Feature names, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub subset: Vec<String>,
    /// Evaluate on this many evenly spaced points per feature instead of the data rows.
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Args)]
pub struct ImportanceArgs {
    #[command(flatten)]
    pub common: ExplainArgs,
    /// Average over the rows of this CSV instead of --data.
    #[arg(long)]
    pub reference: Option<PathBuf>,
}

#[derive(Args)]
pub struct DebiasArgs {
    #[command(flatten)]
    pub common: ExplainArgs,
    /// Features to remove, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub remove: Vec<String>,
    /// Also write the surviving components.
    #[arg(long)]
    pub components_out: Option<PathBuf>,
    /// Print median prediction gaps between the two values of this column.
    #[arg(long)]
    pub gap_by: Option<String>,
}

#[derive(Args)]
pub struct SimulateArgs {
    /// interaction2d, importance4d or salary.
    #[arg(long)]
    pub scenario: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Correlation of x1 and x2 (interaction2d).
    #[arg(long, default_value_t = 0.3)]
    pub corr: f64,
    /// Spread of weekly hours (salary).
    #[arg(long, default_value_t = 4.0)]
    pub hours_sd: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct FitArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Target column; every other column is a feature.
    #[arg(long, default_value = "y")]
    pub target: String,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub rounds: usize,
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
    #[arg(long, default_value_t = 0.1)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 1)]
    pub min_rows: usize,
    /// Feature columns to leave out, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub drop: Vec<String>,
}

#[derive(Args)]
pub struct BenchArgs {
    /// Comma-separated values; the report covers every combination.
    #[arg(long, value_delimiter = ',', default_value = "10000")]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "4")]
    pub d: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "100")]
    pub rounds: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "4")]
    pub depth: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report path (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
}

pub enum Outcome {
    Ok,
    /// A check ran and found problems.
    Failed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            let msg = e.to_string().replace('\n', "; ");
            eprintln!("glex: error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> glex_core::Result<Outcome> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| glex_core::Error::InvalidParams(e.to_string()))?;
    }
    match cli.command {
        Command::Decompose(a) => commands::decompose_cmd(&a),
        Command::Shap(a) => commands::shap(&a),
        Command::Pdp(a) => commands::pdp_cmd(&a),
        Command::Importance(a) => commands::importance_cmd(&a),
        Command::Debias(a) => commands::debias(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Fit(a) => commands::fit(&a),
        Command::Bench(a) => commands::bench(&a),
        Command::Validate(a) => commands::validate_cmd(&a),
    }
}
