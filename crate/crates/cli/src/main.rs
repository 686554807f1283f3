mod commands;
mod config;
mod output;
mod verify;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Debug)]
pub struct CliError {
    kind: String,
    message: String,
}

impl CliError {
    pub fn new(kind: &str, message: impl Into<String>) -> Self {
        CliError {
            kind: kind.to_string(),
            message: message.into(),
        }
    }

    fn to_json(&self) -> String {
        json!({ "error": { "kind": self.kind, "message": self.message } }).to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl From<impurity_core::Error> for CliError {
    fn from(e: impurity_core::Error) -> Self {
        use impurity_core::Error::*;
        let kind = match &e {
            UnknownFunction(_) => "unknown-function",
            InvalidParameter { .. } => "invalid-parameter",
            MalformedSpec { .. } => "malformed-spec",
            NotPreimpurity { .. } => "not-preimpurity",
            SecondDerivativeVanishes { .. } => "second-derivative-vanishes",
            Improper { .. } => "improper",
            InvalidWeight(_) => "invalid-weight",
            InvalidNode(_) => "invalid-node",
            InvalidSplit { .. } => "invalid-split",
            DegenerateSplit { .. } => "degenerate-split",
            EmptyCandidates => "empty-candidates",
            InvalidDataset(_) => "invalid-dataset",
            Precondition(_) => "precondition",
        };
        CliError::new(kind, e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Impurity functions, class weighting and optimal splits for binary
/// classification trees.
#[derive(Debug, Parser)]
#[command(name = "impurity", version, args_override_self = true)]
pub struct Cli {
    /// Seed for every randomized step; echoed into JSON output.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Write output here instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,

    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// JSON object of flags for the subcommand; explicit flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List catalog functions with their axiom and weighting properties.
    Catalog(CatalogArgs),
    /// Score candidate splits of one node.
    Split(SplitArgs),
    /// Decide the purity ordering between two functions.
    Compare(CompareArgs),
    /// Print the spec of T_w f.
    Transform(TransformArgs),
    /// Tabulate G, H = f'''/f'' and H' on a grid (CSV).
    Gprofile(GprofileArgs),
    /// Eight-point dataset realizing two splits (CSV).
    Realize(RealizeArgs),
    /// Grow a classification tree on a weighted CSV dataset.
    Grow(GrowArgs),
    /// Curve samples and split chords for plotting (CSV).
    Plotdata(PlotArgs),
    /// Run an invariant suite and report pass/fail.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct CatalogArgs {
    /// Describe this spec instead of the catalog.
    #[arg(long = "fn")]
    pub function: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TieArg {
    MaxRight,
    MinLeft,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct SplitArgs {
    #[arg(long = "fn")]
    pub function: String,
    /// Node positive prevalence.
    #[arg(long)]
    pub c: f64,
    /// Comma-separated `a:b` pairs.
    #[arg(long)]
    pub candidates: String,
    /// Node total weight.
    #[arg(long, default_value_t = 1.0)]
    pub weight: f64,
    #[arg(long, value_enum, default_value_t = TieArg::MaxRight)]
    pub tie: TieArg,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct CompareArgs {
    #[arg(long)]
    pub f: String,
    #[arg(long)]
    pub g: String,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = impurity_core::DEFAULT_GRID)]
    pub grid: usize,
    #[arg(long, default_value_t = impurity_core::purity::DEFAULT_RATIO_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct TransformArgs {
    #[arg(long = "fn")]
    pub function: String,
    #[arg(long)]
    pub w: f64,
    /// Print only the resulting spec.
    #[arg(long)]
    pub raw: bool,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct GprofileArgs {
    #[arg(long = "fn")]
    pub function: String,
    #[arg(long, default_value_t = impurity_core::DEFAULT_GRID)]
    pub grid: usize,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct RealizeArgs {
    #[arg(long)]
    pub c: f64,
    /// First split as `a:b` (left/right half-planes).
    #[arg(long)]
    pub s1: String,
    /// Second split as `a:b` (upper/lower half-planes).
    #[arg(long)]
    pub s2: String,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct GrowArgs {
    /// CSV with header `x,y,label,weight`.
    #[arg(long, required_unless_present = "mixture")]
    pub data: Option<PathBuf>,
    /// Generate data from a mixture config: `two-cluster` or a JSON path.
    #[arg(long, conflicts_with = "data")]
    pub mixture: Option<String>,
    #[arg(long = "fn")]
    pub function: String,
    #[arg(long, default_value_t = 1.0)]
    pub class1_weight: f64,
    #[arg(long, default_value_t = 8)]
    pub max_depth: usize,
    #[arg(long, default_value_t = 0.0)]
    pub min_leaf_weight: f64,
    /// Axes to split on: `x`, `y` or `x,y`.
    #[arg(long, default_value = "x,y")]
    pub axes: String,
    /// Grow even when the function is not concave.
    #[arg(long)]
    pub allow_improper: bool,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct PlotArgs {
    #[arg(long = "fn")]
    pub function: String,
    #[arg(long)]
    pub c: f64,
    /// Comma-separated `a:b` pairs.
    #[arg(long)]
    pub splits: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Axioms,
    Weighting,
    Purity,
    Realizer,
    Tree,
    All,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Random cases per randomized check.
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("IMPURITY_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .map_err(|_| CliError::new("usage", format!("IMPURITY_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::new("usage", e.to_string()))
}

fn run(args: Vec<String>) -> Result<ExitCode, CliError> {
    configure_threads()?;
    let args = config::expand(args)?;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return Ok(ExitCode::SUCCESS);
        }
        Err(e) => return Err(CliError::new("usage", e.to_string().trim_end())),
    };
    let out = commands::dispatch(&cli)?;
    output::emit(&out.text, cli.output.as_deref())?;
    Ok(if out.success { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn main() -> ExitCode {
    match run(std::env::args().collect()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::FAILURE
        }
    }
}
