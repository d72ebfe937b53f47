use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cvxmetric::{Metric, Orientation};

#[derive(Debug, Parser)]
#[command(name = "cvxmetric", version, about = "Funk, Thompson and Hilbert geometry of convex bodies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// τ(x, y): how far past y the ray from x stays inside the body
    Tau(PairArgs),
    /// Funk weak metric F(x, y)
    Funk(PairArgs),
    /// Thompson metric max(F(x, y), F(y, x))
    Thompson(PairArgs),
    /// Hilbert metric (F(x, y) + F(y, x)) / 2
    Hilbert(PairArgs),
    /// Pairwise distance matrix of a point file
    Matrix(MatrixArgs),
    /// Variation bounds for convex functions with values in [m, M]
    Bounds(RangePairArgs),
    /// Check a function fixture against the variation bounds
    Certify(CertifyArgs),
    /// Extremal function attaining the bounds at a pair
    Extremal(ExtremalArgs),
    /// Minkowski gauge centered at --x, evaluated at --y
    Gauge(PairArgs),
    /// Membership of --zeta in the maximal subdifferential at --x
    Subdiff(SubdiffArgs),
    /// Run the oracle-agreement suite
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Body JSON file
    #[arg(long)]
    pub body: PathBuf,
    /// Output format (json unless noted)
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[command(flatten)]
    pub common: Common,
    /// Comma-separated coordinates
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, allow_hyphen_values = true)]
    pub y: String,
}

#[derive(Debug, Args)]
pub struct Range {
    #[arg(long, allow_hyphen_values = true)]
    pub m: f64,
    #[arg(long = "M", allow_hyphen_values = true)]
    pub big_m: f64,
}

#[derive(Debug, Args)]
pub struct RangePairArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[command(flatten)]
    pub range: Range,
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    #[command(flatten)]
    pub common: Common,
    /// CSV file, one point per row, no header
    #[arg(long)]
    pub points: PathBuf,
    #[arg(long, default_value = "hilbert")]
    pub metric: Metric,
}

#[derive(Debug, Args)]
pub struct Seed {
    #[arg(long, env = "CVXMETRIC_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// Body JSON file carrying the function under an "fn" key
    #[command(flatten)]
    pub common: Common,
    /// Check this single pair instead of seeded pairs
    #[arg(long, allow_hyphen_values = true, requires = "y")]
    pub x: Option<String>,
    #[arg(long, allow_hyphen_values = true, requires = "x")]
    pub y: Option<String>,
    /// Check pairs read from a CSV file; rows alternate x, y
    #[arg(long, conflicts_with = "x")]
    pub points: Option<PathBuf>,
    /// Number of seeded interior pairs
    #[arg(long, default_value_t = 500)]
    pub pairs: usize,
    #[command(flatten)]
    pub seed: Seed,
    /// Absolute tolerance on observed variation vs bound
    #[arg(long, default_value_t = cvxmetric::TOL_CERT)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct ExtremalArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[command(flatten)]
    pub range: Range,
    #[arg(long, default_value = "upper")]
    pub orientation: Orientation,
    /// Evaluate on an N-per-axis grid over the bounding box (dim <= 2); CSV by default
    #[arg(long)]
    pub grid: Option<usize>,
    /// Evaluate at the points of a CSV file
    #[arg(long, conflicts_with = "grid")]
    pub points: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SubdiffArgs {
    #[command(flatten)]
    pub common: Common,
    /// Base point x₀
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    /// Candidate subgradient ζ
    #[arg(long, allow_hyphen_values = true)]
    pub zeta: String,
    #[command(flatten)]
    pub range: Range,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[command(flatten)]
    pub seed: Seed,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
