use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use benford_smooth::benford::DigitPolicy;
use benford_smooth::mc::{DESK_NULL_REPLICATIONS, DESK_POWER_REPLICATIONS};
use benford_smooth::statistic::Calibration;

#[derive(Debug, Parser)]
#[command(name = "benford-smooth", version, about = "Smooth goodness-of-fit tests for Benford's law")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test a data file for conformance to Benford's law.
    Analyze(AnalyzeArgs),
    /// Draw first digits from an alternative family.
    Sample(SampleArgs),
    /// Monte-Carlo critical values, optionally cached.
    CriticalValues(CriticalArgs),
    /// Simulated power curves for one family.
    Power(PowerArgs),
    /// All six power panels plus a manifest.
    Figure1(FigureArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Strict,
    Absolute,
    SkipInvalid,
}

impl From<PolicyArg> for DigitPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Strict => DigitPolicy::Strict,
            PolicyArg::Absolute => DigitPolicy::Absolute,
            PolicyArg::SkipInvalid => DigitPolicy::SkipInvalid,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CalibrationArg {
    Auto,
    Asymptotic,
    Mc,
}

impl From<CalibrationArg> for Calibration {
    fn from(c: CalibrationArg) -> Self {
        match c {
            CalibrationArg::Auto => Calibration::Auto,
            CalibrationArg::Asymptotic => Calibration::Asymptotic,
            CalibrationArg::Mc => Calibration::MonteCarlo,
        }
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// One number per line, or a delimited file with a header when --column is given.
    pub input: PathBuf,
    /// Column name, or 1-based column index, of a delimited file.
    #[arg(long)]
    pub column: Option<String>,
    #[arg(long, default_value = ",")]
    pub delimiter: char,
    /// Comma-separated statistic ids, e.g. T2,TK5,U2,MAD,chi2.
    #[arg(long, value_delimiter = ',', conflicts_with = "full")]
    pub tests: Option<Vec<String>>,
    /// Run every available statistic.
    #[arg(long)]
    pub full: bool,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value = "auto")]
    pub calibration: CalibrationArg,
    /// Null replications for Monte-Carlo calibration.
    #[arg(long, default_value_t = DESK_NULL_REPLICATIONS)]
    pub reps: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest order considered by the data-driven statistic.
    #[arg(long, default_value_t = 5)]
    pub kmax: usize,
    #[arg(long, value_enum, default_value = "strict")]
    pub policy: PolicyArg,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Also print a human-readable table on stderr.
    #[arg(long)]
    pub table: bool,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub family: String,
    /// Family parameter (γ for contaminated2).
    #[arg(long, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Destination file; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CriticalArgs {
    /// Comma-separated statistic ids.
    #[arg(long, value_delimiter = ',', required = true)]
    pub statistic: Vec<String>,
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = DESK_NULL_REPLICATIONS)]
    pub reps: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub cache: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PowerArgs {
    #[arg(long)]
    pub family: String,
    /// Comma-separated parameter grid; the family's default grid when omitted.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub betas: Option<Vec<f64>>,
    /// Sample size; the family's reference size when omitted.
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    pub tests: Option<Vec<String>>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Replications per grid point.
    #[arg(long, default_value_t = DESK_POWER_REPLICATIONS)]
    pub reps: usize,
    /// Replications for the null critical values.
    #[arg(long, default_value_t = DESK_NULL_REPLICATIONS)]
    pub null_reps: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Destination CSV; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub cache: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[arg(long, default_value_t = DESK_POWER_REPLICATIONS)]
    pub reps: usize,
    #[arg(long, default_value_t = DESK_NULL_REPLICATIONS)]
    pub null_reps: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "figure1")]
    pub output_dir: PathBuf,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub cache: Option<PathBuf>,
}
