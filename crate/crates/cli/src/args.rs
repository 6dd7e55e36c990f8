use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ldp_contraction::{LambdaChoice, Suite, SweepAxis};

use crate::input::parse_real;

#[derive(Debug, Parser)]
#[command(
    name = "ldpc",
    version,
    about = "Contraction bounds for locally private channels"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct CommonArgs {
    /// Output format; each subcommand has its own default.
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for commands that sample.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a divergence between two distributions.
    Eval(EvalArgs),
    /// Certify a channel or find its tightest privacy parameters.
    CheckLdp(CheckLdpArgs),
    /// DPI, linear and non-linear SDPI bounds on a grid of input levels.
    SdpiCurve(SdpiCurveArgs),
    /// Compare the two KL bounds along a lambda or epsilon sweep.
    KlCompare(KlCompareArgs),
    /// Bounds for compositions of n channels.
    Compose(ComposeArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DivergenceKind {
    Egamma,
    Tv,
    Dmax,
    DmaxSmooth,
    Kl,
    Fdiv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeneratorKind {
    Kl,
    Chi2,
    Tv,
    Hellinger,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, value_enum)]
    pub divergence: DivergenceKind,
    /// Comma-separated probabilities, or a file with one value per line.
    #[arg(long)]
    pub p: String,
    #[arg(long)]
    pub q: String,
    /// Order of the hockey-stick divergence, at least 1.
    #[arg(long, value_parser = parse_real)]
    pub gamma: Option<f64>,
    /// Slack of the smooth max-divergence.
    #[arg(long, value_parser = parse_real)]
    pub delta: Option<f64>,
    /// Generator for `fdiv`.
    #[arg(long = "f", value_enum)]
    pub generator: Option<GeneratorKind>,
    /// Evaluate `fdiv` through its hockey-stick integral instead of the sum.
    #[arg(long)]
    pub integral: bool,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("budget").required(true).multiple(true).args(["eps", "delta"]))]
pub struct CheckLdpArgs {
    /// JSON file holding the channel as an array of rows.
    #[arg(long)]
    pub channel: PathBuf,
    #[arg(long, value_parser = parse_real)]
    pub eps: Option<f64>,
    #[arg(long, value_parser = parse_real)]
    pub delta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SdpiCurveArgs {
    #[arg(long, value_parser = parse_real)]
    pub eps: f64,
    #[arg(long, value_parser = parse_real)]
    pub delta: f64,
    #[arg(long, value_parser = parse_real)]
    pub gamma_prime: f64,
    /// Number of evenly spaced points on [0, 1].
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct KlCompareArgs {
    #[arg(long, value_enum, default_value = "lambda")]
    pub axis: AxisArg,
    /// Epsilon values, one family each on the lambda axis.
    #[arg(long, value_parser = parse_real, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    /// Delta values, one family each on the epsilon axis; a single value on
    /// the lambda axis.
    #[arg(long, value_parser = parse_real, value_delimiter = ',')]
    pub delta: Option<Vec<f64>>,
    #[arg(long, value_parser = parse_real)]
    pub tau: Option<f64>,
    /// Fixed lambda = m on the epsilon axis.
    #[arg(long, value_parser = parse_real)]
    pub lambda: Option<f64>,
    /// Lower end of the swept range.
    #[arg(long, value_parser = parse_real)]
    pub from: Option<f64>,
    /// Upper end of the swept range.
    #[arg(long, value_parser = parse_real)]
    pub to: Option<f64>,
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    Lambda,
    Epsilon,
}

impl From<AxisArg> for SweepAxis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::Lambda => SweepAxis::Lambda,
            AxisArg::Epsilon => SweepAxis::Epsilon,
        }
    }
}

#[derive(Debug, Args)]
pub struct ComposeArgs {
    #[arg(long, value_parser = parse_real)]
    pub eps: f64,
    #[arg(long, value_parser = parse_real)]
    pub delta: f64,
    #[arg(long, value_parser = parse_real)]
    pub gamma_prime: f64,
    #[arg(long, default_value_t = 5)]
    pub n_max: u32,
    /// Number of evenly spaced points on [0, 1].
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LambdaArg {
    Input,
    Pair,
    Channel,
}

impl From<LambdaArg> for LambdaChoice {
    fn from(a: LambdaArg) -> Self {
        match a {
            LambdaArg::Input => LambdaChoice::Input,
            LambdaArg::Pair => LambdaChoice::Pair,
            LambdaArg::Channel => LambdaChoice::Channel,
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_parser = |s: &str| s.parse::<Suite>().map_err(|e| e.to_string()))]
    pub suite: Suite,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    /// Pin every trial to this epsilon (requires --delta).
    #[arg(long, value_parser = parse_real, requires = "delta")]
    pub eps: Option<f64>,
    #[arg(long, value_parser = parse_real, requires = "eps")]
    pub delta: Option<f64>,
    #[arg(long, value_parser = parse_real)]
    pub gamma_prime: Option<f64>,
    /// Largest alphabet drawn.
    #[arg(long)]
    pub max_size: Option<usize>,
    /// Distribution pairs per sampled channel.
    #[arg(long)]
    pub pairs: Option<usize>,
    /// Channels per chain in the composition suite.
    #[arg(long)]
    pub depth: Option<u32>,
    /// Rule for lambda in the f-divergence suite.
    #[arg(long, value_enum)]
    pub lambda: Option<LambdaArg>,
    /// Skip the chi-squared bound in the f-divergence suite.
    #[arg(long)]
    pub no_chi_squared: bool,
    /// Run trials on the calling thread.
    #[arg(long)]
    pub sequential: bool,
}
