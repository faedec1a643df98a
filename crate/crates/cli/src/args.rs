use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::CONFIG_ENV;

#[derive(Debug, Parser)]
#[command(
    name = "swapsched",
    version,
    about = "Battery swap station demand estimation and charge scheduling"
)]
pub struct Cli {
    /// TOML file with default parameters.
    #[arg(long, global = true, env = CONFIG_ENV)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate hourly swap demand from charging sessions; writes demand.csv.
    Estimate(EstimateArgs),
    /// Score a demand series for trend stability, periodicity and outliers.
    Metrics(MetricsArgs),
    /// Search for a cheap 24-hour charging plan; writes plan.json and convergence.csv.
    Optimize(OptimizeArgs),
    /// Evaluate the charge-on-return plan; writes plan.json.
    Baseline(BaselineArgs),
    /// Compare two initialization strategies over regions and seeds.
    Compare(CompareArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Output directory, created if missing.
    #[arg(long, short, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Sessions CSV.
    #[arg(long)]
    pub sessions: PathBuf,
    /// Prices CSV with `hour,price` columns; a flat price of 1 when omitted.
    #[arg(long)]
    pub prices: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub price_kind: Option<PriceKindArg>,
    /// Logistic weights for (duration minutes, energy kWh, swap time).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub theta: Option<Vec<f64>>,
    /// Swap duration in minutes.
    #[arg(long)]
    pub swap_time: Option<f64>,
    /// Share of demand assigned to battery type A.
    #[arg(long)]
    pub ratio_a: Option<f64>,
    #[arg(long, value_enum)]
    pub lambda_smoothing: Option<SmoothingArg>,
    /// Keep only sessions from this region.
    #[arg(long)]
    pub region: Option<String>,
    /// Largest tolerated fraction of malformed rows.
    #[arg(long)]
    pub max_reject_fraction: Option<f64>,
    #[arg(long)]
    pub start_column: Option<String>,
    #[arg(long)]
    pub duration_column: Option<String>,
    #[arg(long)]
    pub end_column: Option<String>,
    #[arg(long)]
    pub energy_column: Option<String>,
    #[arg(long)]
    pub region_column: Option<String>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// demand.csv written by `estimate`.
    #[arg(long)]
    pub demand: PathBuf,
    /// Trend window in hours.
    #[arg(long)]
    pub window: Option<usize>,
    /// Expected periods in hours.
    #[arg(long, value_delimiter = ',')]
    pub periods: Option<Vec<f64>>,
    /// Number of spectral peaks considered.
    #[arg(long)]
    pub top_k: Option<usize>,
    #[command(flatten)]
    pub out: OutArgs,
}

/// Where the 24-hour demand profile comes from.
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct SourceArgs {
    /// demand.csv written by `estimate`.
    #[arg(long)]
    pub demand: Option<PathBuf>,
    /// Seeded synthetic demand-intensive region.
    #[arg(long)]
    pub synthetic: Option<u64>,
    /// Built-in profile with a deep overnight price valley.
    #[arg(long)]
    pub valley: bool,
}

#[derive(Debug, Args)]
pub struct StationArgs {
    /// Type-A battery count.
    #[arg(long)]
    pub m_a: Option<u32>,
    /// Type-B battery count.
    #[arg(long)]
    pub m_b: Option<u32>,
    /// Satisfaction floor.
    #[arg(long)]
    pub tau_s: Option<f64>,
    /// Penalty below the floor.
    #[arg(long)]
    pub tau_1: Option<f64>,
    #[arg(long, value_enum)]
    pub satisfaction: Option<SatisfactionArg>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub population: Option<usize>,
    #[arg(long)]
    pub crossover: Option<f64>,
    /// Per-gene mutation trigger probability.
    #[arg(long)]
    pub mutation: Option<f64>,
    /// Generations, counting the initial population.
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub tournament: Option<usize>,
    #[arg(long)]
    pub elitism: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// First hour of the 24-hour window within demand.csv.
    #[arg(long, default_value_t = 0)]
    pub start: usize,
    #[command(flatten)]
    pub station: StationArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub strategy: Option<StrategyArg>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, default_value_t = 0)]
    pub start: usize,
    #[command(flatten)]
    pub station: StationArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Region demand files; repeat for several regions.
    #[arg(long)]
    pub demand: Vec<PathBuf>,
    /// Add this many seeded synthetic regions.
    #[arg(long)]
    pub synthetic: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub start: usize,
    /// GA seeds run for every region and strategy.
    #[arg(long, value_delimiter = ',', default_values_t = [0, 1, 2, 3, 4])]
    pub seeds: Vec<u64>,
    /// The two strategies compared, first against second.
    #[arg(long, value_delimiter = ',', value_enum, default_values_t = [StrategyArg::Lru, StrategyArg::Uniform])]
    pub strategies: Vec<StrategyArg>,
    #[command(flatten)]
    pub station: StationArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// manifest.json from an earlier run.
    pub manifest: PathBuf,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PriceKindArg {
    Daily,
    Horizon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SmoothingArg {
    None,
    HourOfWeek,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SatisfactionArg {
    /// Add gamma to the objective.
    Gamma,
    /// Add 1 - gamma to the objective.
    OneMinusGamma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Lru,
    Uniform,
}
