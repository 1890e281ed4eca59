use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "chen-censor",
    version,
    about = "Chen lifetime model under improved adaptive Type-II progressive censoring",
    args_override_self = true
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Flat `key = value` file; keys are long flag names. Flags on the
    /// command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    pub format: Format,

    /// Master seed.
    #[arg(long, global = true, env = "CHEN_CENSOR_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Write the report here instead of stdout. Nothing is written on error.
    #[arg(long, short, global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate censored experiments.
    Sample(SampleArgs),
    /// Maximum likelihood fit with Wald intervals.
    Fit(FitArgs),
    /// Bayes estimates under SEL, LINEX and entropy loss.
    Bayes(BayesArgs),
    /// Monte Carlo study of bias, MSE and interval coverage.
    ///
    /// CSV columns: scenario, n, m, scheme, t1, t2, estimator, parameter,
    /// loss, truth, mean, bias, mse, variance, bias_se, coverage,
    /// avg_length, used, failed, case1, case2, case3.
    Study(StudyArgs),
    /// Kolmogorov-Smirnov and Anderson-Darling tests on complete data.
    Gof(GofArgs),
}

/// Censoring plan. Removals come from `--scheme` or `--removals`.
#[derive(Debug, Args, Clone)]
pub struct PlanArgs {
    /// Units on test.
    #[arg(long)]
    pub n: Option<usize>,

    /// Planned number of failures.
    #[arg(long)]
    pub m: Option<usize>,

    #[arg(long, value_parser = ["I", "II", "III", "IV", "i", "ii", "iii", "iv"], conflicts_with = "removals")]
    pub scheme: Option<String>,

    /// Comma-separated removal counts, one per planned failure.
    #[arg(long, value_delimiter = ',')]
    pub removals: Option<Vec<usize>>,

    /// Time after which no more units are withdrawn.
    #[arg(long)]
    pub t1: Option<f64>,

    /// Time at which the test is stopped.
    #[arg(long)]
    pub t2: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub plan: PlanArgs,

    #[arg(long)]
    pub alpha: f64,

    #[arg(long)]
    pub beta: f64,

    /// Number of experiments.
    #[arg(long, default_value_t = 1)]
    pub count: usize,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Failure-time file, or `builtin:devices30`.
    #[arg(long)]
    pub data: String,

    #[command(flatten)]
    pub plan: PlanArgs,
}

#[derive(Debug, Args)]
pub struct MleArgs {
    #[arg(long, default_value_t = 1.0)]
    pub beta_init: f64,

    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,

    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,

    #[command(flatten)]
    pub mle: MleArgs,

    /// Confidence level of the Wald intervals.
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,

    /// Emit the fitted hazard, density and survival on this many points.
    #[arg(long, value_name = "POINTS")]
    pub hazard_grid: Option<usize>,
}

#[derive(Debug, Args, Clone)]
pub struct PriorArgs {
    #[arg(long = "a", default_value_t = 2.0)]
    pub a: f64,
    #[arg(long = "b", default_value_t = 2.0)]
    pub b: f64,
    #[arg(long = "c", default_value_t = 2.0)]
    pub c: f64,
    #[arg(long = "d", default_value_t = 2.0)]
    pub d: f64,
}

#[derive(Debug, Args, Clone)]
pub struct LossArgs {
    /// LINEX shape.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub g: f64,

    /// Entropy-loss power.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub q: f64,
}

#[derive(Debug, Args, Clone)]
pub struct SamplerArgs {
    #[arg(long, default_value_t = 11_000)]
    pub chain_length: usize,

    #[arg(long, default_value_t = 1_000)]
    pub burn_in: usize,

    /// Random-walk scale for beta (default: a tenth of the starting beta).
    #[arg(long)]
    pub proposal_sd: Option<f64>,

    /// Importance-sampling draws.
    #[arg(long, default_value_t = 10_000)]
    pub draws: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Sampler {
    Mh,
    Is,
}

#[derive(Debug, Args)]
pub struct BayesArgs {
    #[command(flatten)]
    pub data: DataArgs,

    #[arg(long, value_enum, default_value_t = Sampler::Mh)]
    pub sampler: Sampler,

    #[command(flatten)]
    pub prior: PriorArgs,

    #[command(flatten)]
    pub loss: LossArgs,

    #[command(flatten)]
    pub sampler_opts: SamplerArgs,

    /// Write the full chain or weighted draws as CSV.
    #[arg(long, value_name = "FILE")]
    pub dump_chain: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    /// Run the 24-scenario grid instead of a single scenario.
    #[arg(long)]
    pub paper_grid: bool,

    /// List the scenarios without simulating.
    #[arg(long)]
    pub dry_run: bool,

    #[command(flatten)]
    pub plan: PlanArgs,

    /// True alpha of a single scenario.
    #[arg(long, default_value_t = 0.2)]
    pub alpha: f64,

    /// True beta of a single scenario.
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,

    #[arg(long, default_value_t = 2000)]
    pub reps: usize,

    /// Worker threads (default: logical cores).
    #[arg(long)]
    pub workers: Option<usize>,

    /// Comma-separated subset of mle, mh, is.
    #[arg(long, value_delimiter = ',', default_value = "mle,mh,is")]
    pub estimators: Vec<String>,

    #[arg(long, default_value_t = 0.95)]
    pub level: f64,

    #[command(flatten)]
    pub prior: PriorArgs,

    #[command(flatten)]
    pub loss: LossArgs,

    #[command(flatten)]
    pub sampler_opts: SamplerArgs,
}

#[derive(Debug, Args)]
pub struct GofArgs {
    /// Complete-sample failure-time file, or `builtin:devices30`.
    #[arg(long)]
    pub data: String,

    /// Bootstrap replications (at least 100).
    #[arg(long, default_value_t = 2000)]
    pub reps: usize,

    /// Test a fully specified Chen law instead of the fitted one; needs
    /// `--beta` too.
    #[arg(long, requires = "beta")]
    pub alpha: Option<f64>,

    #[arg(long, requires = "alpha")]
    pub beta: Option<f64>,
}
