//! `docsmell`: detect API documentation smells from the command line.
//!
//! Exit status is 0 on success, 1 on data or model errors and 2 on usage
//! errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use docsmell_core::ThresholdSelector;

#[derive(Parser, Debug)]
#[command(name = "docsmell", version, about = "Detect API documentation smells")]
struct Cli {
    /// Word list used by the jargon metric, one word per line.
    #[arg(long, global = true, env = "DOCSMELL_LEXICON")]
    lexicon: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a canonical JSONL corpus from JSONL or Javadoc HTML.
    Ingest(IngestArgs),
    /// Compute the six text metrics for every unit.
    Metrics(MetricsArgs),
    /// Flag smells with percentile rules or a trained model.
    Detect(DetectArgs),
    /// Fit rules or train a learner and save it as JSON.
    Train(TrainArgs),
    /// Cross-validate rule and learned detectors.
    Crossval(CrossvalArgs),
    /// Label distribution, phi correlations and rater agreement.
    Stats(StatsArgs),
    /// Render a saved cross-validation result.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct IngestArgs {
    /// JSONL corpus to normalize.
    #[arg(long, required_unless_present = "javadoc_dir", conflicts_with = "javadoc_dir")]
    jsonl: Option<PathBuf>,
    /// Root of offline Javadoc pages; `.html` files are read recursively.
    #[arg(long)]
    javadoc_dir: Option<PathBuf>,
    /// Output file (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MetricsArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DetectArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Fit thresholds on the corpus with this selector.
    #[arg(long, value_parser = parse_selector, required_unless_present = "model", conflicts_with = "model")]
    rules: Option<ThresholdSelector>,
    /// Model file written by `train`.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Report file (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModelKind {
    Rules,
    Ovr,
    Cc,
    Lps,
    Mlknn,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FeatureChoice {
    /// Standardized metric values.
    Rules,
    /// Bag-of-words counts.
    Bow,
    /// Metric values followed by bag-of-words counts.
    Combined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ChainOrderArg {
    Fixed,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Md,
}

#[derive(Args, Debug, Clone)]
struct LearnerArgs {
    /// L2 regularization of the linear learner.
    #[arg(long, default_value_t = 1e-3)]
    lambda: f64,
    #[arg(long, default_value_t = 20)]
    epochs: usize,
    /// Neighbourhood size for ML-kNN.
    #[arg(long, default_value_t = 10)]
    neighbors: usize,
    /// Laplace smoothing for ML-kNN.
    #[arg(long, default_value_t = 1.0)]
    smoothing: f64,
    #[arg(long, value_enum, default_value_t = ChainOrderArg::Fixed)]
    chain_order: ChainOrderArg,
    /// Minimum document frequency of a bag-of-words token.
    #[arg(long, default_value_t = 2)]
    min_df: usize,
    /// Vocabulary size cap.
    #[arg(long, default_value_t = 5000)]
    max_features: usize,
    /// Use (100 - p) percentiles for the downward rules.
    #[arg(long)]
    mirrored: bool,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, value_enum)]
    model: ModelKind,
    #[arg(long, value_enum, default_value_t = FeatureChoice::Rules)]
    features: FeatureChoice,
    /// Threshold selector for `--model rules`.
    #[arg(long, value_parser = parse_selector, default_value = "p90")]
    selector: ThresholdSelector,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    learner: LearnerArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct CrossvalArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Detectors to evaluate; repeat or separate with commas.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "rules")]
    model: Vec<ModelKind>,
    /// Feature sets for the learners.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "rules,bow")]
    features: Vec<FeatureChoice>,
    /// Threshold selectors for the rules: `all` or a list such as `p25,p90`.
    #[arg(long, default_value = "all")]
    selectors: String,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Also measure permutation importance of the metric columns for OVR.
    #[arg(long)]
    importance: bool,
    #[arg(long, default_value_t = docsmell_core::eval::DEFAULT_REPEATS)]
    repeats: usize,
    #[command(flatten)]
    learner: LearnerArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Writes `<out>.json` and `<out>.md` instead of printing.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct StatsArgs {
    /// Labeled corpus to describe.
    #[arg(long, required_unless_present = "kappa", conflicts_with = "kappa")]
    corpus: Option<PathBuf>,
    /// Two annotations of the same units; prints kappa per smell.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    kappa: Option<Vec<PathBuf>>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// JSON written by `crossval`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Md)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_selector(s: &str) -> Result<ThresholdSelector, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.is::<commands::UsageError>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
