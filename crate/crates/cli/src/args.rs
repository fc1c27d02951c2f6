use std::path::PathBuf;

use biomedner::matcher::EncoderMode;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{ClientKind, EncoderKind, Phase};

/// Biomedical NER pipeline: corpus curation, synthetic annotation,
/// span-matching models and evaluation.
#[derive(Debug, Parser)]
#[command(name = "biomedner", version, propagate_version = true)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML configuration file; flags take precedence over its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Seed for every random choice.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply the quality filters and write accepted passages plus a per-passage report.
    Filter(FilterArgs),
    /// Remove near-duplicate passages using TF-IDF cosine similarity.
    Dedup(DedupArgs),
    /// Draw a source-stratified sample.
    Sample(SampleArgs),
    /// Split annotated passages into chunks within a subword budget.
    Chunk(ChunkArgs),
    /// Annotate a corpus with a teacher and a student LLM.
    Annotate(AnnotateArgs),
    /// Train the span scoring head on annotated passages.
    TrainHead(TrainHeadArgs),
    /// Predict entity spans with a trained head.
    Predict(PredictArgs),
    /// Score predictions against gold annotations.
    Evaluate(EvaluateArgs),
    /// One-sided Wilcoxon signed-rank test of per-passage F1 (A better than B).
    Compare(CompareArgs),
    /// Draw N-shot training and validation subsets.
    Fewshot(FewshotArgs),
    /// Measure inference throughput over batch sizes.
    Bench(BenchArgs),
    /// Serve the toy encoder over the embedding provider protocol on stdin/stdout.
    #[command(hide = true)]
    ServeToyEncoder(ServeArgs),
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[arg(long = "in", value_name = "JSONL")]
    pub input: PathBuf,
    #[arg(long, value_name = "JSONL")]
    pub out: PathBuf,
    /// Per-passage verdicts (default: <out>.report.jsonl).
    #[arg(long, value_name = "JSONL")]
    pub report: Option<PathBuf>,
    /// Fail on the first malformed input line instead of skipping it.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct DedupArgs {
    #[arg(long = "in", value_name = "JSONL")]
    pub input: PathBuf,
    #[arg(long, value_name = "JSONL")]
    pub out: PathBuf,
    /// Cluster report (default: <out>.clusters.jsonl).
    #[arg(long, value_name = "JSONL")]
    pub clusters: Option<PathBuf>,
    /// Cosine similarity an edge must exceed.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Deduplicate each source independently (the default).
    #[arg(long, conflicts_with = "cross_source")]
    pub per_source: bool,
    /// Treat the whole corpus as one group.
    #[arg(long)]
    pub cross_source: bool,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long = "in", value_name = "JSONL")]
    pub input: PathBuf,
    #[arg(long, value_name = "JSONL")]
    pub out: PathBuf,
    /// Number of passages to draw.
    #[arg(long)]
    pub total: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ChunkArgs {
    /// Annotated JSONL.
    #[arg(long = "in", value_name = "JSONL")]
    pub input: PathBuf,
    #[arg(long, value_name = "JSONL")]
    pub out: PathBuf,
    /// Subword budget per chunk.
    #[arg(long)]
    pub budget: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AnnotateArgs {
    #[arg(long = "in", value_name = "JSONL")]
    pub input: PathBuf,
    /// Directory for the annotated, teacher fine-tuning and checkpoint files.
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,
    /// File name stem inside the output directory.
    #[arg(long, default_value = "annotated")]
    pub stem: String,
    #[arg(long, value_enum)]
    pub client: Option<ClientKind>,
    /// Passages sent to the teacher; the rest go to the student.
    #[arg(long)]
    pub teacher_n: Option<usize>,
    #[arg(long)]
    pub teacher_url: Option<String>,
    #[arg(long)]
    pub teacher_model: Option<String>,
    #[arg(long)]
    pub student_url: Option<String>,
    #[arg(long)]
    pub student_model: Option<String>,
    /// Environment variable holding the API key.
    #[arg(long)]
    pub api_key_env: Option<String>,
    #[arg(long)]
    pub max_in_flight: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct MatcherArgs {
    #[arg(long)]
    pub max_width: Option<usize>,
    #[arg(long, value_enum)]
    pub encoder: Option<EncoderKind>,
    /// Embedding width of the encoder.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Program and arguments of a process encoder; takes the rest of the
    /// command line, so it must come last.
    #[arg(long, num_args = 1.., allow_hyphen_values = true, value_name = "ARG")]
    pub encoder_cmd: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct TrainHeadArgs {
    /// Encoder configuration: uni (joint) or bi (separate, cached labels).
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<EncoderMode>,
    /// Annotated training JSONL.
    #[arg(long, value_name = "JSONL")]
    pub train: PathBuf,
    /// Output head file.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    #[command(flatten)]
    pub matcher: MatcherArgs,
    #[arg(long)]
    pub hidden: Option<usize>,
    #[arg(long, value_enum)]
    pub phase: Option<Phase>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Head learning rate.
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub weight_decay: Option<f64>,
}

#[derive(Debug, Args)]
#[group(id = "label_source", required = true, multiple = false)]
pub struct LabelArgs {
    /// Comma-separated entity types.
    #[arg(long, value_delimiter = ',', group = "label_source")]
    pub labels: Option<Vec<String>>,
    /// File with one entity type per line.
    #[arg(long, value_name = "FILE", group = "label_source")]
    pub label_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Encoder configuration: uni (joint) or bi (separate, cached labels).
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<EncoderMode>,
    /// Passages JSONL (annotated files are accepted; their spans are ignored).
    #[arg(long = "in", value_name = "JSONL")]
    pub input: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub head: PathBuf,
    #[arg(long, value_name = "JSONL")]
    pub out: PathBuf,
    #[command(flatten)]
    pub labels: LabelArgs,
    #[command(flatten)]
    pub matcher: MatcherArgs,
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long, value_name = "JSONL")]
    pub gold: PathBuf,
    #[arg(long, value_name = "JSONL")]
    pub pred: PathBuf,
    /// Report JSON (default: standard output).
    #[arg(long, value_name = "JSON")]
    pub out: Option<PathBuf>,
    /// Per-passage F1 series as {"id","f1"} lines.
    #[arg(long, value_name = "JSONL")]
    pub per_passage: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Per-passage F1 JSONL of system A, or its predictions when --gold is given.
    #[arg(long, value_name = "JSONL")]
    pub a: PathBuf,
    #[arg(long, value_name = "JSONL")]
    pub b: PathBuf,
    /// Gold annotations; switches --a/--b to prediction files.
    #[arg(long, value_name = "JSONL")]
    pub gold: Option<PathBuf>,
    /// Result JSON (default: standard output).
    #[arg(long, value_name = "JSON")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FewshotArgs {
    /// Annotated training split.
    #[arg(long = "in", value_name = "JSONL")]
    pub input: PathBuf,
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,
    /// Subset sizes (default 10, 20, 50).
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchLabels {
    /// The configured dataset-specific label set.
    Dataset,
    /// All 127 UMLS semantic types.
    Full127,
    Both,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long = "in", value_name = "JSONL")]
    pub input: PathBuf,
    /// CSV report.
    #[arg(long, value_name = "CSV")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    pub labels: BenchLabels,
    /// Encoder modes to measure.
    #[arg(long, value_delimiter = ',', value_parser = parse_mode, default_value = "uni,bi")]
    pub modes: Vec<EncoderMode>,
    /// Trained head; a seeded random head is used when absent.
    #[arg(long, value_name = "FILE")]
    pub head: Option<PathBuf>,
    #[arg(long)]
    pub hidden: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub batch_sizes: Option<Vec<usize>>,
    #[command(flatten)]
    pub matcher: MatcherArgs,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 64)]
    pub dim: usize,
    #[arg(long, default_value_t = 0)]
    pub encoder_seed: u64,
}

fn parse_mode(s: &str) -> Result<EncoderMode, String> {
    EncoderMode::parse(s).ok_or_else(|| format!("unknown mode {s:?} (expected uni or bi)"))
}
