//! Pipeline configuration: a TOML file whose values command-line flags
//! override. The effective configuration of every run is echoed next to its
//! primary output.

use std::path::{Path, PathBuf};

use biomedner::matcher::{EncoderMode, DEFAULT_MAX_WIDTH, DEFAULT_THRESHOLD};
use biomedner::quality::{GeneralThresholds, RegimenThresholds};
use serde::{Deserialize, Serialize};

use crate::failure::Failure;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub seed: u64,
    /// Worker threads; all cores when absent.
    pub workers: Option<usize>,
    pub quality: QualityConfig,
    pub dedup: DedupConfig,
    pub sample: SampleConfig,
    pub chunk: ChunkConfig,
    pub annotate: AnnotateConfig,
    pub matcher: MatcherConfig,
    pub train: TrainSettings,
    pub eval: EvalConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QualityConfig {
    pub general: GeneralThresholds,
    pub regimen: RegimenThresholds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DedupConfig {
    pub threshold: f64,
    pub per_source: bool,
}

impl Default for DedupConfig {
    fn default() -> Self {
        Self { threshold: biomedner::dedup::DEFAULT_THRESHOLD, per_source: true }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleConfig {
    pub total: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChunkConfig {
    pub budget: usize,
}

impl Default for ChunkConfig {
    fn default() -> Self {
        Self { budget: biomedner::corpus::DEFAULT_CHUNK_BUDGET }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ClientKind {
    /// OpenAI-compatible chat-completions endpoint.
    Http,
    /// Offline client that types every candidate; for tests and dry runs.
    Mock,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Endpoint {
    pub base_url: String,
    pub model: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnnotateConfig {
    pub client: ClientKind,
    pub teacher: Endpoint,
    pub student: Endpoint,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
    pub teacher_n: usize,
    pub max_in_flight: usize,
    /// Entity types the mock client assigns.
    pub mock_types: Vec<String>,
}

impl Default for AnnotateConfig {
    fn default() -> Self {
        Self {
            client: ClientKind::Http,
            teacher: Endpoint::default(),
            student: Endpoint::default(),
            api_key_env: "OPENAI_API_KEY".into(),
            teacher_n: biomedner::annotate::DEFAULT_TEACHER_N,
            max_in_flight: 4,
            mock_types: vec!["chemical".into(), "disease".into(), "gene".into()],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EncoderKind {
    /// Deterministic hashed-vector encoder bundled with the library.
    Toy,
    /// External process speaking the embedding provider protocol.
    Process,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EncoderConfig {
    pub kind: EncoderKind,
    pub dim: usize,
    /// Seed of the toy encoder's token vectors.
    pub seed: u64,
    /// Program and arguments of a process encoder.
    pub command: Vec<String>,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        Self { kind: EncoderKind::Toy, dim: 64, seed: 0, command: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MatcherConfig {
    pub mode: EncoderMode,
    pub threshold: f64,
    pub max_width: usize,
    pub hidden: usize,
    pub encoder: EncoderConfig,
}

impl Default for MatcherConfig {
    fn default() -> Self {
        Self {
            mode: EncoderMode::Bi,
            threshold: DEFAULT_THRESHOLD,
            max_width: DEFAULT_MAX_WIDTH,
            hidden: 128,
            encoder: EncoderConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Pretraining,
    PostTraining,
}

/// Overrides on top of the phase defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainSettings {
    pub phase: Phase,
    pub steps: Option<usize>,
    pub batch_size: Option<usize>,
    pub lr_head: Option<f64>,
    pub weight_decay: Option<f64>,
}

impl Default for TrainSettings {
    fn default() -> Self {
        Self { phase: Phase::Pretraining, steps: None, batch_size: None, lr_head: None, weight_decay: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalConfig {
    pub nshot: Vec<usize>,
    pub bench_batch_sizes: Vec<usize>,
    /// Label set for the dataset-specific benchmark configuration.
    pub dataset_labels: Vec<String>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            nshot: vec![10, 20, 50],
            bench_batch_sizes: biomedner::eval::default_batch_sizes(),
            dataset_labels: vec!["chemical".into(), "disease".into(), "gene".into()],
        }
    }
}

impl PipelineConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Failure::usage(format!("invalid config {}: {e}", path.display())))
    }

    /// Checks every threshold against its documented range.
    pub fn validate(&self) -> Result<(), Failure> {
        let bad = |m: String| Err(Failure::Usage(m));
        self.quality.general.validate().map_err(|e| Failure::usage(format!("quality.general: {e}")))?;
        if self.quality.regimen.min_well_formed_sentences == 0 {
            return bad("quality.regimen.min_well_formed_sentences must be positive".into());
        }
        let t = self.dedup.threshold;
        if !(t > 0.0 && t <= 1.0) {
            return bad(format!("dedup.threshold must lie in (0, 1], got {t}"));
        }
        if self.sample.total == Some(0) {
            return bad("sample.total must be positive".into());
        }
        if self.chunk.budget == 0 {
            return bad("chunk.budget must be positive".into());
        }
        if self.annotate.max_in_flight == 0 {
            return bad("annotate.max_in_flight must be positive".into());
        }
        if self.annotate.mock_types.is_empty() {
            return bad("annotate.mock_types must not be empty".into());
        }
        let m = &self.matcher;
        if !(m.threshold > 0.0 && m.threshold < 1.0) {
            return bad(format!("matcher.threshold must lie in (0, 1), got {}", m.threshold));
        }
        if m.max_width == 0 || m.hidden == 0 || m.encoder.dim == 0 {
            return bad("matcher.max_width, matcher.hidden and matcher.encoder.dim must be positive".into());
        }
        if m.encoder.kind == EncoderKind::Process && m.encoder.command.is_empty() {
            return bad("matcher.encoder.command is required for a process encoder".into());
        }
        let tr = &self.train;
        if tr.steps == Some(0) || tr.batch_size == Some(0) {
            return bad("train.steps and train.batch_size must be positive".into());
        }
        if tr.lr_head.is_some_and(|lr| !(lr > 0.0 && lr.is_finite())) {
            return bad("train.lr_head must be positive".into());
        }
        if tr.weight_decay.is_some_and(|wd| !(wd >= 0.0 && wd.is_finite())) {
            return bad("train.weight_decay must be non-negative".into());
        }
        if self.eval.nshot.contains(&0) || self.eval.bench_batch_sizes.contains(&0) {
            return bad("eval.nshot and eval.bench_batch_sizes entries must be positive".into());
        }
        if self.seed > i64::MAX as u64 {
            return bad("seed must fit in a signed 64-bit integer".into());
        }
        Ok(())
    }

    /// Writes `<output>.config.toml`.
    pub fn write_sidecar(&self, output: &Path) -> Result<PathBuf, Failure> {
        let path = sidecar_path(output, "config.toml");
        let text = toml::to_string_pretty(self).map_err(|e| Failure::usage(format!("cannot serialize config: {e}")))?;
        std::fs::write(&path, text)?;
        Ok(path)
    }
}

/// `<path>.<suffix>`, keeping the original file name intact.
pub fn sidecar_path(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".");
    name.push(suffix);
    path.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let cfg = PipelineConfig::default();
        cfg.validate().unwrap();
        let text = toml::to_string_pretty(&cfg).unwrap();
        let back: PipelineConfig = toml::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<PipelineConfig>("[dedup]\nthreshhold = 0.8\n").is_err());
        assert!(toml::from_str::<PipelineConfig>("colour = 1\n").is_err());
    }

    #[test]
    fn partial_files_fill_defaults() {
        let cfg: PipelineConfig = toml::from_str("seed = 7\n[matcher]\nmode = \"uni\"\n").unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.matcher.mode, EncoderMode::Uni);
        assert_eq!(cfg.dedup.threshold, 0.9);
    }

    #[test]
    fn out_of_range_thresholds_fail_validation() {
        let mut cfg = PipelineConfig::default();
        cfg.dedup.threshold = 1.5;
        assert!(matches!(cfg.validate(), Err(Failure::Usage(_))));
        let mut cfg = PipelineConfig::default();
        cfg.matcher.threshold = 1.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn sidecar_keeps_the_file_name() {
        assert_eq!(sidecar_path(Path::new("out/kept.jsonl"), "config.toml"), Path::new("out/kept.jsonl.config.toml"));
    }
}
