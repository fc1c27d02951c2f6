//! Span matching: encoders, span enumeration, the scoring head, training and
//! decoding.
//!
//! Text is encoded either jointly with a serialized label prompt ([`EncoderMode::Uni`])
//! or separately from independently encoded, cacheable labels
//! ([`EncoderMode::Bi`]). Every span of up to `max_width` tokens is scored
//! against every label and the scores are decoded greedily into flat,
//! non-overlapping mentions.

mod decode;
mod encoder;
mod head;
mod input;
mod labels;
mod loss;
mod optim;
mod predict;
pub mod provider;
mod serialize;
mod spans;
mod train;

pub use decode::{candidates, decode, decode_spans, priority, SpanCandidate, DEFAULT_THRESHOLD};
pub use encoder::{CostCounter, CostStats, TokenEncoder, ToyEncoder};
pub use head::{gelu, gelu_grad, sigmoid, Forward, ScoringHead};
pub use input::{
    label_cache_key, Backbone, EncoderInput, EncoderMode, LabelCache, LabelEmbeddings, TokenEmbeddings, ENT_MARKER,
    SEP_MARKER,
};
pub use labels::EntityTypeSet;
pub use loss::{bce_loss, gold_targets, loss_and_grad, loss_sum, LossSum};
pub use optim::AdamW;
pub use predict::{predict, predict_scored, Matcher};
pub use serialize::{head_from_bytes, head_to_bytes, load_head, read_head, save_head, write_head, HEAD_FORMAT_VERSION};
pub use spans::{enumerate_spans, span_count, DEFAULT_MAX_WIDTH};
pub use train::{
    prepare_example, train_head, train_two_phase, training_labels, TrainConfig, TrainExample, TrainOutcome, Trainer,
    TwoPhaseSchedule,
};

#[derive(Debug, thiserror::Error)]
pub enum MatcherError {
    #[error("invalid label set: {0}")]
    InvalidLabels(String),
    #[error("invalid encoder input: {0}")]
    InvalidInput(String),
    #[error("encoder failure: {0}")]
    EncoderFailure(String),
    #[error("dimension mismatch: text width {text}, label width {labels}")]
    DimensionMismatch { text: usize, labels: usize },
    #[error("gold annotation out of range: {0}")]
    GoldOutOfRange(String),
    #[error("decoding threshold {0} is outside (0, 1)")]
    InvalidThreshold(f64),
    #[error("non-finite loss at step {step}")]
    NonFiniteLoss { step: usize },
    #[error("training dataset is empty")]
    EmptyDataset,
    #[error("head file: {0}")]
    HeadFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
