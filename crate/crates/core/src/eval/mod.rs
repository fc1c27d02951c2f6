//! Evaluation: span-level F1 metrics, paired significance testing, N-shot
//! subsets and the throughput benchmark harness.

mod bench;
mod counts;
mod nshot;
mod report;
mod wilcoxon;

pub use bench::{
    bench_throughput, default_batch_sizes, umls_semantic_types, word_count, BenchCase, BenchCell, BenchFailure,
    BenchReport, CellStatus, Timer, WallTimer,
};
pub use counts::{match_by_type, match_spans, MatchCounts};
pub use nshot::n_shot_subset;
pub use report::{median, report, report_passages, EvalReport, PassageF1, TypeScores};
pub use wilcoxon::{average_ranks, wilcoxon_one_sided, WilcoxonMethod, WilcoxonResult, EXACT_MAX_N};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("no predictions for passages: {}", .0.join(", "))]
    MissingPredictions(Vec<String>),
    #[error("predictions for passages absent from gold: {}", .0.join(", "))]
    UnexpectedPredictions(Vec<String>),
    #[error("series lengths differ: {a} vs {b}")]
    LengthMismatch { a: usize, b: usize },
    #[error("series are empty")]
    EmptySeries,
    #[error("series contain non-finite values")]
    NonFinite,
    #[error("requested {requested} items but the split has {available}")]
    InsufficientData { requested: usize, available: usize },
}
