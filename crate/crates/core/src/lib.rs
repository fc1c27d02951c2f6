//! Biomedical span-matching NER toolkit.
//!
//! The crate covers the whole data and model loop around a GLiNER-style
//! span-to-label matcher:
//!
//! - [`corpus`]: passage types, JSONL I/O, tokenization, chunking, stratified sampling
//! - [`quality`]: heuristic passage-quality filters with per-rule diagnostics
//! - [`dedup`]: TF-IDF cosine graph, connected components, canonical representatives
//! - [`annotate`]: candidate extraction, LLM prompting, span alignment, teacher/student distillation
//! - [`matcher`]: uni- and bi-encoder input assembly, span scoring head, training, decoding
//! - [`eval`]: micro/macro F1, Wilcoxon signed-rank, N-shot subsets, throughput benchmark

pub mod annotate;
pub mod corpus;
pub mod dedup;
pub mod eval;
mod hash;
pub mod matcher;
pub mod quality;
pub mod stopwords;

pub use corpus::{AnnotatedPassage, EntitySpan, Passage, Source, TokenSequence};
