//! Passage types, JSONL I/O, tokenization, chunking and stratified sampling.

mod chunk;
mod io;
mod sample;
mod tokenize;
mod types;

use thiserror::Error;

pub use chunk::{chunk, CharQuadCounter, Chunk, SubwordCounter, DEFAULT_CHUNK_BUDGET};
pub use io::{
    open_jsonl, read_annotated, read_corpus, write_annotated, write_corpus, write_jsonl, write_jsonl_file,
    AnnotatedRecord, JsonlReader, Record,
};
pub use sample::{allocate_quotas, group_by_source, stratified_sample};
pub use tokenize::tokenize;
pub use types::{AnnotatedPassage, EntitySpan, Passage, Source, TokenSequence};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {reason}")]
    Schema { line: usize, reason: String },
    #[error("passage {id}: {reason}")]
    Invalid { id: String, reason: String },
}

#[derive(Debug, Error)]
pub enum ChunkError {
    #[error("span ({}, {}, {}) needs {subwords} subwords, budget is {budget}", span.start, span.end, span.entity_type)]
    SpanTooLarge { span: EntitySpan, subwords: usize, budget: usize },
    #[error("token {index} needs {subwords} subwords, budget is {budget}")]
    TokenTooLarge { index: usize, subwords: usize, budget: usize },
}

#[derive(Debug, Error)]
pub enum SampleError {
    #[error("requested {requested} passages but only {available} are available")]
    InsufficientData { requested: usize, available: usize },
    #[error("total {total} is smaller than the number of sources ({sources})")]
    TotalTooSmall { total: usize, sources: usize },
    #[error("duplicate passage id {0}")]
    DuplicateId(String),
}
