//! Synthetic NER annotation with large language models.
//!
//! Passages are tokenized, candidate phrases are extracted, and an
//! OpenAI-compatible chat endpoint is asked to type the candidates under a
//! JSON schema. Returned entity strings are aligned back to token spans. The
//! distillation pipeline sends the first passages to a few-shot teacher and
//! the rest to a zero-shot student, checkpointing as it goes.

mod align;
mod candidates;
mod client;
mod distill;
mod prompt;
mod request;
mod schema;

pub use align::{align_spans, Alignment};
pub use candidates::{
    extract_candidates, surface, Candidate, CandidateExtractor, CandidateSet, ContentRunExtractor, MAX_CANDIDATE_TOKENS,
};
pub use client::{CandidateEchoClient, ChatRequest, ClientError, FnClient, HttpChatClient, LlmClient, ScriptedClient};
pub use distill::{
    distill_pipeline, Annotator, DistillConfig, DistillPaths, DistillSummary, SftRecord, DEFAULT_TEACHER_N,
};
pub use prompt::{
    candidates_in_prompt, default_few_shot, few_shot_version, AnnotationRequest, ChatMessage, FewShotExample,
    CANDIDATES_PREFIX,
};
pub use request::{annotate_passage, AnnotationResponse, ResponseEntity};
pub use schema::{entities_json, parse_entities, schema, Entity, ENTITY_LIST_SCHEMA};

#[derive(Debug, thiserror::Error)]
pub enum AnnotateError {
    #[error("client error for passage {passage_id}: {source}")]
    Client {
        passage_id: String,
        #[source]
        source: ClientError,
    },
    #[error("response for passage {passage_id} violates the schema after one retry: {reason}")]
    SchemaViolation { passage_id: String, reason: String, raw: String },
    #[error("corpus has {size} passages but teacher_n is {teacher_n}")]
    CorpusTooSmall { size: usize, teacher_n: usize },
    #[error("duplicate passage id {0:?}")]
    DuplicateId(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
