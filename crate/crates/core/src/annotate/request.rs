use serde::{Deserialize, Serialize};

use super::candidates::CandidateSet;
use super::client::{ChatRequest, ClientError, LlmClient};
use super::prompt::AnnotationRequest;
use super::schema::{parse_entities, Entity};
use super::AnnotateError;

/// An entity together with its audit flag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponseEntity {
    pub text: String,
    #[serde(rename = "type")]
    pub entity_type: String,
    /// The text is not one of the offered candidates.
    pub off_candidate: bool,
}

/// Parsed annotator output with the verbatim response kept for audit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationResponse {
    pub entities: Vec<ResponseEntity>,
    pub raw: String,
    /// Number of client calls made (1, or 2 after a retry).
    pub attempts: usize,
}

impl AnnotationResponse {
    pub fn plain_entities(&self) -> Vec<Entity> {
        self.entities.iter().map(|e| Entity { text: e.text.clone(), entity_type: e.entity_type.clone() }).collect()
    }
}

fn flag(entities: Vec<Entity>, candidates: &CandidateSet) -> Vec<ResponseEntity> {
    entities
        .into_iter()
        .map(|e| ResponseEntity { off_candidate: !candidates.contains_text(&e.text), text: e.text, entity_type: e.entity_type })
        .collect()
}

/// Prompts `client` for one passage. A response that fails schema validation
/// is retried once; client errors are returned immediately.
pub fn annotate_passage(request: &AnnotationRequest, client: &dyn LlmClient) -> Result<AnnotationResponse, AnnotateError> {
    let chat = ChatRequest::new(request.messages(), &request.schema_id);
    let mut last_error = String::new();
    let mut last_raw = String::new();
    for attempt in 1..=2 {
        let raw = client.complete(&chat).map_err(|e: ClientError| AnnotateError::Client {
            passage_id: request.passage_id.clone(),
            source: e,
        })?;
        match parse_entities(&raw) {
            Ok(entities) => {
                return Ok(AnnotationResponse { entities: flag(entities, &request.candidates), raw, attempts: attempt })
            }
            Err(reason) => {
                last_error = reason;
                last_raw = raw;
            }
        }
    }
    Err(AnnotateError::SchemaViolation { passage_id: request.passage_id.clone(), reason: last_error, raw: last_raw })
}
