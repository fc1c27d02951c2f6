//! Prompt assembly for annotation requests.

use serde::{Deserialize, Serialize};

use super::candidates::{extract_candidates, CandidateSet};
use super::schema::{entities_json, Entity, ENTITY_LIST_SCHEMA};
use crate::corpus::tokenize;

const FEW_SHOT_FIXTURE: &str = include_str!("../../fixtures/few_shot.json");

/// Line prefix under which the candidate list is embedded in a user turn.
pub const CANDIDATES_PREFIX: &str = "Candidates: ";

const SYSTEM_PROMPT: &str = "You annotate biomedical text for named entity recognition. \
Classify the candidate phrases that name entities according to their entity type, using short \
lower-case natural-language type names. Each entity text must be copied exactly from the passage. \
Answer with JSON of the form {\"entities\": [{\"text\": ..., \"type\": ...}]} and nothing else.";

/// A demonstration passage with its expected entities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FewShotExample {
    pub text: String,
    pub entities: Vec<Entity>,
}

#[derive(Debug, Deserialize)]
struct FewShotFile {
    version: String,
    examples: Vec<FewShotExample>,
}

/// Version tag of the bundled demonstrations.
pub fn few_shot_version() -> String {
    serde_json::from_str::<FewShotFile>(FEW_SHOT_FIXTURE).expect("bundled few-shot fixture parses").version
}

/// The four bundled demonstrations used for teacher prompts.
pub fn default_few_shot() -> Vec<FewShotExample> {
    serde_json::from_str::<FewShotFile>(FEW_SHOT_FIXTURE).expect("bundled few-shot fixture parses").examples
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

impl ChatMessage {
    pub fn new(role: &str, content: impl Into<String>) -> Self {
        Self { role: role.to_string(), content: content.into() }
    }
}

/// Everything needed to prompt an annotator for one passage.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationRequest {
    pub passage_id: String,
    pub text: String,
    pub candidates: CandidateSet,
    pub few_shot: Vec<FewShotExample>,
    pub schema_id: String,
}

impl AnnotationRequest {
    pub fn new(passage_id: &str, text: &str, candidates: CandidateSet, few_shot: Vec<FewShotExample>) -> Self {
        Self {
            passage_id: passage_id.to_string(),
            text: text.to_string(),
            candidates,
            few_shot,
            schema_id: ENTITY_LIST_SCHEMA.to_string(),
        }
    }

    /// Chat transcript: system instructions, one user/assistant pair per
    /// demonstration, then the passage itself.
    pub fn messages(&self) -> Vec<ChatMessage> {
        let mut messages = vec![ChatMessage::new("system", SYSTEM_PROMPT)];
        for ex in &self.few_shot {
            let candidates = extract_candidates("example", &tokenize(&ex.text));
            messages.push(ChatMessage::new("user", user_turn(&ex.text, &candidates)));
            messages.push(ChatMessage::new("assistant", entities_json(&ex.entities)));
        }
        messages.push(ChatMessage::new("user", user_turn(&self.text, &self.candidates)));
        messages
    }
}

fn user_turn(text: &str, candidates: &CandidateSet) -> String {
    let list = serde_json::to_string(&candidates.texts()).expect("strings serialize");
    format!("Passage: {text}\n{CANDIDATES_PREFIX}{list}")
}

/// Candidate texts embedded in a user turn built by this module.
pub fn candidates_in_prompt(content: &str) -> Option<Vec<String>> {
    content.lines().rev().find_map(|l| l.strip_prefix(CANDIDATES_PREFIX)).and_then(|json| serde_json::from_str(json).ok())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_demonstrations() {
        let ex = default_few_shot();
        assert_eq!(ex.len(), 4);
        for e in &ex {
            for ent in &e.entities {
                assert!(e.text.contains(&ent.text), "{} not in {}", ent.text, e.text);
            }
        }
        assert_eq!(few_shot_version(), "illustrative-v1");
    }

    #[test]
    fn prompt_embeds_passage_candidates_and_examples() {
        let text = "Aspirin reduces the risk of stroke";
        let cands = extract_candidates("p1", &tokenize(text));
        let req = AnnotationRequest::new("p1", text, cands, default_few_shot());
        let msgs = req.messages();
        assert_eq!(msgs.len(), 1 + 2 * 4 + 1);
        assert_eq!(msgs[0].role, "system");
        let last = &msgs.last().unwrap().content;
        assert!(last.contains(text));
        assert_eq!(candidates_in_prompt(last).unwrap(), ["Aspirin reduces", "risk", "stroke"]);
        assert!(msgs[2].content.contains("\"warfarin\""));

        let zero = AnnotationRequest::new("p1", text, req.candidates.clone(), vec![]);
        assert_eq!(zero.messages().len(), 2);
    }
}
