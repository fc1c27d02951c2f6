use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::CorpusError;

/// Origin of a passage.
///
/// Ordered by [`Source::name`] so that any per-source iteration is
/// deterministic and matches ascending source-name order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Source {
    Pubmed,
    ClinicalTrialDesc,
    TrialRegimen,
    DrugLabel,
    Patent,
    Other(String),
}

impl Source {
    pub fn name(&self) -> &str {
        match self {
            Source::Pubmed => "pubmed",
            Source::ClinicalTrialDesc => "clinical_trial_desc",
            Source::TrialRegimen => "trial_regimen",
            Source::DrugLabel => "drug_label",
            Source::Patent => "patent",
            Source::Other(name) => name,
        }
    }

    pub fn parse(name: &str) -> Self {
        match name {
            "pubmed" => Source::Pubmed,
            "clinical_trial_desc" => Source::ClinicalTrialDesc,
            "trial_regimen" => Source::TrialRegimen,
            "drug_label" => Source::DrugLabel,
            "patent" => Source::Patent,
            other => Source::Other(other.to_string()),
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl PartialOrd for Source {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Source {
    fn cmp(&self, other: &Self) -> Ordering {
        self.name().cmp(other.name())
    }
}

impl Serialize for Source {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Source {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let name = String::deserialize(deserializer)?;
        if name.is_empty() {
            return Err(serde::de::Error::custom("source must be nonempty"));
        }
        Ok(Source::parse(&name))
    }
}

/// One unit of raw corpus text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Passage {
    pub id: String,
    pub source: Source,
    pub text: String,
}

impl Passage {
    pub fn new(id: impl Into<String>, source: Source, text: impl Into<String>) -> Self {
        Self { id: id.into(), source, text: text.into() }
    }

    /// Checks the per-record invariants (nonempty id and text).
    pub fn validate(&self) -> Result<(), String> {
        if self.id.is_empty() {
            return Err("empty id".into());
        }
        if self.text.is_empty() {
            return Err("empty text".into());
        }
        Ok(())
    }
}

/// Tokens with byte offsets into the text they were cut from.
///
/// Offsets are UTF-8 byte positions so that `&text[start..end]` recovers the
/// token directly.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenSequence {
    pub tokens: Vec<String>,
    pub offsets: Vec<(usize, usize)>,
}

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Rebuilds offsets by locating each token, in order, inside `text`.
    ///
    /// Used when reading annotated files that carry only the token strings.
    pub fn align(text: &str, tokens: Vec<String>) -> Result<Self, String> {
        let mut offsets = Vec::with_capacity(tokens.len());
        let mut cursor = 0;
        for (i, tok) in tokens.iter().enumerate() {
            if tok.is_empty() {
                return Err(format!("token {i} is empty"));
            }
            let rel = text[cursor..]
                .find(tok.as_str())
                .ok_or_else(|| format!("token {i} ({tok:?}) not found in text after byte {cursor}"))?;
            let start = cursor + rel;
            let end = start + tok.len();
            offsets.push((start, end));
            cursor = end;
        }
        Ok(Self { tokens, offsets })
    }

    /// Checks offsets are strictly increasing, non-overlapping and nonempty,
    /// and that each slice of `text` equals its token.
    pub fn validate_against(&self, text: &str) -> Result<(), String> {
        if self.tokens.len() != self.offsets.len() {
            return Err("token and offset counts differ".into());
        }
        let mut prev_end = 0;
        for (i, (tok, &(s, e))) in self.tokens.iter().zip(&self.offsets).enumerate() {
            if e <= s || (i > 0 && s < prev_end) {
                return Err(format!("bad offsets at token {i}"));
            }
            if text.get(s..e) != Some(tok.as_str()) {
                return Err(format!("token {i} does not match its text slice"));
            }
            prev_end = e;
        }
        Ok(())
    }

    /// Sub-sequence `[start, end)` with offsets shifted by `-shift`.
    pub fn slice(&self, start: usize, end: usize, shift: usize) -> Self {
        Self {
            tokens: self.tokens[start..end].to_vec(),
            offsets: self.offsets[start..end].iter().map(|&(s, e)| (s - shift, e - shift)).collect(),
        }
    }
}

/// A typed token interval, both ends inclusive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EntitySpan {
    pub start: usize,
    pub end: usize,
    #[serde(rename = "type")]
    pub entity_type: String,
}

impl EntitySpan {
    pub fn new(start: usize, end: usize, entity_type: impl Into<String>) -> Self {
        Self { start, end, entity_type: entity_type.into() }
    }

    pub fn width(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn overlaps(&self, other: &EntitySpan) -> bool {
        self.start <= other.end && other.start <= self.end
    }

    pub fn validate(&self, n_tokens: usize) -> Result<(), String> {
        if self.start > self.end || self.end >= n_tokens {
            return Err(format!("span ({}, {}) out of range for {n_tokens} tokens", self.start, self.end));
        }
        if self.entity_type.is_empty() {
            return Err("empty entity type".into());
        }
        Ok(())
    }
}

/// Tokenized passage with typed spans and the types known to be absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedPassage {
    pub passage: Passage,
    pub tokens: TokenSequence,
    pub spans: Vec<EntitySpan>,
    pub negative_types: Vec<String>,
}

impl AnnotatedPassage {
    /// Builds and validates an annotated passage.
    pub fn new(
        passage: Passage,
        tokens: TokenSequence,
        spans: Vec<EntitySpan>,
        negative_types: Vec<String>,
    ) -> Result<Self, CorpusError> {
        let ap = Self { passage, tokens, spans, negative_types };
        ap.validate().map_err(|reason| CorpusError::Invalid { id: ap.passage.id.clone(), reason })?;
        Ok(ap)
    }

    /// Unannotated passage tokenized with the default tokenizer.
    pub fn unlabeled(passage: Passage) -> Self {
        let tokens = super::tokenize(&passage.text);
        Self { passage, tokens, spans: Vec::new(), negative_types: Vec::new() }
    }

    pub fn id(&self) -> &str {
        &self.passage.id
    }

    pub fn validate(&self) -> Result<(), String> {
        self.tokens.validate_against(&self.passage.text)?;
        let mut seen = HashSet::new();
        for span in &self.spans {
            span.validate(self.tokens.len())?;
            if !seen.insert(span) {
                return Err(format!("duplicate span ({}, {}, {})", span.start, span.end, span.entity_type));
            }
        }
        let positive: HashSet<&str> = self.spans.iter().map(|s| s.entity_type.as_str()).collect();
        if let Some(t) = self.negative_types.iter().find(|t| positive.contains(t.as_str())) {
            return Err(format!("negative type {t:?} also appears as a span type"));
        }
        Ok(())
    }

    /// Distinct span types in first-seen order.
    pub fn positive_types(&self) -> Vec<String> {
        let mut seen = HashSet::new();
        self.spans
            .iter()
            .filter(|s| seen.insert(s.entity_type.as_str()))
            .map(|s| s.entity_type.clone())
            .collect()
    }

    /// Records every label of `universe` that has no span here as a negative.
    pub fn record_negatives(&mut self, universe: &[String]) {
        let positive: HashSet<String> = self.positive_types().into_iter().collect();
        for label in universe {
            if !positive.contains(label) && !self.negative_types.contains(label) {
                self.negative_types.push(label.clone());
            }
        }
    }

    /// Text covered by a span, taken from the source text.
    pub fn span_text(&self, span: &EntitySpan) -> &str {
        let start = self.tokens.offsets[span.start].0;
        let end = self.tokens.offsets[span.end].1;
        &self.passage.text[start..end]
    }
}
