//! Candidate mention extraction.

use serde::{Deserialize, Serialize};

use crate::corpus::TokenSequence;
use crate::stopwords::is_stopword;

/// Longest candidate, in tokens, produced by [`ContentRunExtractor`].
pub const MAX_CANDIDATE_TOKENS: usize = 8;

/// A contiguous token run offered to the annotator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub text: String,
    pub start_token: usize,
    /// Inclusive.
    pub end_token: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub passage_id: String,
    pub candidates: Vec<Candidate>,
}

impl CandidateSet {
    pub fn texts(&self) -> Vec<&str> {
        self.candidates.iter().map(|c| c.text.as_str()).collect()
    }

    pub fn contains_text(&self, text: &str) -> bool {
        self.candidates.iter().any(|c| c.text == text)
    }
}

/// Strategy for proposing candidate mentions.
pub trait CandidateExtractor: Send + Sync {
    fn extract(&self, passage_id: &str, tokens: &TokenSequence) -> CandidateSet;
}

/// Surface form of tokens `start..=end`: tokens are joined with a single space
/// where their offsets leave a gap and concatenated where they touch.
pub fn surface(tokens: &TokenSequence, start: usize, end: usize) -> String {
    let mut out = tokens.tokens[start].clone();
    for i in start + 1..=end {
        if tokens.offsets[i].0 > tokens.offsets[i - 1].1 {
            out.push(' ');
        }
        out.push_str(&tokens.tokens[i]);
    }
    out
}

/// Maximal runs of content tokens, where stopwords and pure punctuation tokens
/// act as delimiters; runs longer than `max_tokens` are cut into consecutive
/// pieces of `max_tokens`.
#[derive(Debug, Clone, Copy)]
pub struct ContentRunExtractor {
    pub max_tokens: usize,
}

impl Default for ContentRunExtractor {
    fn default() -> Self {
        Self { max_tokens: MAX_CANDIDATE_TOKENS }
    }
}

fn is_content(token: &str) -> bool {
    token.chars().any(char::is_alphanumeric) && !is_stopword(token)
}

impl CandidateExtractor for ContentRunExtractor {
    fn extract(&self, passage_id: &str, tokens: &TokenSequence) -> CandidateSet {
        let mut candidates = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            if !is_content(&tokens.tokens[i]) {
                i += 1;
                continue;
            }
            let mut end = i;
            while end + 1 < tokens.len() && is_content(&tokens.tokens[end + 1]) && end + 1 - i < self.max_tokens {
                end += 1;
            }
            candidates.push(Candidate { text: surface(tokens, i, end), start_token: i, end_token: end });
            i = end + 1;
        }
        CandidateSet { passage_id: passage_id.to_string(), candidates }
    }
}

/// [`ContentRunExtractor`] with the default run limit.
pub fn extract_candidates(passage_id: &str, tokens: &TokenSequence) -> CandidateSet {
    ContentRunExtractor::default().extract(passage_id, tokens)
}
