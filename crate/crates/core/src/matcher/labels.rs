use std::collections::HashSet;

use super::MatcherError;
use crate::corpus::tokenize;

/// Ordered, duplicate-free set of natural-language entity labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EntityTypeSet {
    labels: Vec<String>,
}

impl EntityTypeSet {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self, MatcherError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(MatcherError::InvalidLabels("at least one label is required".into()));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if tokenize(l).is_empty() {
                return Err(MatcherError::InvalidLabels(format!("label {l:?} has no tokens")));
            }
            if !seen.insert(l.as_str()) {
                return Err(MatcherError::InvalidLabels(format!("duplicate label {l:?}")));
            }
        }
        Ok(Self { labels })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}
