use std::collections::HashMap;

use crate::stopwords::is_stopword;

/// Whitespace-delimited pieces with surrounding punctuation trimmed, kept when
/// they contain at least one letter.
pub fn words(text: &str) -> impl Iterator<Item = &str> {
    text.split_whitespace()
        .map(|w| w.trim_matches(|c: char| !c.is_alphanumeric()))
        .filter(|w| w.chars().any(char::is_alphabetic))
}

/// Sentences split after '.', '!' or '?' when followed by whitespace or the
/// end of text. Only pieces containing an alphanumeric character count.
pub fn sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if matches!(c, '.' | '!' | '?') {
            let at_break = chars.peek().is_none_or(|&(_, n)| n.is_whitespace());
            if at_break {
                let end = i + c.len_utf8();
                out.push(text[start..end].trim());
                start = end;
            }
        }
    }
    out.push(text[start..].trim());
    out.retain(|s| s.chars().any(char::is_alphanumeric));
    out
}

/// Maximal runs of consecutive '\n' (carriage returns ignored).
pub fn newline_clusters(text: &str) -> usize {
    let mut clusters = 0;
    let mut in_run = false;
    for c in text.chars().filter(|&c| c != '\r') {
        if c == '\n' {
            if !in_run {
                clusters += 1;
            }
            in_run = true;
        } else {
            in_run = false;
        }
    }
    clusters
}

fn is_non_alpha_word(word: &str) -> bool {
    word.chars().any(|c| !(c.is_alphabetic() || matches!(c, '\'' | '’' | '-')))
}

/// Raw counts behind every general-profile metric.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TextStats {
    pub word_count: usize,
    pub non_alpha_words: usize,
    pub sentence_count: usize,
    pub alphabetic_chars: usize,
    pub uppercase_chars: usize,
    pub most_frequent_word_count: usize,
    pub unique_words: usize,
    pub stopwords: usize,
    pub newline_clusters: usize,
}

impl TextStats {
    pub fn compute(text: &str) -> Self {
        let mut freq: HashMap<String, usize> = HashMap::new();
        let mut stats = TextStats::default();
        for w in words(text) {
            stats.word_count += 1;
            if is_non_alpha_word(w) {
                stats.non_alpha_words += 1;
            }
            if is_stopword(w) {
                stats.stopwords += 1;
            }
            *freq.entry(w.to_lowercase()).or_default() += 1;
        }
        stats.unique_words = freq.len();
        stats.most_frequent_word_count = freq.values().copied().max().unwrap_or(0);
        stats.sentence_count = sentences(text).len();
        for c in text.chars().filter(|c| c.is_alphabetic()) {
            stats.alphabetic_chars += 1;
            if c.is_uppercase() {
                stats.uppercase_chars += 1;
            }
        }
        stats.newline_clusters = newline_clusters(text);
        stats
    }
}
