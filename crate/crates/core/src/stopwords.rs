//! Fixed English stopword list shared by the quality filters and the
//! candidate extractor.

/// Version tag of [`STOPWORDS`]. Bump when the list changes.
pub const STOPWORDS_VERSION: &str = "en-50-v1";

/// 50 common English function words, lowercase.
pub const STOPWORDS: [&str; 50] = [
    "the", "of", "and", "a", "an", "to", "in", "is", "it", "that", "was", "for", "on", "are",
    "as", "with", "by", "at", "be", "this", "from", "or", "which", "were", "have", "has", "had",
    "not", "but", "can", "their", "they", "its", "these", "been", "also", "than", "into",
    "other", "may", "such", "more", "no", "both", "between", "after", "during", "when", "all",
    "there",
];

/// Case-insensitive membership test.
pub fn is_stopword(word: &str) -> bool {
    let lower = word.to_lowercase();
    STOPWORDS.contains(&lower.as_str())
}
