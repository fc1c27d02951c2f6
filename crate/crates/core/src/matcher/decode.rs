use std::cmp::Ordering;

use ndarray::Array2;

use super::{EntityTypeSet, MatcherError};
use crate::corpus::EntitySpan;

pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// A scored (span, label) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanCandidate {
    pub start: usize,
    pub end: usize,
    pub type_index: usize,
    pub score: f64,
}

impl SpanCandidate {
    fn overlaps(&self, other: &SpanCandidate) -> bool {
        self.start <= other.end && other.start <= self.end
    }
}

/// Total order used by greedy decoding: score descending, then earlier start,
/// then shorter span, then lower type index.
pub fn priority(a: &SpanCandidate, b: &SpanCandidate) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then(a.start.cmp(&b.start))
        .then((a.end - a.start).cmp(&(b.end - b.start)))
        .then(a.type_index.cmp(&b.type_index))
}

/// Cells scoring at least `threshold`, in greedy priority order.
pub fn candidates(scores: &Array2<f64>, spans: &[(usize, usize)], threshold: f64) -> Vec<SpanCandidate> {
    assert_eq!(scores.nrows(), spans.len(), "one score row per span");
    let mut out: Vec<SpanCandidate> = scores
        .indexed_iter()
        .filter(|(_, &score)| score >= threshold)
        .map(|((row, type_index), &score)| SpanCandidate { start: spans[row].0, end: spans[row].1, type_index, score })
        .collect();
    out.sort_by(priority);
    out
}

/// Flat greedy decoding: accept candidates in priority order unless they
/// overlap an accepted one. The result is ordered by start token.
pub fn decode(
    scores: &Array2<f64>,
    spans: &[(usize, usize)],
    threshold: f64,
) -> Result<Vec<SpanCandidate>, MatcherError> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(MatcherError::InvalidThreshold(threshold));
    }
    let mut accepted: Vec<SpanCandidate> = Vec::new();
    for c in candidates(scores, spans, threshold) {
        if accepted.iter().all(|a| !a.overlaps(&c)) {
            accepted.push(c);
        }
    }
    accepted.sort_by_key(|c| (c.start, c.end));
    Ok(accepted)
}

/// [`decode`] with label names attached.
pub fn decode_spans(
    scores: &Array2<f64>,
    spans: &[(usize, usize)],
    labels: &EntityTypeSet,
    threshold: f64,
) -> Result<Vec<EntitySpan>, MatcherError> {
    assert_eq!(scores.ncols(), labels.len(), "one score column per label");
    Ok(decode(scores, spans, threshold)?
        .into_iter()
        .map(|c| EntitySpan::new(c.start, c.end, labels.get(c.type_index)))
        .collect())
}
