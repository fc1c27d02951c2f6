//! Subword-budget chunking that never splits an entity span.

use serde::Serialize;

use super::io::AnnotatedRecord;
use super::types::{AnnotatedPassage, EntitySpan, Source, TokenSequence};
use super::ChunkError;

/// Default chunk budget in subword units.
pub const DEFAULT_CHUNK_BUDGET: usize = 512;

/// Maps a token to the number of subword units it occupies.
pub trait SubwordCounter {
    fn count(&self, token: &str) -> usize;
}

impl<F: Fn(&str) -> usize> SubwordCounter for F {
    fn count(&self, token: &str) -> usize {
        self(token)
    }
}

/// One subword per started group of four characters.
#[derive(Debug, Clone, Copy, Default)]
pub struct CharQuadCounter;

impl SubwordCounter for CharQuadCounter {
    fn count(&self, token: &str) -> usize {
        token.chars().count().div_ceil(4)
    }
}

/// A contiguous piece of an annotated passage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Chunk {
    pub parent_id: String,
    pub chunk_index: usize,
    pub source: Source,
    /// Index of the chunk's first token in the parent sequence.
    pub token_start: usize,
    pub text: String,
    /// Offsets are relative to `text`.
    #[serde(skip)]
    pub tokens: TokenSequence,
    /// Re-indexed relative to `token_start`.
    pub spans: Vec<EntitySpan>,
    pub negative_types: Vec<String>,
    pub subword_count: usize,
}

impl Chunk {
    pub fn id(&self) -> String {
        format!("{}#{}", self.parent_id, self.chunk_index)
    }

    /// Spans shifted back to parent token indices.
    pub fn parent_spans(&self) -> impl Iterator<Item = EntitySpan> + '_ {
        self.spans.iter().map(|s| {
            EntitySpan::new(s.start + self.token_start, s.end + self.token_start, s.entity_type.clone())
        })
    }

    pub fn to_record(&self) -> AnnotatedRecord {
        AnnotatedRecord {
            id: self.id(),
            source: self.source.clone(),
            text: self.text.clone(),
            tokens: self.tokens.tokens.clone(),
            spans: self.spans.clone(),
            negative_types: self.negative_types.clone(),
            annotator: None,
            parent_id: Some(self.parent_id.clone()),
            chunk_index: Some(self.chunk_index),
        }
    }
}

/// Greedy left-to-right packing of tokens into chunks of at most `budget`
/// subwords. When a cut would land inside a span, the cut moves back to that
/// span's start. Types present in the parent but absent from a chunk are added
/// to that chunk's negatives.
pub fn chunk(
    passage: &AnnotatedPassage,
    budget: usize,
    counter: &dyn SubwordCounter,
) -> Result<Vec<Chunk>, ChunkError> {
    let n = passage.tokens.len();
    let counts: Vec<usize> = passage.tokens.tokens.iter().map(|t| counter.count(t)).collect();

    if let Some(i) = counts.iter().position(|&c| c > budget) {
        if let Some(span) = passage.spans.iter().find(|s| s.start <= i && i <= s.end) {
            return Err(ChunkError::SpanTooLarge { span: span.clone(), subwords: span_cost(&counts, span), budget });
        }
        return Err(ChunkError::TokenTooLarge { index: i, subwords: counts[i], budget });
    }
    if let Some(span) = passage.spans.iter().find(|s| span_cost(&counts, s) > budget) {
        return Err(ChunkError::SpanTooLarge { span: span.clone(), subwords: span_cost(&counts, span), budget });
    }

    let mut bounds = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start;
        let mut acc = 0;
        while end < n && acc + counts[end] <= budget {
            acc += counts[end];
            end += 1;
        }
        if end < n {
            loop {
                let straddling = passage.spans.iter().filter(|s| s.start < end && s.end >= end);
                match straddling.map(|s| s.start).min() {
                    Some(s) if s < end => end = s,
                    _ => break,
                }
            }
            if end <= start {
                // overlapping spans chained beyond the budget
                let span = passage
                    .spans
                    .iter()
                    .filter(|s| s.start == start)
                    .max_by_key(|s| s.end)
                    .cloned()
                    .expect("a span starts at the chunk start");
                let subwords = span_cost(&counts, &span);
                return Err(ChunkError::SpanTooLarge { span, subwords, budget });
            }
        }
        bounds.push((start, end));
        start = end;
    }
    if bounds.is_empty() {
        bounds.push((0, 0));
    }

    let parent_types = passage.positive_types();
    let chunks = bounds
        .into_iter()
        .enumerate()
        .map(|(index, (s, e))| {
            let (byte_start, byte_end) = if s < e {
                (passage.tokens.offsets[s].0, passage.tokens.offsets[e - 1].1)
            } else {
                (0, 0)
            };
            let spans: Vec<EntitySpan> = passage
                .spans
                .iter()
                .filter(|sp| sp.start >= s && sp.end < e)
                .map(|sp| EntitySpan::new(sp.start - s, sp.end - s, sp.entity_type.clone()))
                .collect();
            let mut negative_types = passage.negative_types.clone();
            for t in &parent_types {
                if !spans.iter().any(|sp| &sp.entity_type == t) {
                    negative_types.push(t.clone());
                }
            }
            Chunk {
                parent_id: passage.passage.id.clone(),
                chunk_index: index,
                source: passage.passage.source.clone(),
                token_start: s,
                text: passage.passage.text[byte_start..byte_end].to_string(),
                tokens: passage.tokens.slice(s, e, byte_start),
                spans,
                negative_types,
                subword_count: counts[s..e].iter().sum(),
            }
        })
        .collect();
    Ok(chunks)
}

fn span_cost(counts: &[usize], span: &EntitySpan) -> usize {
    counts[span.start..=span.end].iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Passage;

    fn passage_of(n: usize, spans: Vec<EntitySpan>) -> AnnotatedPassage {
        let text = (0..n).map(|i| format!("w{i}")).collect::<Vec<_>>().join(" ");
        let p = Passage::new("doc", Source::Pubmed, text);
        let tokens = crate::corpus::tokenize(&p.text);
        AnnotatedPassage::new(p, tokens, spans, vec![]).unwrap()
    }

    fn one_each(_: &str) -> usize {
        1
    }

    #[test]
    fn boundary_moves_to_span_start() {
        let ap = passage_of(600, vec![EntitySpan::new(500, 520, "drug")]);
        let chunks = chunk(&ap, 512, &one_each).unwrap();
        assert_eq!(chunks.len(), 2);
        assert_eq!(chunks[0].tokens.len(), 500);
        assert_eq!(chunks[1].token_start, 500);
        assert_eq!(chunks[1].spans, vec![EntitySpan::new(0, 20, "drug")]);
        assert_eq!(chunks[0].negative_types, vec!["drug".to_string()]);
        assert!(chunks[1].negative_types.is_empty());
    }

    #[test]
    fn short_passage_is_one_chunk() {
        let ap = passage_of(10, vec![EntitySpan::new(2, 3, "x")]);
        let chunks = chunk(&ap, 512, &one_each).unwrap();
        assert_eq!(chunks.len(), 1);
        assert_eq!(chunks[0].tokens, ap.tokens);
        assert_eq!(chunks[0].text, ap.passage.text);
        assert_eq!(chunks[0].spans, ap.spans);
    }

    #[test]
    fn oversized_span_is_rejected() {
        let ap = passage_of(700, vec![EntitySpan::new(10, 609, "long")]);
        match chunk(&ap, 512, &one_each) {
            Err(ChunkError::SpanTooLarge { span, subwords, .. }) => {
                assert_eq!(span, EntitySpan::new(10, 609, "long"));
                assert_eq!(subwords, 600);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn chained_overlaps_count_as_one_unit() {
        let ap = passage_of(20, vec![EntitySpan::new(0, 5, "a"), EntitySpan::new(4, 9, "b")]);
        assert!(matches!(chunk(&ap, 8, &one_each), Err(ChunkError::SpanTooLarge { .. })));
        let ok = chunk(&ap, 10, &one_each).unwrap();
        assert_eq!(ok[0].tokens.len(), 10);
    }

    #[test]
    fn char_quad_counter() {
        assert_eq!(CharQuadCounter.count("a"), 1);
        assert_eq!(CharQuadCounter.count("abcd"), 1);
        assert_eq!(CharQuadCounter.count("abcde"), 2);
        assert_eq!(CharQuadCounter.count("µµµµµ"), 2);
    }

    #[test]
    fn empty_passage_yields_one_empty_chunk() {
        let p = Passage::new("e", Source::Pubmed, " ");
        let ap = AnnotatedPassage::unlabeled(p);
        let chunks = chunk(&ap, 512, &CharQuadCounter).unwrap();
        assert_eq!(chunks.len(), 1);
        assert!(chunks[0].tokens.is_empty());
    }

    #[test]
    fn chunk_record_carries_parent() {
        let ap = passage_of(30, vec![EntitySpan::new(25, 26, "x")]);
        let chunks = chunk(&ap, 20, &one_each).unwrap();
        let rec = chunks[1].to_record();
        assert_eq!(rec.id, "doc#1");
        assert_eq!(rec.parent_id.as_deref(), Some("doc"));
        assert_eq!(rec.chunk_index, Some(1));
        let back = rec.to_passage().unwrap();
        assert_eq!(back.tokens, chunks[1].tokens);
    }
}
