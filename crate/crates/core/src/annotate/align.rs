use std::collections::HashSet;

use super::schema::Entity;
use crate::corpus::{tokenize, EntitySpan, TokenSequence};

/// Spans recovered from entity strings, plus how many entities matched nowhere.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Alignment {
    pub spans: Vec<EntitySpan>,
    pub dropped: usize,
}

/// Finds every non-overlapping, case-sensitive occurrence of each entity's
/// token sequence in `tokens`. Identical (span, type) triples are emitted once
/// and spans are returned in (start, end, type) order.
pub fn align_spans(entities: &[Entity], tokens: &TokenSequence) -> Alignment {
    let mut seen = HashSet::new();
    let mut spans = Vec::new();
    let mut dropped = 0;
    for entity in entities {
        let needle = tokenize(&entity.text).tokens;
        let n = needle.len();
        let mut matched = false;
        if n > 0 && !entity.entity_type.is_empty() {
            let mut i = 0;
            while i + n <= tokens.len() {
                if tokens.tokens[i..i + n] == needle[..] {
                    matched = true;
                    let span = EntitySpan::new(i, i + n - 1, entity.entity_type.clone());
                    if seen.insert(span.clone()) {
                        spans.push(span);
                    }
                    i += n;
                } else {
                    i += 1;
                }
            }
        }
        if !matched {
            dropped += 1;
        }
    }
    spans.sort_by(|a, b| (a.start, a.end, &a.entity_type).cmp(&(b.start, b.end, &b.entity_type)));
    Alignment { spans, dropped }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ent(text: &str, ty: &str) -> Entity {
        Entity { text: text.into(), entity_type: ty.into() }
    }

    #[test]
    fn every_occurrence_is_annotated() {
        let tokens = tokenize("stroke after stroke; Stroke");
        let a = align_spans(&[ent("stroke", "disease")], &tokens);
        assert_eq!(a.spans, vec![EntitySpan::new(0, 0, "disease"), EntitySpan::new(2, 2, "disease")]);
        assert_eq!(a.dropped, 0);
    }

    #[test]
    fn multi_token_and_missing_entities() {
        let tokens = tokenize("risk of heart attack rose");
        let a = align_spans(&[ent("heart attack", "disease"), ent("aspirin", "drug")], &tokens);
        assert_eq!(a.spans, vec![EntitySpan::new(2, 3, "disease")]);
        assert_eq!(a.dropped, 1);
    }

    #[test]
    fn occurrences_do_not_overlap_and_duplicates_collapse() {
        let tokens = tokenize("a a a");
        let a = align_spans(&[ent("a a", "x"), ent("a a", "x"), ent("", "x")], &tokens);
        assert_eq!(a.spans, vec![EntitySpan::new(0, 1, "x")]);
        assert_eq!(a.dropped, 1);
    }

    #[test]
    fn spans_reproduce_entity_text() {
        let text = "IL-6 and TNF-alpha rose; IL-6 fell";
        let tokens = tokenize(text);
        let a = align_spans(&[ent("IL-6", "gene"), ent("TNF-alpha", "gene")], &tokens);
        assert_eq!(a.spans.len(), 3);
        for s in &a.spans {
            let got = &text[tokens.offsets[s.start].0..tokens.offsets[s.end].1];
            assert!(got == "IL-6" || got == "TNF-alpha");
        }
    }
}
