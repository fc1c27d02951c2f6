//! Shared fixtures and independent oracles for the integration suites.
#![allow(dead_code)]

use std::collections::BTreeMap;

use biomedner::corpus::{tokenize, AnnotatedPassage, EntitySpan, Passage, Source};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub mod oracles;

pub const ENTITY_LEXICON: [(&str, &[&str]); 3] = [
    ("drug", &["aspirin", "metformin", "warfarin", "imatinib", "cisplatin", "rituximab"]),
    ("disease", &["asthma", "psoriasis", "glioma", "sepsis", "anemia", "lupus"]),
    ("gene", &["BRCA1", "EGFR", "KRAS", "TP53", "HER2", "ALK"]),
];

pub const FILLER: [&str; 16] = [
    "patients", "were", "treated", "with", "in", "the", "study", "and", "showed", "response", "after", "weeks",
    "cohort", "reported", "for", "risk",
];

/// Annotated passages of random filler in which each single-token mention is
/// framed as "given <mention> daily". Every passage lists all lexicon types as
/// in scope, so unmatched types are recorded as negatives.
pub fn cued_ner_dataset(
    n: usize,
    seed: u64,
    lengths: std::ops::RangeInclusive<usize>,
    max_mentions: usize,
) -> Vec<AnnotatedPassage> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let universe: Vec<String> = ENTITY_LEXICON.iter().map(|(t, _)| t.to_string()).collect();
    (0..n)
        .map(|i| {
            let len = rng.random_range(lengths.clone());
            let filler: Vec<&str> = (0..len).map(|_| *FILLER.choose(&mut rng).unwrap()).collect();
            let mentions = rng.random_range(1..=max_mentions.min(len));
            let slots = rand::seq::index::sample(&mut rng, len + 1, mentions).into_vec();
            let mut words: Vec<String> = Vec::with_capacity(len + 3 * mentions);
            let mut gold: BTreeMap<usize, String> = BTreeMap::new();
            for pos in 0..=len {
                if slots.contains(&pos) {
                    let (ty, names) = ENTITY_LEXICON.choose(&mut rng).unwrap();
                    words.push("given".to_string());
                    gold.insert(words.len(), ty.to_string());
                    words.push(names.choose(&mut rng).unwrap().to_string());
                    words.push("daily".to_string());
                }
                if let Some(w) = filler.get(pos) {
                    words.push(w.to_string());
                }
            }
            let text = words.join(" ");
            let tokens = tokenize(&text);
            let spans = gold.into_iter().map(|(p, t)| EntitySpan::new(p, p, t)).collect();
            let mut ap =
                AnnotatedPassage::new(Passage::new(format!("syn-{i:03}"), Source::Pubmed, text), tokens, spans, vec![])
                    .expect("synthetic passage is valid");
            ap.record_negatives(&universe);
            ap
        })
        .collect()
}

const DEDUP_VOCAB: [&str; 14] = [
    "tumor", "cells", "growth", "kinase", "inhibitor", "dose", "trial", "mice", "liver", "protein", "binding",
    "signal", "blood", "renal",
];

/// Corpus of up to `max_n` short passages in which near and exact duplicates
/// are common: each passage is either fresh random text or a copy of an
/// earlier one with zero to two words replaced. Ids are shuffled so that id
/// order differs from corpus order.
pub fn dedup_corpus(rng: &mut ChaCha8Rng, max_n: usize) -> Vec<Passage> {
    let n = rng.random_range(1..=max_n);
    let mut texts: Vec<Vec<&str>> = Vec::with_capacity(n);
    for _ in 0..n {
        let words = if !texts.is_empty() && rng.random_bool(0.5) {
            let mut w = texts.choose(rng).unwrap().clone();
            for _ in 0..rng.random_range(0..=2) {
                let at = rng.random_range(0..w.len());
                w[at] = DEDUP_VOCAB.choose(rng).unwrap();
            }
            w
        } else {
            let len = rng.random_range(1..=12);
            (0..len).map(|_| *DEDUP_VOCAB.choose(rng).unwrap()).collect()
        };
        texts.push(words);
    }
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(rng);
    texts
        .into_iter()
        .zip(ids)
        .map(|(w, id)| {
            let source = if rng.random_bool(0.5) { Source::Pubmed } else { Source::Patent };
            Passage::new(format!("d{id:03}"), source, format!("{}.", w.join(" ")))
        })
        .collect()
}
