mod common;

use biomedner::corpus::{Passage, Source};
use biomedner::dedup::{deduplicate, terms, DEFAULT_THRESHOLD};
use common::oracles::{oracle_dedup, oracle_terms};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn clusters(passages: &[Passage], per_source: bool) -> Vec<(String, Vec<String>)> {
    deduplicate(passages, DEFAULT_THRESHOLD, per_source)
        .unwrap()
        .clusters
        .into_iter()
        .map(|c| (c.representative, c.members))
        .collect()
}

#[test]
fn whole_corpus_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let corpus = common::dedup_corpus(&mut rng, 30);
        for p in &corpus {
            assert_eq!(terms(&p.text), oracle_terms(&p.text));
        }
        assert_eq!(clusters(&corpus, false), oracle_dedup(&corpus, DEFAULT_THRESHOLD));
    }
}

#[test]
fn per_source_runs_each_source_independently() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..30 {
        let corpus = common::dedup_corpus(&mut rng, 30);
        let mut expected = Vec::new();
        for source in [Source::Patent, Source::Pubmed] {
            let group: Vec<Passage> = corpus.iter().filter(|p| p.source == source).cloned().collect();
            expected.extend(oracle_dedup(&group, DEFAULT_THRESHOLD));
        }
        assert_eq!(clusters(&corpus, true), expected);

        let kept: Vec<String> = deduplicate(&corpus, DEFAULT_THRESHOLD, true).unwrap().kept.into_iter().map(|p| p.id).collect();
        let reps: std::collections::HashSet<String> = expected.into_iter().map(|(r, _)| r).collect();
        let in_order: Vec<String> = corpus.iter().filter(|p| reps.contains(&p.id)).map(|p| p.id.clone()).collect();
        assert_eq!(kept, in_order);
    }
}

#[test]
fn exact_duplicates_collapse_to_the_smallest_id() {
    let corpus = vec![
        Passage::new("b", Source::Pubmed, "kinase inhibitor dose."),
        Passage::new("a", Source::Pubmed, "kinase inhibitor dose."),
        Passage::new("c", Source::Pubmed, "renal blood flow."),
    ];
    let out = deduplicate(&corpus, DEFAULT_THRESHOLD, true).unwrap();
    assert_eq!(out.kept.iter().map(|p| p.id.as_str()).collect::<Vec<_>>(), ["a", "c"]);
}
