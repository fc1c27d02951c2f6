//! Near-duplicate removal over TF-IDF cosine similarity.
//!
//! Passages become L2-normalized TF-IDF vectors, pairs whose cosine exceeds the
//! threshold are joined by an edge, and each connected component keeps a single
//! canonical member.

mod graph;
mod tfidf;
mod union_find;

use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use crate::corpus::{Passage, Source};

pub use graph::{build_graph, components, select_representatives, DuplicateCluster, Edge, SimilarityGraph, DEFAULT_THRESHOLD};
pub use tfidf::{cosine, dot, terms, vectorize, SparseVector, TfIdf};
pub use union_find::UnionFind;

#[derive(Debug, Error)]
pub enum DedupError {
    #[error("cannot vectorize an empty corpus")]
    EmptyCorpus,
    #[error("threshold must lie in (0, 1], got {0}")]
    InvalidThreshold(f64),
    #[error("duplicate passage id {0}")]
    DuplicateId(String),
}

#[derive(Debug, Clone)]
pub struct DedupOutcome {
    /// Representatives in original corpus order.
    pub kept: Vec<Passage>,
    /// One entry per component, singletons included; grouped by source when
    /// deduplicating per source.
    pub clusters: Vec<DuplicateCluster>,
}

/// Runs vectorize, graph, components and representative selection on one
/// group of passages.
pub fn dedup_group(passages: &[Passage], threshold: f64) -> Result<Vec<DuplicateCluster>, DedupError> {
    if passages.is_empty() {
        return Ok(Vec::new());
    }
    let tfidf = vectorize(passages)?;
    let ids: Vec<String> = passages.iter().map(|p| p.id.clone()).collect();
    let graph = build_graph(ids, &tfidf.vectors, threshold)?;
    let comps = components(&graph);
    Ok(select_representatives(&comps, &graph.node_ids, &tfidf.vectors))
}

/// Removes near duplicates. With `per_source`, each source is vectorized and
/// deduplicated on its own; otherwise the whole corpus is one group.
pub fn deduplicate(passages: &[Passage], threshold: f64, per_source: bool) -> Result<DedupOutcome, DedupError> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(DedupError::InvalidThreshold(threshold));
    }
    let mut ids = HashSet::new();
    for p in passages {
        if !ids.insert(p.id.as_str()) {
            return Err(DedupError::DuplicateId(p.id.clone()));
        }
    }

    let clusters = if per_source {
        let mut groups: BTreeMap<&Source, Vec<Passage>> = BTreeMap::new();
        for p in passages {
            groups.entry(&p.source).or_default().push(p.clone());
        }
        let mut all = Vec::new();
        for group in groups.values() {
            all.extend(dedup_group(group, threshold)?);
        }
        all
    } else {
        dedup_group(passages, threshold)?
    };

    let reps: HashSet<&str> = clusters.iter().map(|c| c.representative.as_str()).collect();
    let kept = passages.iter().filter(|p| reps.contains(p.id.as_str())).cloned().collect();
    Ok(DedupOutcome { kept, clusters })
}
