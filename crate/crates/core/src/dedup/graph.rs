use rayon::prelude::*;
use serde::Serialize;

use super::tfidf::{cosine, similarity_from_dot, SparseVector};
use super::union_find::UnionFind;
use super::DedupError;

/// Default similarity cut; an edge needs a cosine strictly above it.
pub const DEFAULT_THRESHOLD: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub similarity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityGraph {
    pub node_ids: Vec<String>,
    /// Sorted by `(i, j)` with `i < j`.
    pub edges: Vec<Edge>,
}

impl SimilarityGraph {
    pub fn len(&self) -> usize {
        self.node_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_ids.is_empty()
    }
}

/// Thresholded cosine graph.
///
/// Candidate pairs come from an inverted index over shared terms: a pair with
/// no common term has cosine 0 and can never exceed a positive threshold. Each
/// pair's dot product accumulates in ascending term order, the same order a
/// sorted merge uses, so similarities are bit-identical to [`cosine`].
pub fn build_graph(node_ids: Vec<String>, vectors: &[SparseVector], threshold: f64) -> Result<SimilarityGraph, DedupError> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(DedupError::InvalidThreshold(threshold));
    }
    assert_eq!(node_ids.len(), vectors.len(), "one id per vector");

    let n_terms = vectors.iter().filter_map(|v| v.entries.last()).map(|&(t, _)| t as usize + 1).max().unwrap_or(0);
    let mut postings: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_terms];
    for (doc, v) in vectors.iter().enumerate() {
        for &(t, w) in &v.entries {
            postings[t as usize].push((doc, w));
        }
    }

    let edges: Vec<Vec<Edge>> = (0..vectors.len())
        .into_par_iter()
        .map(|i| {
            let vi = &vectors[i];
            let mut acc: Vec<f64> = Vec::new();
            let mut touched: Vec<usize> = Vec::new();
            let mut seen = std::collections::HashMap::new();
            for &(t, wi) in &vi.entries {
                for &(j, wj) in &postings[t as usize] {
                    if j <= i {
                        continue;
                    }
                    let slot = *seen.entry(j).or_insert_with(|| {
                        acc.push(0.0);
                        touched.push(j);
                        acc.len() - 1
                    });
                    acc[slot] += wi * wj;
                }
            }
            let mut out: Vec<Edge> = touched
                .iter()
                .zip(&acc)
                .filter_map(|(&j, &d)| {
                    let similarity = similarity_from_dot(d, vi.norm, vectors[j].norm);
                    (similarity > threshold).then_some(Edge { i, j, similarity })
                })
                .collect();
            out.sort_by_key(|e| e.j);
            out
        })
        .collect();

    Ok(SimilarityGraph { node_ids, edges: edges.into_iter().flatten().collect() })
}

/// Connected components via union-find over the sorted edge list. Every node
/// appears in exactly one component; singletons included. Members ascend and
/// components are ordered by their smallest member.
pub fn components(graph: &SimilarityGraph) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::new(graph.len());
    for e in &graph.edges {
        uf.union(e.i, e.j);
    }
    uf.groups()
}

/// A connected component of the similarity graph and the member kept for it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DuplicateCluster {
    pub representative: String,
    pub members: Vec<String>,
    pub size: usize,
}

/// Picks, for each component, the member with the highest mean cosine to the
/// other members; ties go to the lexicographically smallest id.
pub fn select_representatives(
    components: &[Vec<usize>],
    node_ids: &[String],
    vectors: &[SparseVector],
) -> Vec<DuplicateCluster> {
    components
        .par_iter()
        .map(|members| {
            let rep = if members.len() == 1 {
                members[0]
            } else {
                let mut best: Option<(f64, usize)> = None;
                for &a in members {
                    let total: f64 = members.iter().filter(|&&b| b != a).map(|&b| cosine(&vectors[a], &vectors[b])).sum();
                    let mean = total / (members.len() - 1) as f64;
                    best = match best {
                        None => Some((mean, a)),
                        Some((m, b)) if mean > m || (mean == m && node_ids[a] < node_ids[b]) => Some((mean, a)),
                        keep => keep,
                    };
                }
                best.expect("nonempty component").1
            };
            DuplicateCluster {
                representative: node_ids[rep].clone(),
                members: members.iter().map(|&m| node_ids[m].clone()).collect(),
                size: members.len(),
            }
        })
        .collect()
}
