//! Straightforward reference implementations used to cross-check the library.

use std::collections::{BTreeMap, BTreeSet};

use biomedner::corpus::{EntitySpan, Passage};

/// Lowercased alphanumeric word pieces split on whitespace, for corpora whose
/// words are separated by single spaces with punctuation only at word ends.
pub fn oracle_terms(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| w.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase())
        .filter(|w| !w.is_empty())
        .collect()
}

/// Dense smoothed TF-IDF with L2 normalization over the sorted vocabulary.
pub fn oracle_tfidf(passages: &[Passage]) -> Vec<Vec<f64>> {
    let docs: Vec<Vec<String>> = passages.iter().map(|p| oracle_terms(&p.text)).collect();
    let vocab: Vec<String> = docs.iter().flatten().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let n = passages.len() as f64;
    let idf: Vec<f64> = vocab
        .iter()
        .map(|t| {
            let df = docs.iter().filter(|d| d.contains(t)).count() as f64;
            ((1.0 + n) / (1.0 + df)).ln() + 1.0
        })
        .collect();
    docs.iter()
        .map(|d| {
            let raw: Vec<f64> =
                vocab.iter().zip(&idf).map(|(t, w)| d.iter().filter(|x| *x == t).count() as f64 * w).collect();
            let norm = raw.iter().filter(|w| **w != 0.0).map(|w| w * w).sum::<f64>().sqrt();
            if norm == 0.0 {
                raw
            } else {
                raw.iter().map(|w| w / norm).collect()
            }
        })
        .collect()
}

pub fn oracle_cosine(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).filter(|(x, y)| **x != 0.0 && **y != 0.0).map(|(x, y)| x * y).sum()
}

/// Brute-force clustering: all-pairs cosine, depth-first components, and the
/// member with the best mean similarity (smallest id on ties). Returns
/// `(representative, members)` per component ordered by smallest member index.
#[allow(clippy::needless_range_loop)]
pub fn oracle_dedup(passages: &[Passage], threshold: f64) -> Vec<(String, Vec<String>)> {
    let vectors = oracle_tfidf(passages);
    let n = passages.len();
    let adjacent = |i: usize, j: usize| oracle_cosine(&vectors[i.min(j)], &vectors[i.max(j)]) > threshold;
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for root in 0..n {
        if seen[root] {
            continue;
        }
        let mut members = vec![root];
        let mut stack = vec![root];
        seen[root] = true;
        while let Some(u) = stack.pop() {
            for v in 0..n {
                if !seen[v] && v != u && adjacent(u, v) {
                    seen[v] = true;
                    members.push(v);
                    stack.push(v);
                }
            }
        }
        members.sort_unstable();
        let mut best = members[0];
        let mut best_mean = f64::NEG_INFINITY;
        if members.len() > 1 {
            for &a in &members {
                let sum: f64 = members.iter().filter(|&&b| b != a).map(|&b| oracle_cosine(&vectors[a], &vectors[b])).sum();
                let mean = sum / (members.len() - 1) as f64;
                if mean > best_mean || (mean == best_mean && passages[a].id < passages[best].id) {
                    best = a;
                    best_mean = mean;
                }
            }
        }
        out.push((passages[best].id.clone(), members.iter().map(|&m| passages[m].id.clone()).collect()));
    }
    out
}

/// Micro F1, macro mean F1 and macro median F1 by explicit counting.
pub fn oracle_metrics(gold: &[Vec<EntitySpan>], pred: &[Vec<EntitySpan>]) -> (f64, f64, f64) {
    let mut per_type: BTreeMap<String, (usize, usize, usize)> = BTreeMap::new();
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for (g, p) in gold.iter().zip(pred) {
        let mut unmatched: Vec<&EntitySpan> = g.iter().collect();
        for s in p {
            let entry = per_type.entry(s.entity_type.clone()).or_default();
            if let Some(k) = unmatched.iter().position(|u| *u == s) {
                unmatched.remove(k);
                tp += 1;
                entry.0 += 1;
            } else {
                fp += 1;
                entry.1 += 1;
            }
        }
        for s in unmatched {
            fn_ += 1;
            per_type.entry(s.entity_type.clone()).or_default().2 += 1;
        }
    }
    let f1 = |tp: usize, fp: usize, fn_: usize| {
        if tp + fp + fn_ == 0 {
            1.0
        } else {
            2.0 * tp as f64 / (2 * tp + fp + fn_) as f64
        }
    };
    let micro = f1(tp, fp, fn_);
    let mut scores: Vec<f64> = per_type.values().map(|&(a, b, c)| f1(a, b, c)).collect();
    if scores.is_empty() {
        return (micro, 1.0, 1.0);
    }
    let mean = scores.iter().sum::<f64>() / scores.len() as f64;
    scores.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = scores.len();
    let median = if k % 2 == 1 { scores[k / 2] } else { (scores[k / 2 - 1] + scores[k / 2]) / 2.0 };
    (micro, mean, median)
}

/// One-sided Wilcoxon p-value `P(W+ >= observed)` by enumerating all sign
/// assignments of the nonzero differences.
pub fn oracle_wilcoxon_p(a: &[f64], b: &[f64]) -> (f64, usize) {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    let n = d.len();
    let ranks: Vec<f64> = d
        .iter()
        .map(|x| {
            let below = d.iter().filter(|y| y.abs() < x.abs()).count() as f64;
            let equal = d.iter().filter(|y| y.abs() == x.abs()).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect();
    let observed: f64 = d.iter().zip(&ranks).filter(|(x, _)| **x > 0.0).map(|(_, r)| r).sum();
    let mut hits = 0u64;
    for mask in 0u64..(1 << n) {
        let w: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        if w >= observed - 1e-9 {
            hits += 1;
        }
    }
    (hits as f64 / (1u64 << n) as f64, n)
}

/// Greedy decoding by repeated arg-max over the remaining admissible cells.
/// `scores[row][type]` belongs to `spans[row]`.
pub fn oracle_greedy(scores: &[Vec<f64>], spans: &[(usize, usize)], threshold: f64) -> Vec<(usize, usize, usize)> {
    let mut taken: Vec<(usize, usize, usize)> = Vec::new();
    loop {
        let mut best: Option<(f64, usize, usize, usize)> = None;
        for (row, &(s, e)) in spans.iter().enumerate() {
            if taken.iter().any(|&(ts, te, _)| s <= te && ts <= e) {
                continue;
            }
            for (k, &score) in scores[row].iter().enumerate() {
                if score < threshold {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bs, bst, ben, bk)) => {
                        score > bs
                            || (score == bs
                                && (s < bst || (s == bst && (e - s < ben - bst || (e - s == ben - bst && k < bk)))))
                    }
                };
                if better {
                    best = Some((score, s, e, k));
                }
            }
        }
        match best {
            Some((_, s, e, k)) => taken.push((s, e, k)),
            None => break,
        }
    }
    taken.sort_unstable();
    taken
}
