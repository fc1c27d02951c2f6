use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;

use crate::corpus::{tokenize, Passage};

use super::DedupError;

/// Case-folded alphanumeric terms of a text, in order.
pub fn terms(text: &str) -> Vec<String> {
    tokenize(text)
        .tokens
        .into_iter()
        .filter(|t| t.chars().any(char::is_alphanumeric))
        .map(|t| t.to_lowercase())
        .collect()
}

/// Sparse vector with strictly increasing term ids and positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    pub entries: Vec<(u32, f64)>,
    /// Euclidean norm of `entries`.
    pub norm: f64,
    /// Norm before L2 normalization (equal to `norm` for unnormalized vectors).
    pub raw_norm: f64,
}

impl SparseVector {
    /// Builds a vector from entries sorted by term id.
    pub fn new(entries: Vec<(u32, f64)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|&(_, w)| w > 0.0));
        let norm = entries.iter().map(|&(_, w)| w * w).sum::<f64>().sqrt();
        Self { entries, norm, raw_norm: norm }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Copy scaled to unit length (`norm` set to exactly 1); empty vectors
    /// stay empty with norm 0.
    pub fn normalized(&self) -> Self {
        if self.norm == 0.0 {
            return self.clone();
        }
        let entries = self.entries.iter().map(|&(t, w)| (t, w / self.norm)).collect();
        Self { entries, norm: 1.0, raw_norm: self.raw_norm }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.entries.iter().map(|&(t, w)| (t, w * factor)).collect())
    }
}

/// Sparse dot product by merging the two sorted entry lists.
pub fn dot(a: &SparseVector, b: &SparseVector) -> f64 {
    let (mut i, mut j, mut acc) = (0, 0, 0.0);
    while i < a.entries.len() && j < b.entries.len() {
        let (ta, wa) = a.entries[i];
        let (tb, wb) = b.entries[j];
        match ta.cmp(&tb) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += wa * wb;
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

pub(crate) fn similarity_from_dot(dot: f64, norm_a: f64, norm_b: f64) -> f64 {
    if norm_a == 0.0 || norm_b == 0.0 {
        0.0
    } else {
        dot / (norm_a * norm_b)
    }
}

/// Cosine similarity; 0 when either vector is empty.
pub fn cosine(a: &SparseVector, b: &SparseVector) -> f64 {
    similarity_from_dot(dot(a, b), a.norm, b.norm)
}

#[derive(Debug, Clone)]
pub struct TfIdf {
    /// Term to id; ids follow sorted term order.
    pub vocabulary: BTreeMap<String, u32>,
    pub vectors: Vec<SparseVector>,
}

/// Raw-count TF times smoothed IDF `ln((1 + N) / (1 + df)) + 1`, then L2
/// normalization.
pub fn vectorize(passages: &[Passage]) -> Result<TfIdf, DedupError> {
    if passages.is_empty() {
        return Err(DedupError::EmptyCorpus);
    }
    let counts: Vec<HashMap<String, usize>> = passages
        .par_iter()
        .map(|p| {
            let mut m = HashMap::new();
            for t in terms(&p.text) {
                *m.entry(t).or_insert(0usize) += 1;
            }
            m
        })
        .collect();

    let all_terms: BTreeSet<&String> = counts.iter().flat_map(|m| m.keys()).collect();
    let vocabulary: BTreeMap<String, u32> =
        all_terms.into_iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();

    let mut df = vec![0usize; vocabulary.len()];
    for m in &counts {
        for t in m.keys() {
            df[vocabulary[t] as usize] += 1;
        }
    }
    let n = passages.len() as f64;
    let idf: Vec<f64> = df.iter().map(|&d| ((1.0 + n) / (1.0 + d as f64)).ln() + 1.0).collect();

    let vectors = counts
        .par_iter()
        .map(|m| {
            let mut entries: Vec<(u32, f64)> = m
                .iter()
                .map(|(t, &tf)| {
                    let id = vocabulary[t];
                    (id, tf as f64 * idf[id as usize])
                })
                .collect();
            entries.sort_unstable_by_key(|&(id, _)| id);
            SparseVector::new(entries).normalized()
        })
        .collect();

    Ok(TfIdf { vocabulary, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Source;

    fn ps(texts: &[&str]) -> Vec<Passage> {
        texts.iter().enumerate().map(|(i, t)| Passage::new(format!("p{i}"), Source::Pubmed, *t)).collect()
    }

    #[test]
    fn identical_passages_have_cosine_one() {
        let tf = vectorize(&ps(&["aspirin", "aspirin"])).unwrap();
        assert_eq!(tf.vectors[0], tf.vectors[1]);
        assert!((cosine(&tf.vectors[0], &tf.vectors[1]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_doc_weights_by_hand() {
        // N = 2; idf(a) = ln(3/3) + 1 = 1; idf(b) = idf(c) = ln(3/2) + 1
        let tf = vectorize(&ps(&["a b", "A c"])).unwrap();
        assert_eq!(tf.vocabulary.keys().collect::<Vec<_>>(), ["a", "b", "c"]);
        let rare = 1.5f64.ln() + 1.0;
        let raw = (1.0 + rare * rare).sqrt();
        let v0 = &tf.vectors[0];
        assert_eq!(v0.entries.len(), 2);
        assert!((v0.entries[0].1 - 1.0 / raw).abs() < 1e-15);
        assert!((v0.entries[1].1 - rare / raw).abs() < 1e-15);
        assert!((v0.raw_norm - raw).abs() < 1e-15);
        assert!((v0.norm - 1.0).abs() < 1e-15);
        let expected = 1.0 / (1.0 + rare * rare);
        assert!((cosine(&tf.vectors[0], &tf.vectors[1]) - expected).abs() < 1e-15);
    }

    #[test]
    fn term_free_passage_has_empty_vector() {
        let tf = vectorize(&ps(&["...", "a b"])).unwrap();
        assert!(tf.vectors[0].is_empty());
        assert_eq!(tf.vectors[0].norm, 0.0);
        assert_eq!(cosine(&tf.vectors[0], &tf.vectors[1]), 0.0);
        assert_eq!(cosine(&tf.vectors[0], &tf.vectors[0]), 0.0);
    }

    #[test]
    fn empty_corpus_rejected() {
        assert!(matches!(vectorize(&[]), Err(DedupError::EmptyCorpus)));
    }

    #[test]
    fn norm_invariant_holds() {
        let tf = vectorize(&ps(&["x y y z", "z z q", "x"])).unwrap();
        for v in &tf.vectors {
            let n: f64 = v.entries.iter().map(|e| e.1 * e.1).sum::<f64>().sqrt();
            assert!((n - v.norm).abs() <= 1e-9 * n);
            assert!(v.entries.windows(2).all(|w| w[0].0 < w[1].0));
        }
    }
}
