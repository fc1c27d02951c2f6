use rayon::prelude::*;

use super::{decode, enumerate_spans, Backbone, EntityTypeSet, MatcherError, ScoringHead, SpanCandidate};
use super::{DEFAULT_MAX_WIDTH, DEFAULT_THRESHOLD};
use crate::corpus::{AnnotatedPassage, EntitySpan, Passage};

/// Encode, enumerate, score and decode one token sequence.
pub fn predict(
    tokens: &[String],
    labels: &EntityTypeSet,
    backbone: &Backbone,
    head: &ScoringHead,
    threshold: f64,
    max_width: usize,
) -> Result<Vec<EntitySpan>, MatcherError> {
    Ok(predict_scored(tokens, labels, backbone, head, threshold, max_width)?
        .into_iter()
        .map(|c| EntitySpan::new(c.start, c.end, labels.get(c.type_index)))
        .collect())
}

/// Like [`predict`] but keeps scores and label indices.
pub fn predict_scored(
    tokens: &[String],
    labels: &EntityTypeSet,
    backbone: &Backbone,
    head: &ScoringHead,
    threshold: f64,
    max_width: usize,
) -> Result<Vec<SpanCandidate>, MatcherError> {
    if head.dim() != backbone.dim() {
        return Err(MatcherError::DimensionMismatch { text: backbone.dim(), labels: head.dim() });
    }
    let (h_t, h_e) = backbone.encode_text(tokens, labels)?;
    let spans = enumerate_spans(h_t.len(), max_width);
    let scores = head.score(h_t.vectors.view(), h_e.vectors.view(), &spans);
    decode(&scores, &spans, threshold)
}

/// A backbone and trained head with inference settings.
#[derive(Debug, Clone)]
pub struct Matcher {
    pub backbone: Backbone,
    pub head: ScoringHead,
    pub threshold: f64,
    pub max_width: usize,
}

impl Matcher {
    pub fn new(backbone: Backbone, head: ScoringHead) -> Self {
        Self { backbone, head, threshold: DEFAULT_THRESHOLD, max_width: DEFAULT_MAX_WIDTH }
    }

    pub fn predict(&self, tokens: &[String], labels: &EntityTypeSet) -> Result<Vec<EntitySpan>, MatcherError> {
        predict(tokens, labels, &self.backbone, &self.head, self.threshold, self.max_width)
    }

    /// Tokenizes and annotates passages in parallel, preserving order.
    pub fn annotate(
        &self,
        passages: &[Passage],
        labels: &EntityTypeSet,
    ) -> Result<Vec<AnnotatedPassage>, MatcherError> {
        passages
            .par_iter()
            .map(|p| {
                let mut ap = AnnotatedPassage::unlabeled(p.clone());
                ap.spans = self.predict(&ap.tokens.tokens, labels)?;
                Ok(ap)
            })
            .collect()
    }
}
