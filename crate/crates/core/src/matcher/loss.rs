//! Binary cross-entropy over (span, label) cells and its exact gradient.

use std::collections::HashMap;

use ndarray::{Array2, ArrayView2};

use super::{EntityTypeSet, MatcherError, ScoringHead};
use crate::corpus::EntitySpan;

const PROB_FLOOR: f64 = 1e-15;

/// Mean binary cross-entropy of probabilities against 0/1 targets.
pub fn bce_loss(scores: &Array2<f64>, targets: &Array2<f64>) -> f64 {
    assert_eq!(scores.dim(), targets.dim(), "score/target shape");
    if scores.is_empty() {
        return 0.0;
    }
    let total: f64 = scores
        .iter()
        .zip(targets)
        .map(|(&p, &y)| {
            let p = p.clamp(PROB_FLOOR, 1.0 - PROB_FLOOR);
            -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
        })
        .sum();
    total / scores.len() as f64
}

/// Sum of per-cell cross-entropies computed from logits, numerically stable.
fn bce_sum_from_logits(logits: &Array2<f64>, targets: &Array2<f64>) -> f64 {
    logits
        .iter()
        .zip(targets)
        .map(|(&l, &y)| l.max(0.0) - l * y + (-l.abs()).exp().ln_1p())
        .sum()
}

/// 0/1 indicator matrix (`n_spans x k`) of gold (span, label) cells.
pub fn gold_targets(
    spans: &[(usize, usize)],
    labels: &EntityTypeSet,
    gold: &[EntitySpan],
) -> Result<Array2<f64>, MatcherError> {
    let index: HashMap<(usize, usize), usize> = spans.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let mut targets = Array2::zeros((spans.len(), labels.len()));
    for g in gold {
        let row = index.get(&(g.start, g.end)).ok_or_else(|| {
            MatcherError::GoldOutOfRange(format!("span ({}, {}) is not enumerated", g.start, g.end))
        })?;
        let col = labels
            .index_of(&g.entity_type)
            .ok_or_else(|| MatcherError::GoldOutOfRange(format!("type {:?} is not in the label set", g.entity_type)))?;
        targets[[*row, col]] = 1.0;
    }
    Ok(targets)
}

/// Unnormalized loss and gradient sums over the cells of one or more examples.
#[derive(Debug, Clone)]
pub struct LossSum {
    pub loss: f64,
    pub cells: usize,
    pub grad: ScoringHead,
}

impl LossSum {
    pub fn zero(dim: usize, hidden: usize) -> Self {
        Self { loss: 0.0, cells: 0, grad: ScoringHead::zeros(dim, hidden) }
    }

    pub fn add(&mut self, other: &LossSum) {
        self.loss += other.loss;
        self.cells += other.cells;
        self.grad.add_scaled(&other.grad, 1.0);
    }

    /// Mean loss and mean gradient over all accumulated cells.
    pub fn mean(mut self) -> (f64, ScoringHead) {
        if self.cells == 0 {
            return (0.0, self.grad);
        }
        let n = self.cells as f64;
        for t in self.grad.tensors_mut() {
            t.iter_mut().for_each(|g| *g /= n);
        }
        (self.loss / n, self.grad)
    }
}

/// Summed cross-entropy and summed gradient for one example.
pub fn loss_sum(
    head: &ScoringHead,
    h_t: ArrayView2<f64>,
    h_e: ArrayView2<f64>,
    spans: &[(usize, usize)],
    targets: &Array2<f64>,
) -> LossSum {
    let fwd = head.forward(h_t, h_e, spans);
    let loss = bce_sum_from_logits(&fwd.logits, targets);
    let g = &fwd.logits.mapv(super::head::sigmoid) - targets;
    let grad = head.backward(&fwd, h_t, h_e, spans, &g);
    LossSum { loss, cells: targets.len(), grad }
}

/// Mean cross-entropy over the cells of one example and its gradient.
pub fn loss_and_grad(
    head: &ScoringHead,
    h_t: ArrayView2<f64>,
    h_e: ArrayView2<f64>,
    spans: &[(usize, usize)],
    targets: &Array2<f64>,
) -> (f64, ScoringHead) {
    loss_sum(head, h_t, h_e, spans, targets).mean()
}
