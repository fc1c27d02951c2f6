//! Head training: example preparation, AdamW steps, and the two-phase schedule.

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::loss::{gold_targets, loss_sum, LossSum};
use super::{enumerate_spans, AdamW, Backbone, EntityTypeSet, MatcherError, ScoringHead};
use crate::corpus::AnnotatedPassage;

/// Frozen-encoder view of one annotated passage.
#[derive(Debug, Clone)]
pub struct TrainExample {
    pub id: String,
    pub h_t: Array2<f64>,
    pub h_e: Array2<f64>,
    pub spans: Vec<(usize, usize)>,
    pub targets: Array2<f64>,
}

/// The label set a passage is trained against: its span types followed by
/// its recorded negative types. `None` when the passage has neither.
pub fn training_labels(passage: &AnnotatedPassage) -> Option<EntityTypeSet> {
    let mut labels = passage.positive_types();
    for t in &passage.negative_types {
        if !labels.contains(t) {
            labels.push(t.clone());
        }
    }
    EntityTypeSet::new(labels).ok()
}

/// Encodes a passage once and records its gold indicator matrix.
/// Returns `Ok(None)` for passages without any in-scope label.
pub fn prepare_example(
    backbone: &Backbone,
    passage: &AnnotatedPassage,
    max_width: usize,
) -> Result<Option<TrainExample>, MatcherError> {
    let Some(labels) = training_labels(passage) else {
        return Ok(None);
    };
    let (h_t, h_e) = backbone.encode_text(&passage.tokens.tokens, &labels)?;
    let spans = enumerate_spans(h_t.len(), max_width);
    let targets = gold_targets(&spans, &labels, &passage.spans)
        .map_err(|e| MatcherError::GoldOutOfRange(format!("{}: {e}", passage.id())))?;
    Ok(Some(TrainExample { id: passage.id().to_string(), h_t: h_t.vectors, h_e: h_e.vectors.clone(), spans, targets }))
}

/// Optimizer and loop settings for one training phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Learning rate for encoder parameters. Encoders are frozen here, so it is
    /// carried for configuration parity only.
    pub lr_encoder: f64,
    pub lr_head: f64,
    pub weight_decay: f64,
    pub steps: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl TrainConfig {
    pub fn pretraining() -> Self {
        Self { lr_encoder: 1e-5, lr_head: 5e-5, weight_decay: 0.01, steps: 20_000, batch_size: 8, seed: 0 }
    }

    pub fn post_training() -> Self {
        Self { lr_encoder: 5e-6, lr_head: 1e-5, weight_decay: 0.01, steps: 10_000, batch_size: 4, seed: 0 }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self::pretraining()
    }
}

/// Stepwise trainer; batches are drawn from seeded epoch permutations.
#[derive(Debug)]
pub struct Trainer {
    head: ScoringHead,
    optimizer: AdamW,
    config: TrainConfig,
    rng: ChaCha8Rng,
    order: Vec<usize>,
    cursor: usize,
    step: usize,
}

impl Trainer {
    pub fn new(head: ScoringHead, config: TrainConfig) -> Self {
        assert!(config.batch_size >= 1, "batch size must be positive");
        Self {
            head,
            optimizer: AdamW::new(config.lr_head, config.weight_decay),
            config,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            order: Vec::new(),
            cursor: 0,
            step: 0,
        }
    }

    pub fn head(&self) -> &ScoringHead {
        &self.head
    }

    pub fn into_head(self) -> ScoringHead {
        self.head
    }

    pub fn steps_taken(&self) -> usize {
        self.step
    }

    fn next_batch(&mut self, n: usize) -> Vec<usize> {
        let mut batch = Vec::with_capacity(self.config.batch_size);
        while batch.len() < self.config.batch_size {
            if self.cursor == self.order.len() {
                self.order = (0..n).collect();
                self.order.shuffle(&mut self.rng);
                self.cursor = 0;
            }
            batch.push(self.order[self.cursor]);
            self.cursor += 1;
        }
        batch
    }

    /// One optimizer step; returns the batch's mean loss before the update.
    pub fn step(&mut self, dataset: &[TrainExample]) -> Result<f64, MatcherError> {
        if dataset.is_empty() {
            return Err(MatcherError::EmptyDataset);
        }
        let batch = self.next_batch(dataset.len());
        let head = &self.head;
        let parts: Vec<LossSum> = batch
            .par_iter()
            .map(|&i| {
                let ex = &dataset[i];
                loss_sum(head, ex.h_t.view(), ex.h_e.view(), &ex.spans, &ex.targets)
            })
            .collect();
        let mut total = LossSum::zero(head.dim(), head.hidden());
        for part in &parts {
            total.add(part);
        }
        let (loss, grad) = total.mean();
        if !loss.is_finite() || !grad.is_finite() {
            return Err(MatcherError::NonFiniteLoss { step: self.step });
        }
        self.optimizer.step(&mut self.head, &grad);
        self.step += 1;
        Ok(loss)
    }
}

/// Trained head and per-step batch losses.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub head: ScoringHead,
    pub losses: Vec<f64>,
}

pub fn train_head(
    dataset: &[TrainExample],
    head: ScoringHead,
    config: TrainConfig,
) -> Result<TrainOutcome, MatcherError> {
    if dataset.is_empty() {
        return Err(MatcherError::EmptyDataset);
    }
    let mut trainer = Trainer::new(head, config);
    let mut losses = Vec::with_capacity(config.steps);
    for _ in 0..config.steps {
        losses.push(trainer.step(dataset)?);
    }
    Ok(TrainOutcome { head: trainer.into_head(), losses })
}

/// Pre-training followed by post-training, each with its own optimizer state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPhaseSchedule {
    pub pre: TrainConfig,
    pub post: TrainConfig,
}

impl Default for TwoPhaseSchedule {
    fn default() -> Self {
        Self { pre: TrainConfig::pretraining(), post: TrainConfig::post_training() }
    }
}

pub fn train_two_phase(
    pre: &[TrainExample],
    post: &[TrainExample],
    head: ScoringHead,
    schedule: TwoPhaseSchedule,
) -> Result<TrainOutcome, MatcherError> {
    let first = train_head(pre, head, schedule.pre)?;
    let second = train_head(post, first.head, schedule.post)?;
    let mut losses = first.losses;
    losses.extend(second.losses);
    Ok(TrainOutcome { head: second.head, losses })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_example(seed: u64) -> TrainExample {
        let h_t = Array2::from_shape_fn((4, 3), |(i, j)| ((seed as usize + i * 3 + j) as f64 * 0.37).sin());
        let h_e = Array2::from_shape_fn((2, 3), |(i, j)| ((i * 3 + j) as f64 * 0.91).cos());
        let spans = enumerate_spans(4, 2);
        let mut targets = Array2::zeros((spans.len(), 2));
        targets[[0, (seed % 2) as usize]] = 1.0;
        TrainExample { id: seed.to_string(), h_t, h_e, spans, targets }
    }

    #[test]
    fn deterministic_under_seed() {
        let data: Vec<_> = (0..5).map(tiny_example).collect();
        let cfg = TrainConfig { lr_encoder: 0.0, lr_head: 1e-2, weight_decay: 0.01, steps: 30, batch_size: 2, seed: 4 };
        let a = train_head(&data, ScoringHead::init(3, 5, 1), cfg).unwrap();
        let b = train_head(&data, ScoringHead::init(3, 5, 1), cfg).unwrap();
        assert_eq!(a.head, b.head);
        assert_eq!(a.losses, b.losses);
        assert!(a.losses.last().unwrap() < &a.losses[0]);
    }

    #[test]
    fn non_finite_loss_reports_the_step() {
        let mut data = vec![tiny_example(0)];
        data[0].h_t[[0, 0]] = f64::NAN;
        let cfg = TrainConfig { steps: 3, batch_size: 1, ..TrainConfig::pretraining() };
        match train_head(&data, ScoringHead::init(3, 5, 1), cfg) {
            Err(MatcherError::NonFiniteLoss { step }) => assert_eq!(step, 0),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(train_head(&[], ScoringHead::zeros(3, 5), cfg), Err(MatcherError::EmptyDataset)));
    }

    #[test]
    fn schedule_defaults() {
        let s = TwoPhaseSchedule::default();
        assert_eq!((s.pre.lr_head, s.pre.lr_encoder, s.pre.steps, s.pre.batch_size), (5e-5, 1e-5, 20_000, 8));
        assert_eq!((s.post.lr_head, s.post.lr_encoder, s.post.steps, s.post.batch_size), (1e-5, 5e-6, 10_000, 4));
        assert_eq!((s.pre.weight_decay, s.post.weight_decay), (0.01, 0.01));
    }
}
