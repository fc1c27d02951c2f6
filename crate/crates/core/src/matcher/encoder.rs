//! Embedding backends: the encoder interface and a deterministic toy encoder.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::MatcherError;
use crate::hash::fnv1a64;

/// Maps a token list to one `dim`-wide row per token.
pub trait TokenEncoder: Send + Sync {
    /// Identity used in label-cache keys; two encoders with the same id must
    /// produce the same embeddings.
    fn id(&self) -> String;
    fn dim(&self) -> usize;
    fn encode(&self, tokens: &[String]) -> Result<Array2<f64>, MatcherError>;
}

/// Work counters shared by clones of a [`ToyEncoder`].
#[derive(Debug, Default)]
pub struct CostCounter {
    calls: AtomicU64,
    tokens: AtomicU64,
    attention: AtomicU64,
}

/// Snapshot of a [`CostCounter`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CostStats {
    /// Number of `encode` invocations.
    pub calls: u64,
    /// Sum of input lengths.
    pub tokens: u64,
    /// Sum of squared input lengths, the self-attention cost model.
    pub attention: u64,
}

impl CostCounter {
    fn record(&self, n: usize) {
        let n = n as u64;
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.tokens.fetch_add(n, Ordering::Relaxed);
        self.attention.fetch_add(n * n, Ordering::Relaxed);
    }

    pub fn snapshot(&self) -> CostStats {
        CostStats {
            calls: self.calls.load(Ordering::Relaxed),
            tokens: self.tokens.load(Ordering::Relaxed),
            attention: self.attention.load(Ordering::Relaxed),
        }
    }

    pub fn reset(&self) {
        self.calls.store(0, Ordering::Relaxed);
        self.tokens.store(0, Ordering::Relaxed);
        self.attention.store(0, Ordering::Relaxed);
    }
}

/// Deterministic stand-in for a transformer encoder.
///
/// Each token string maps to a pseudo-random vector with unit root mean
/// square (so its L2 norm is `sqrt(dim)`, the scale of layer-normalized
/// transformer states), drawn from an RNG seeded by its FNV-1a hash. The
/// output row of position `i` is the mean of the vectors at `i - 1`, `i` and
/// `i + 1` (clipped at the edges).
#[derive(Debug, Clone)]
pub struct ToyEncoder {
    dim: usize,
    seed: u64,
    cost: Arc<CostCounter>,
}

impl ToyEncoder {
    pub fn new(dim: usize, seed: u64) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Self { dim, seed, cost: Arc::new(CostCounter::default()) }
    }

    pub fn cost(&self) -> CostStats {
        self.cost.snapshot()
    }

    pub fn reset_cost(&self) {
        self.cost.reset();
    }

    /// Context-free, unit-RMS vector of a token.
    pub fn token_vector(&self, token: &str) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(fnv1a64(token.as_bytes()) ^ self.seed);
        let mut v: Vec<f64> = (0..self.dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let rms = (v.iter().map(|x| x * x).sum::<f64>() / self.dim as f64).sqrt();
        v.iter_mut().for_each(|x| *x /= rms);
        v
    }
}

impl TokenEncoder for ToyEncoder {
    fn id(&self) -> String {
        format!("toy-d{}-s{}", self.dim, self.seed)
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn encode(&self, tokens: &[String]) -> Result<Array2<f64>, MatcherError> {
        self.cost.record(tokens.len());
        let base: Vec<Vec<f64>> = tokens.iter().map(|t| self.token_vector(t)).collect();
        let n = tokens.len();
        let mut out = Array2::zeros((n, self.dim));
        for i in 0..n {
            let lo = i.saturating_sub(1);
            let hi = (i + 1).min(n - 1);
            let width = (hi - lo + 1) as f64;
            for row in &base[lo..=hi] {
                for (o, x) in out.row_mut(i).iter_mut().zip(row) {
                    *o += x / width;
                }
            }
        }
        Ok(out)
    }
}

impl<T: TokenEncoder + ?Sized> TokenEncoder for Arc<T> {
    fn id(&self) -> String {
        (**self).id()
    }
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn encode(&self, tokens: &[String]) -> Result<Array2<f64>, MatcherError> {
        (**self).encode(tokens)
    }
}
