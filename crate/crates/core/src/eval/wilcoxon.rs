//! One-sided Wilcoxon signed-rank test for paired per-passage scores.

use serde::{Deserialize, Serialize};

use super::EvalError;

/// Largest number of nonzero differences for which the null distribution is
/// enumerated exactly.
pub const EXACT_MAX_N: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WilcoxonMethod {
    Exact,
    NormalApprox,
    /// Every difference was zero; no evidence either way.
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// Sum of the ranks of positive differences (W+).
    pub statistic: f64,
    pub n_effective: usize,
    /// P(W+ >= observed) under the null, for the alternative "a > b".
    pub p_value: f64,
    pub method: WilcoxonMethod,
}

/// Average ranks (1-based) of `values`, with tie-group sizes.
pub fn average_ranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j + 2) as f64 / 2.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        ties.push(j - i + 1);
        i = j + 1;
    }
    (ranks, ties)
}

/// Tests whether `a` tends to exceed `b`, pairing elements by index.
///
/// Zero differences are discarded. Exact p-values come from the distribution
/// of W+ over all `2^n` sign assignments of the observed (possibly tied)
/// ranks; above [`EXACT_MAX_N`] a normal approximation with tie-corrected
/// variance and continuity correction is used.
pub fn wilcoxon_one_sided(a: &[f64], b: &[f64]) -> Result<WilcoxonResult, EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::LengthMismatch { a: a.len(), b: b.len() });
    }
    if a.is_empty() {
        return Err(EvalError::EmptySeries);
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(EvalError::NonFinite);
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    let n = diffs.len();
    if n == 0 {
        return Ok(WilcoxonResult { statistic: 0.0, n_effective: 0, p_value: 1.0, method: WilcoxonMethod::Inconclusive });
    }
    let magnitudes: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let (ranks, ties) = average_ranks(&magnitudes);
    let w_plus: f64 = diffs.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();

    if n <= EXACT_MAX_N {
        let p = exact_upper_tail(&ranks, w_plus);
        return Ok(WilcoxonResult { statistic: w_plus, n_effective: n, p_value: p, method: WilcoxonMethod::Exact });
    }
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / 48.0;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term;
    let z = (w_plus - mean - 0.5) / var.sqrt();
    let p = (0.5 * libm::erfc(z / std::f64::consts::SQRT_2)).clamp(0.0, 1.0);
    Ok(WilcoxonResult { statistic: w_plus, n_effective: n, p_value: p, method: WilcoxonMethod::NormalApprox })
}

/// `P(W+ >= observed)` when each rank independently carries a positive sign
/// with probability 1/2. Ranks are multiples of 1/2, so the distribution is
/// built over doubled integer ranks.
fn exact_upper_tail(ranks: &[f64], observed: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let max: usize = doubled.iter().sum();
    let mut counts = vec![0u64; max + 1];
    counts[0] = 1;
    let mut reach = 0;
    for &r in &doubled {
        for s in (0..=reach).rev() {
            if counts[s] > 0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let threshold = (2.0 * observed).round() as usize;
    let hits: u64 = counts[threshold..].iter().sum();
    hits as f64 / (1u64 << ranks.len()) as f64
}
