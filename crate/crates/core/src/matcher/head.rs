//! The span-to-label scoring head and its forward/backward passes.

use ndarray::{s, Array1, Array2, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Parameters of the scoring head.
///
/// A span `(s, e)` is represented as `r = W2 gelu(W1 [h_s; h_e] + b1) + b2`,
/// each label as `q = Wl h_label + bl`, and the logit is `r . q`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoringHead {
    /// `hidden x 2d`
    pub w1: Array2<f64>,
    pub b1: Array1<f64>,
    /// `d x hidden`
    pub w2: Array2<f64>,
    pub b2: Array1<f64>,
    /// `d x d`
    pub wl: Array2<f64>,
    pub bl: Array1<f64>,
}

impl ScoringHead {
    pub fn zeros(dim: usize, hidden: usize) -> Self {
        Self {
            w1: Array2::zeros((hidden, 2 * dim)),
            b1: Array1::zeros(hidden),
            w2: Array2::zeros((dim, hidden)),
            b2: Array1::zeros(dim),
            wl: Array2::zeros((dim, dim)),
            bl: Array1::zeros(dim),
        }
    }

    /// Every tensor drawn uniformly from `[-1/sqrt(fan_in), 1/sqrt(fan_in)]`.
    pub fn init(dim: usize, hidden: usize, seed: u64) -> Self {
        let mut head = Self::zeros(dim, hidden);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fans = [2 * dim, 2 * dim, hidden, hidden, dim, dim];
        for (tensor, fan_in) in head.tensors_mut().into_iter().zip(fans) {
            let bound = 1.0 / (fan_in as f64).sqrt();
            for p in tensor {
                *p = rng.random_range(-bound..=bound);
            }
        }
        head
    }

    pub fn dim(&self) -> usize {
        self.w2.nrows()
    }

    pub fn hidden(&self) -> usize {
        self.w1.nrows()
    }

    pub fn param_count(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    /// Parameter tensors in serialization order: w1, b1, w2, b2, wl, bl.
    pub fn tensors(&self) -> [&[f64]; 6] {
        [
            self.w1.as_slice().expect("standard layout"),
            self.b1.as_slice().expect("standard layout"),
            self.w2.as_slice().expect("standard layout"),
            self.b2.as_slice().expect("standard layout"),
            self.wl.as_slice().expect("standard layout"),
            self.bl.as_slice().expect("standard layout"),
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut [f64]; 6] {
        [
            self.w1.as_slice_mut().expect("standard layout"),
            self.b1.as_slice_mut().expect("standard layout"),
            self.w2.as_slice_mut().expect("standard layout"),
            self.b2.as_slice_mut().expect("standard layout"),
            self.wl.as_slice_mut().expect("standard layout"),
            self.bl.as_slice_mut().expect("standard layout"),
        ]
    }

    pub fn params(&self) -> Vec<f64> {
        self.tensors().concat()
    }

    /// Overwrites all parameters from a flat vector in serialization order.
    pub fn set_params(&mut self, flat: &[f64]) {
        assert_eq!(flat.len(), self.param_count(), "parameter count");
        let mut offset = 0;
        for t in self.tensors_mut() {
            t.copy_from_slice(&flat[offset..offset + t.len()]);
            offset += t.len();
        }
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|x| x.is_finite()))
    }

    /// `self += scale * other`, tensor by tensor.
    pub fn add_scaled(&mut self, other: &ScoringHead, scale: f64) {
        for (a, b) in self.tensors_mut().into_iter().zip(other.tensors()) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += scale * y;
            }
        }
    }

    /// Runs the head and keeps the intermediates needed for backprop.
    ///
    /// The first layer is applied per token rather than per span:
    /// `W1 [h_s; h_e] = W1_start h_s + W1_end h_e`, so each token is projected
    /// once and spans only gather and add rows.
    pub fn forward(&self, h_t: ArrayView2<f64>, h_e: ArrayView2<f64>, spans: &[(usize, usize)]) -> Forward {
        let d = self.dim();
        assert_eq!(h_t.ncols(), d, "text embedding width");
        assert_eq!(h_e.ncols(), d, "label embedding width");
        let from_start = h_t.dot(&self.w1.slice(s![.., ..d]).t());
        let from_end = h_t.dot(&self.w1.slice(s![.., d..]).t());
        let mut z1 = Array2::zeros((spans.len(), self.hidden()));
        for (mut row, &(s, e)) in z1.rows_mut().into_iter().zip(spans) {
            row.assign(&from_start.row(s));
            row += &from_end.row(e);
            row += &self.b1;
        }
        let a1 = z1.mapv(gelu);
        let r = a1.dot(&self.w2.t()) + &self.b2;
        let q = h_e.dot(&self.wl.t()) + &self.bl;
        let logits = r.dot(&q.t());
        Forward { z1, a1, r, q, logits }
    }

    /// Gradient of a scalar loss with respect to every parameter, given the
    /// loss gradient `g` with respect to the logits (`n_spans x k`).
    pub fn backward(
        &self,
        fwd: &Forward,
        h_t: ArrayView2<f64>,
        h_e: ArrayView2<f64>,
        spans: &[(usize, usize)],
        g: &Array2<f64>,
    ) -> ScoringHead {
        let d = self.dim();
        let d_r = g.dot(&fwd.q);
        let d_q = g.t().dot(&fwd.r);
        let d_wl = d_q.t().dot(&h_e);
        let d_bl = d_q.sum_axis(Axis(0));
        let d_w2 = d_r.t().dot(&fwd.a1);
        let d_b2 = d_r.sum_axis(Axis(0));
        let d_a1 = d_r.dot(&self.w2);
        let d_z1 = d_a1 * fwd.z1.mapv(gelu_grad);
        let mut to_start = Array2::<f64>::zeros((h_t.nrows(), self.hidden()));
        let mut to_end = Array2::<f64>::zeros((h_t.nrows(), self.hidden()));
        for (row, &(s, e)) in d_z1.rows().into_iter().zip(spans) {
            let mut a = to_start.row_mut(s);
            a += &row;
            let mut b = to_end.row_mut(e);
            b += &row;
        }
        let mut d_w1 = Array2::zeros((self.hidden(), 2 * d));
        d_w1.slice_mut(s![.., ..d]).assign(&to_start.t().dot(&h_t));
        d_w1.slice_mut(s![.., d..]).assign(&to_end.t().dot(&h_t));
        let d_b1 = d_z1.sum_axis(Axis(0));
        ScoringHead {
            w1: d_w1,
            b1: d_b1,
            w2: standard(d_w2),
            b2: d_b2,
            wl: standard(d_wl),
            bl: d_bl,
        }
    }

    /// Sigmoid scores for every (span, label) cell.
    pub fn score(&self, h_t: ArrayView2<f64>, h_e: ArrayView2<f64>, spans: &[(usize, usize)]) -> Array2<f64> {
        self.forward(h_t, h_e, spans).logits.mapv(sigmoid)
    }
}

fn standard(m: Array2<f64>) -> Array2<f64> {
    if m.is_standard_layout() {
        m
    } else {
        m.as_standard_layout().into_owned()
    }
}

/// Intermediate values of one forward pass.
#[derive(Debug, Clone)]
pub struct Forward {
    pub z1: Array2<f64>,
    pub a1: Array2<f64>,
    pub r: Array2<f64>,
    pub q: Array2<f64>,
    pub logits: Array2<f64>,
}

const GELU_C: f64 = 0.797_884_560_802_865_4; // sqrt(2 / pi)
const GELU_A: f64 = 0.044_715;

/// Tanh approximation of the Gaussian error linear unit.
pub fn gelu(x: f64) -> f64 {
    0.5 * x * (1.0 + (GELU_C * (x + GELU_A * x * x * x)).tanh())
}

pub fn gelu_grad(x: f64) -> f64 {
    let t = (GELU_C * (x + GELU_A * x * x * x)).tanh();
    0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * GELU_C * (1.0 + 3.0 * GELU_A * x * x)
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}
