use super::ScoringHead;

/// Adam with decoupled weight decay.
///
/// Each step first shrinks parameters by `lr * weight_decay`, then applies the
/// bias-corrected Adam update.
#[derive(Debug, Clone)]
pub struct AdamW {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub weight_decay: f64,
    step: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl AdamW {
    pub fn new(lr: f64, weight_decay: f64) -> Self {
        Self { lr, beta1: 0.9, beta2: 0.999, eps: 1e-8, weight_decay, step: 0, m: Vec::new(), v: Vec::new() }
    }

    pub fn steps_taken(&self) -> u64 {
        self.step
    }

    /// Updates `params` in place from `grads`.
    pub fn step_slice(&mut self, params: &mut [f64], grads: &[f64]) {
        assert_eq!(params.len(), grads.len(), "parameter/gradient length");
        if self.m.is_empty() {
            self.m = vec![0.0; params.len()];
            self.v = vec![0.0; params.len()];
        }
        assert_eq!(self.m.len(), params.len(), "optimizer state size");
        self.step += 1;
        let t = self.step as i32;
        let c1 = 1.0 - self.beta1.powi(t);
        let c2 = 1.0 - self.beta2.powi(t);
        for (((p, &g), m), v) in params.iter_mut().zip(grads).zip(&mut self.m).zip(&mut self.v) {
            *p -= self.lr * self.weight_decay * *p;
            *m = self.beta1 * *m + (1.0 - self.beta1) * g;
            *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *p -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }

    pub fn step(&mut self, head: &mut ScoringHead, grad: &ScoringHead) {
        let mut params = head.params();
        self.step_slice(&mut params, &grad.params());
        head.set_params(&params);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_closed_form() {
        let (p0, g, lr, wd) = (0.8_f64, 0.3_f64, 0.01, 0.1);
        let mut opt = AdamW::new(lr, wd);
        let mut p = [p0];
        opt.step_slice(&mut p, &[g]);
        // After one step m_hat = g and v_hat = g^2.
        let expected = p0 * (1.0 - lr * wd) - lr * g / (g.abs() + 1e-8);
        assert!((p[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn second_step_closed_form() {
        let (lr, wd) = (0.05, 0.01);
        let mut opt = AdamW::new(lr, wd);
        let mut p = [1.0_f64];
        opt.step_slice(&mut p, &[0.5]);
        let p1 = p[0];
        opt.step_slice(&mut p, &[-0.2]);
        let m = 0.9 * (0.1 * 0.5) + 0.1 * -0.2;
        let v = 0.999 * (0.001 * 0.25) + 0.001 * 0.04;
        let m_hat = m / (1.0 - 0.81);
        let v_hat = v / (1.0 - 0.999f64.powi(2));
        let expected = p1 * (1.0 - lr * wd) - lr * m_hat / (v_hat.sqrt() + 1e-8);
        assert!((p[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn zero_rate_is_a_no_op_and_decay_alone_shrinks() {
        let mut opt = AdamW::new(0.0, 0.0);
        let mut p = [0.3, -1.7, 0.0];
        opt.step_slice(&mut p, &[1.0, -2.0, 0.5]);
        assert_eq!(p, [0.3, -1.7, 0.0]);

        let mut opt = AdamW::new(0.1, 0.5);
        let mut p = [2.0];
        opt.step_slice(&mut p, &[0.0]);
        assert!((p[0] - 2.0 * 0.95).abs() < 1e-15);
    }
}
