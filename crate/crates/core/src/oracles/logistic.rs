use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_dim, BatchSeed, SparseDataset, StochasticOracle};
use crate::error::{Error, Result};

/// L2-regularized logistic loss
///
/// ```text
/// f(x) = (1/n) Σᵢ log(1 + exp(−yᵢ aᵢᵀx)) + (μ/2)‖x‖²
/// ```
///
/// Minibatches are drawn uniformly with replacement; a batch size equal to
/// the number of samples means the whole dataset (no sampling noise).
#[derive(Debug, Clone)]
pub struct LogisticOracle {
    data: SparseDataset,
    mu: f64,
    batch_size: usize,
}

impl LogisticOracle {
    pub fn new(data: SparseDataset, mu: f64, batch_size: usize) -> Result<Self> {
        if data.n_samples() == 0 {
            return Err(Error::EmptyDataset);
        }
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(Error::InvalidConfig("mu must be non-negative".into()));
        }
        if batch_size == 0 || batch_size > data.n_samples() {
            return Err(Error::InvalidConfig(format!(
                "batch size must lie in [1, {}]",
                data.n_samples()
            )));
        }
        Ok(LogisticOracle { data, mu, batch_size })
    }

    pub fn data(&self) -> &SparseDataset {
        &self.data
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn batch_size(&self) -> usize {
        self.batch_size
    }

    /// Sample indices of the minibatch selected by `batch`.
    pub fn batch_indices(&self, batch: BatchSeed) -> Vec<usize> {
        let n = self.data.n_samples();
        if self.batch_size == n {
            return (0..n).collect();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(batch);
        (0..self.batch_size).map(|_| rng.random_range(0..n)).collect()
    }

    /// Average loss (plus regularizer) and its gradient over `indices`.
    pub fn loss_grad_on(&self, x: &[f64], indices: &[usize]) -> (f64, Vec<f64>) {
        let mut g: Vec<f64> = x.iter().map(|v| self.mu * v).collect();
        let scale = 1.0 / indices.len() as f64;
        let mut loss = 0.0;
        for &i in indices {
            let y = self.data.label(i);
            let t = y * self.data.row_dot(i, x);
            loss += softplus(-t);
            // d/dx log(1 + e^{−t}) = −y σ(−t) a
            let w = -y * sigmoid(-t) * scale;
            let (idx, val) = self.data.row(i);
            for (&j, v) in idx.iter().zip(val) {
                g[j] += w * v;
            }
        }
        (loss * scale + 0.5 * self.mu * dot_self(x), g)
    }

    pub fn loss_on(&self, x: &[f64], indices: &[usize]) -> f64 {
        let s: f64 = indices
            .iter()
            .map(|&i| softplus(-self.data.label(i) * self.data.row_dot(i, x)))
            .sum();
        s / indices.len() as f64 + 0.5 * self.mu * dot_self(x)
    }
}

impl StochasticOracle for LogisticOracle {
    fn dim(&self) -> usize {
        self.data.n_features()
    }

    fn eval_f(&self, x: &[f64], batch: BatchSeed) -> Result<f64> {
        check_dim(self.dim(), x)?;
        Ok(self.loss_on(x, &self.batch_indices(batch)))
    }

    fn eval_g(&self, x: &[f64], batch: BatchSeed) -> Result<Vec<f64>> {
        check_dim(self.dim(), x)?;
        Ok(self.loss_grad_on(x, &self.batch_indices(batch)).1)
    }

    fn eval_fg(&self, x: &[f64], batch: BatchSeed) -> Result<(f64, Vec<f64>)> {
        check_dim(self.dim(), x)?;
        Ok(self.loss_grad_on(x, &self.batch_indices(batch)))
    }

    fn true_f(&self, x: &[f64]) -> Option<f64> {
        let all: Vec<usize> = (0..self.data.n_samples()).collect();
        Some(self.loss_on(x, &all))
    }

    fn full_gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let all: Vec<usize> = (0..self.data.n_samples()).collect();
        Some(self.loss_grad_on(x, &all).1)
    }

    fn batch_cost(&self) -> u64 {
        self.batch_size as u64
    }

    fn full_cost(&self) -> Option<u64> {
        Some(self.data.n_samples() as u64)
    }
}

fn dot_self(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// `log(1 + eᵗ)` without overflow.
#[inline]
fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

#[inline]
fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn tiny() -> SparseDataset {
        SparseDataset::from_rows(
            vec![1.0, -1.0, 1.0],
            vec![vec![(0, 1.0), (1, 2.0)], vec![(1, -1.0)], vec![(0, 0.5), (2, 3.0)]],
            3,
        )
        .unwrap()
    }

    #[test]
    fn zero_point_costs_ln2() {
        let o = LogisticOracle::new(tiny(), 0.1, 2).unwrap();
        for seed in 0..10 {
            assert_relative_eq!(o.eval_f(&[0.0; 3], seed).unwrap(), 2f64.ln(), epsilon = 1e-15);
        }
    }

    #[test]
    fn single_sample_gradient() {
        let ds = SparseDataset::from_rows(vec![1.0], vec![vec![(0, 1.0)]], 2).unwrap();
        let o = LogisticOracle::new(ds, 0.0, 1).unwrap();
        let t = 0.3;
        let g = o.eval_g(&[t, 0.0], 7).unwrap();
        assert_relative_eq!(g[0], -1.0 / (1.0 + t.exp()), epsilon = 1e-15);
        assert_eq!(g[1], 0.0);
        let h = 1e-6;
        let fd = (o.eval_f(&[t + h, 0.0], 0).unwrap() - o.eval_f(&[t - h, 0.0], 0).unwrap()) / (2.0 * h);
        assert!((fd - g[0]).abs() <= 1e-8);
    }

    #[test]
    fn full_batch_has_no_noise() {
        let o = LogisticOracle::new(tiny(), 0.1, 3).unwrap();
        let x = [0.3, -0.2, 0.1];
        let g0 = o.eval_g(&x, 0).unwrap();
        for seed in 1..20 {
            assert_eq!(o.eval_g(&x, seed).unwrap(), g0);
        }
        assert_eq!(Some(g0), o.full_gradient(&x));
    }

    #[test]
    fn extreme_margins_stay_finite() {
        let ds = SparseDataset::from_rows(vec![1.0, -1.0], vec![vec![(0, 1.0)], vec![(0, 1.0)]], 1).unwrap();
        let o = LogisticOracle::new(ds, 0.0, 2).unwrap();
        let (f, g) = o.eval_fg(&[1e4], 0).unwrap();
        assert_relative_eq!(f, 0.5 * 1e4, max_relative = 1e-12);
        assert_relative_eq!(g[0], 0.5, max_relative = 1e-12);
    }

    #[test]
    fn construction_errors() {
        let empty = SparseDataset::from_rows(vec![], vec![], 2).unwrap();
        assert!(matches!(LogisticOracle::new(empty, 0.1, 1), Err(Error::EmptyDataset)));
        assert!(LogisticOracle::new(tiny(), 0.1, 0).is_err());
        assert!(LogisticOracle::new(tiny(), 0.1, 4).is_err());
        assert!(LogisticOracle::new(tiny(), -1.0, 1).is_err());
    }
}
