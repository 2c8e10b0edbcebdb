use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{check_dim, BatchSeed, StochasticOracle};
use crate::error::{Error, Result};

/// Chained Rosenbrock function `Σ 100(xᵢ₊₁ − xᵢ²)² + (1 − xᵢ)²` with optional
/// additive Gaussian gradient noise. Minimum 0 at `(1, …, 1)`.
#[derive(Debug, Clone)]
pub struct Rosenbrock {
    dim: usize,
    sigma_g: f64,
}

impl Rosenbrock {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidConfig("rosenbrock needs at least two variables".into()));
        }
        Ok(Rosenbrock { dim, sigma_g: 0.0 })
    }

    pub fn with_gradient_noise(mut self, sigma_g: f64) -> Self {
        self.sigma_g = sigma_g;
        self
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        x.windows(2)
            .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
            .sum()
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; x.len()];
        for i in 0..x.len() - 1 {
            let t = x[i + 1] - x[i] * x[i];
            g[i] += -400.0 * x[i] * t - 2.0 * (1.0 - x[i]);
            g[i + 1] += 200.0 * t;
        }
        g
    }
}

impl StochasticOracle for Rosenbrock {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval_f(&self, x: &[f64], _batch: BatchSeed) -> Result<f64> {
        check_dim(self.dim, x)?;
        Ok(self.value(x))
    }

    fn eval_g(&self, x: &[f64], batch: BatchSeed) -> Result<Vec<f64>> {
        check_dim(self.dim, x)?;
        let mut g = self.gradient(x);
        if self.sigma_g > 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(batch);
            for gi in g.iter_mut() {
                let v: f64 = rng.sample(StandardNormal);
                *gi += self.sigma_g * v;
            }
        }
        Ok(g)
    }

    fn true_f(&self, x: &[f64]) -> Option<f64> {
        Some(self.value(x))
    }
}
