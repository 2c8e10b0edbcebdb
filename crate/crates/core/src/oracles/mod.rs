//! Stochastic objective oracles.
//!
//! An oracle answers cost and gradient queries for a minibatch identified by
//! a `BatchSeed`. Queries are pure: the same `(x, seed)` always returns the
//! same value, and cost and gradient queries with the same seed refer to the
//! same minibatch.

mod libsvm;
mod logistic;
mod quadratic;
mod rosenbrock;

pub use libsvm::{parse_libsvm, read_libsvm, write_libsvm, SparseDataset};
pub use logistic::LogisticOracle;
pub use quadratic::{NoiseModel, NoisyQuadratic};
pub use rosenbrock::Rosenbrock;

use crate::error::Result;

pub type BatchSeed = u64;

pub trait StochasticOracle: Send + Sync {
    fn dim(&self) -> usize;

    /// Cost estimate `f̂(x)` on the minibatch selected by `batch`.
    fn eval_f(&self, x: &[f64], batch: BatchSeed) -> Result<f64>;

    /// Gradient estimate `ĝ(x)` on the minibatch selected by `batch`.
    fn eval_g(&self, x: &[f64], batch: BatchSeed) -> Result<Vec<f64>>;

    fn eval_fg(&self, x: &[f64], batch: BatchSeed) -> Result<(f64, Vec<f64>)> {
        Ok((self.eval_f(x, batch)?, self.eval_g(x, batch)?))
    }

    /// Exact objective, when cheap enough to report.
    fn true_f(&self, _x: &[f64]) -> Option<f64> {
        None
    }

    /// Exact gradient of a finite-sum objective.
    fn full_gradient(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }

    /// Per-sample evaluations consumed by one minibatch query.
    fn batch_cost(&self) -> u64 {
        1
    }

    /// Per-sample evaluations consumed by [`StochasticOracle::full_gradient`].
    fn full_cost(&self) -> Option<u64> {
        None
    }
}

pub(crate) fn check_dim(expected: usize, x: &[f64]) -> Result<()> {
    if x.len() != expected {
        return Err(crate::error::Error::DimensionMismatch {
            expected,
            found: x.len(),
        });
    }
    Ok(())
}
