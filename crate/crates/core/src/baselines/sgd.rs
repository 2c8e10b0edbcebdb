use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dense::axpy;
use crate::error::Result;
use crate::oracles::StochasticOracle;
use crate::run::{EvalCounter, Optimizer, StepInfo};

/// `x − η ĝ`
pub fn sgd_step(x: &[f64], g_hat: &[f64], eta: f64) -> Vec<f64> {
    let mut out = x.to_vec();
    axpy(-eta, g_hat, &mut out);
    out
}

/// Fixed-step stochastic gradient descent.
#[derive(Debug, Clone)]
pub struct Sgd {
    x: Vec<f64>,
    eta: f64,
    rng: ChaCha8Rng,
}

impl Sgd {
    pub fn new(x0: Vec<f64>, eta: f64, seed: u64) -> Self {
        Sgd {
            x: x0,
            eta,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Optimizer for Sgd {
    fn x(&self) -> &[f64] {
        &self.x
    }

    fn step<O: StochasticOracle + ?Sized>(&mut self, oracle: &O, evals: &mut EvalCounter) -> Result<StepInfo> {
        let g = oracle.eval_g(&self.x, self.rng.next_u64())?;
        evals.grad += oracle.batch_cost();
        self.x = sgd_step(&self.x, &g, self.eta);
        Ok(StepInfo {
            alpha: self.eta,
            backtracks: 0,
            beta: 0.0,
            gamma: 0.0,
            f_estimate: f64::NAN,
        })
    }
}
