use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::oracles::StochasticOracle;
use crate::run::{run_optimizer, Budget, EvalCounter, Optimizer, StepInfo, Timing};
use crate::trace::RunTrace;

/// Stochastic variance-reduced gradient. Every `epoch_length` inner steps
/// the snapshot moves to the current iterate and its full gradient is
/// recomputed; inner steps use `ĝ(x, z) − ĝ(x̃, z) + ∇f(x̃)`.
#[derive(Debug, Clone)]
pub struct Svrg {
    x: Vec<f64>,
    snapshot: Vec<f64>,
    mu: Vec<f64>,
    eta: f64,
    epoch_length: usize,
    inner: usize,
    rng: ChaCha8Rng,
}

impl Svrg {
    pub fn new(x0: Vec<f64>, eta: f64, epoch_length: usize, seed: u64) -> Result<Self> {
        if epoch_length == 0 {
            return Err(Error::InvalidConfig("epoch length must be positive".into()));
        }
        Ok(Svrg {
            snapshot: x0.clone(),
            mu: Vec::new(),
            x: x0,
            eta,
            epoch_length,
            inner: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    fn full_cost<O: StochasticOracle + ?Sized>(oracle: &O) -> Result<u64> {
        oracle
            .full_cost()
            .ok_or_else(|| Error::InvalidConfig("svrg needs a finite-sum oracle".into()))
    }
}

impl Optimizer for Svrg {
    fn x(&self) -> &[f64] {
        &self.x
    }

    fn initial_gamma(&self) -> f64 {
        0.0
    }

    fn next_step_grad_cost<O: StochasticOracle + ?Sized>(&self, oracle: &O) -> u64 {
        let inner = 2 * oracle.batch_cost();
        if self.inner.is_multiple_of(self.epoch_length) {
            inner + oracle.full_cost().unwrap_or(0)
        } else {
            inner
        }
    }

    fn step<O: StochasticOracle + ?Sized>(&mut self, oracle: &O, evals: &mut EvalCounter) -> Result<StepInfo> {
        if self.inner.is_multiple_of(self.epoch_length) {
            let cost = Self::full_cost(oracle)?;
            self.snapshot.clone_from(&self.x);
            self.mu = oracle
                .full_gradient(&self.snapshot)
                .ok_or_else(|| Error::InvalidConfig("svrg needs a finite-sum oracle".into()))?;
            evals.grad += cost;
        }
        let batch = self.rng.next_u64();
        let g_x = oracle.eval_g(&self.x, batch)?;
        let g_snap = oracle.eval_g(&self.snapshot, batch)?;
        evals.grad += 2 * oracle.batch_cost();
        for i in 0..self.x.len() {
            self.x[i] -= self.eta * (g_x[i] - g_snap[i] + self.mu[i]);
        }
        self.inner += 1;
        Ok(StepInfo {
            alpha: self.eta,
            backtracks: 0,
            beta: 0.0,
            gamma: 0.0,
            f_estimate: f64::NAN,
        })
    }
}

pub fn svrg_run<O: StochasticOracle + ?Sized>(
    oracle: &O,
    x0: Vec<f64>,
    epoch_length: usize,
    eta: f64,
    budget: &Budget,
    seed: u64,
    timing: Timing,
) -> Result<RunTrace> {
    Svrg::full_cost(oracle)?;
    let started = Instant::now();
    let mut opt = Svrg::new(x0, eta, epoch_length, seed)?;
    run_optimizer(&mut opt, oracle, budget, timing, EvalCounter::default(), started)
}
