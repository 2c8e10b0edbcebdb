use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::oracles::StochasticOracle;
use crate::run::{EvalCounter, Optimizer, StepInfo};

#[derive(Debug, Clone, PartialEq)]
pub struct AdamConfig {
    pub eta: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            eta: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

impl AdamConfig {
    pub fn validate(&self) -> Result<()> {
        let in_unit = |b: f64| b > 0.0 && b < 1.0;
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::InvalidConfig("step size must be positive".into()));
        }
        if !(in_unit(self.beta1) && in_unit(self.beta2)) {
            return Err(Error::InvalidConfig("moment decays must lie in (0, 1)".into()));
        }
        if !(self.eps > 0.0) {
            return Err(Error::InvalidConfig("epsilon must be positive".into()));
        }
        Ok(())
    }
}

/// Iterate plus first/second moment accumulators.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub x: Vec<f64>,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u32,
}

impl AdamState {
    pub fn new(x0: Vec<f64>) -> Self {
        let d = x0.len();
        AdamState {
            x: x0,
            m: vec![0.0; d],
            v: vec![0.0; d],
            t: 0,
        }
    }
}

/// Bias-corrected moment update.
pub fn adam_step(state: &mut AdamState, g_hat: &[f64], cfg: &AdamConfig) {
    state.t += 1;
    let c1 = 1.0 - cfg.beta1.powi(state.t as i32);
    let c2 = 1.0 - cfg.beta2.powi(state.t as i32);
    for i in 0..state.x.len() {
        let g = g_hat[i];
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
        let m_hat = state.m[i] / c1;
        let v_hat = state.v[i] / c2;
        state.x[i] -= cfg.eta * m_hat / (v_hat.sqrt() + cfg.eps);
    }
}

#[derive(Debug, Clone)]
pub struct Adam {
    state: AdamState,
    cfg: AdamConfig,
    rng: ChaCha8Rng,
}

impl Adam {
    pub fn new(x0: Vec<f64>, cfg: AdamConfig, seed: u64) -> Self {
        Adam {
            state: AdamState::new(x0),
            cfg,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Optimizer for Adam {
    fn x(&self) -> &[f64] {
        &self.state.x
    }

    fn step<O: StochasticOracle + ?Sized>(&mut self, oracle: &O, evals: &mut EvalCounter) -> Result<StepInfo> {
        let g = oracle.eval_g(&self.state.x, self.rng.next_u64())?;
        evals.grad += oracle.batch_cost();
        adam_step(&mut self.state, &g, &self.cfg);
        Ok(StepInfo {
            alpha: self.cfg.eta,
            backtracks: 0,
            beta: 0.0,
            gamma: 0.0,
            f_estimate: f64::NAN,
        })
    }
}
