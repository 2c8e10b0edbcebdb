//! The complete limited-memory least-squares (LMLS) optimizer.
//!
//! One iteration:
//! 1. draw a minibatch, evaluate `f̂(x_k)` and `ĝ_k` on it;
//! 2. store the previous displacement with `ŷ_k = ĝ_k − ĝ_{k−1}`
//!    (each gradient on its own iteration's minibatch);
//! 3. `p̂ = −H ĝ_k`, then the expected-descent safeguard;
//! 4. stochastic backtracking line search on the same minibatch;
//! 5. adapt `γ` from the line-search outcome.

use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chol::CholFactor;
use crate::dense::axpy;
use crate::direction::{adapt_gamma, safeguarded_direction, DirectionConfig};
use crate::error::{Error, Result};
use crate::line_search::{backtrack, LineSearchConfig};
use crate::memory::PairRingBuffer;
use crate::oracles::StochasticOracle;
use crate::run::{run_optimizer, Budget, EvalCounter, Optimizer, StepInfo, Timing};
use crate::trace::RunTrace;

#[derive(Debug, Clone, PartialEq)]
pub struct LmlsConfig {
    pub direction: DirectionConfig,
    pub line_search: LineSearchConfig,
    /// Number of stored correction pairs.
    pub memory: usize,
    /// Gradient draws used to estimate `σ_g²` when it is not given.
    pub sigma_samples: usize,
}

impl Default for LmlsConfig {
    fn default() -> Self {
        LmlsConfig {
            direction: DirectionConfig::default(),
            line_search: LineSearchConfig::default(),
            memory: 20,
            sigma_samples: 100,
        }
    }
}

impl LmlsConfig {
    pub fn validate(&self) -> Result<()> {
        self.direction.validate()?;
        self.line_search.validate()?;
        if self.memory == 0 {
            return Err(Error::InvalidConfig("memory must be at least 1".into()));
        }
        if self.direction.sigma_g_sq.is_none() && self.sigma_samples < 2 {
            return Err(Error::InvalidConfig("sigma estimation needs at least two samples".into()));
        }
        Ok(())
    }
}

/// Optimizer state; owns its memory, factor and randomness.
#[derive(Debug, Clone)]
pub struct LmlsState {
    cfg: LmlsConfig,
    x: Vec<f64>,
    g_prev: Option<Vec<f64>>,
    s_pending: Option<Vec<f64>>,
    gamma: f64,
    buffer: PairRingBuffer,
    factor: CholFactor,
    k: usize,
    rng: ChaCha8Rng,
    sigma_g_sq: f64,
    rebuilds: usize,
}

impl LmlsState {
    /// Fresh state at `x0`. When the configuration carries no noise estimate,
    /// `σ_g²` is estimated here and the draws are charged to `evals`.
    pub fn new<O: StochasticOracle + ?Sized>(
        oracle: &O,
        x0: Vec<f64>,
        cfg: LmlsConfig,
        seed: u64,
        evals: &mut EvalCounter,
    ) -> Result<Self> {
        cfg.validate()?;
        if x0.len() != oracle.dim() {
            return Err(Error::DimensionMismatch {
                expected: oracle.dim(),
                found: x0.len(),
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma_g_sq = match cfg.direction.sigma_g_sq {
            Some(v) => v,
            None => {
                let v = estimate_sigma_g(oracle, &x0, cfg.sigma_samples, &mut rng)?;
                evals.grad += cfg.sigma_samples as u64 * oracle.batch_cost();
                v
            }
        };
        let lambda = cfg.direction.lambda;
        Ok(LmlsState {
            buffer: PairRingBuffer::new(x0.len(), cfg.memory)?,
            factor: CholFactor::empty(lambda),
            gamma: cfg.direction.gamma0,
            x: x0,
            g_prev: None,
            s_pending: None,
            k: 1,
            rng,
            sigma_g_sq,
            rebuilds: 0,
            cfg,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Next iteration index (starts at 1).
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn sigma_g_sq(&self) -> f64 {
        self.sigma_g_sq
    }

    pub fn buffer(&self) -> &PairRingBuffer {
        &self.buffer
    }

    pub fn factor(&self) -> &CholFactor {
        &self.factor
    }

    /// How many times the factor was rebuilt after a numerical breakdown.
    pub fn rebuilds(&self) -> usize {
        self.rebuilds
    }

    pub fn config(&self) -> &LmlsConfig {
        &self.cfg
    }

    fn store_pair(&mut self, s: &[f64], y_hat: &[f64]) -> Result<()> {
        match self.buffer.push_pair(&mut self.factor, s, y_hat) {
            Ok(_) => Ok(()),
            Err(Error::NumericalBreakdown { .. }) | Err(Error::DowndateFailure { .. }) => {
                self.factor = self.buffer.rebuild_factor(self.cfg.direction.lambda)?;
                self.rebuilds += 1;
                Ok(())
            }
            Err(e) => Err(e),
        }
    }
}

impl Optimizer for LmlsState {
    fn x(&self) -> &[f64] {
        &self.x
    }

    fn initial_gamma(&self) -> f64 {
        self.gamma
    }

    fn step<O: StochasticOracle + ?Sized>(&mut self, oracle: &O, evals: &mut EvalCounter) -> Result<StepInfo> {
        let batch = self.rng.next_u64();
        let (f_base, g_hat) = oracle.eval_fg(&self.x, batch)?;
        evals.grad += oracle.batch_cost();
        evals.f += oracle.batch_cost();

        if let (Some(s), Some(g_prev)) = (self.s_pending.take(), self.g_prev.as_ref()) {
            let mut y_hat = g_hat.clone();
            axpy(-1.0, g_prev, &mut y_hat);
            self.store_pair(&s, &y_hat)?;
        }

        let gamma = self.gamma;
        let report = safeguarded_direction(
            &self.buffer,
            &self.factor,
            gamma,
            &g_hat,
            self.sigma_g_sq,
            self.cfg.direction.beta_margin,
        )?;
        let (ls, x_next) = backtrack(
            oracle,
            &self.x,
            &report.p_hat,
            &g_hat,
            f_base,
            self.k,
            &self.cfg.line_search,
            batch,
        )?;
        evals.f += ls.f_evals as u64 * oracle.batch_cost();

        let mut s = x_next.clone();
        axpy(-1.0, &self.x, &mut s);
        self.s_pending = Some(s);
        self.g_prev = Some(g_hat);
        self.x = x_next;
        let full = ls.wolfe_satisfied && ls.backtracks == 0;
        self.gamma = adapt_gamma(gamma, full, ls.backtracks, &self.cfg.direction);
        self.k += 1;

        Ok(StepInfo {
            alpha: ls.alpha,
            backtracks: ls.backtracks,
            beta: report.beta,
            gamma,
            f_estimate: ls.f_trial,
        })
    }
}

/// Run LMLS from `x0` until the budget is spent.
pub fn run<O: StochasticOracle + ?Sized>(
    oracle: &O,
    x0: Vec<f64>,
    cfg: &LmlsConfig,
    budget: &Budget,
    seed: u64,
    timing: Timing,
) -> Result<RunTrace> {
    budget.validate()?;
    let started = Instant::now();
    let mut evals = EvalCounter::default();
    let mut state = LmlsState::new(oracle, x0, cfg.clone(), seed, &mut evals)?;
    run_optimizer(&mut state, oracle, budget, timing, evals, started)
}

/// Average per-coordinate sample variance of `n_samples` independent
/// gradient draws at `x` (isotropic noise model).
pub fn estimate_sigma_g<O: StochasticOracle + ?Sized>(
    oracle: &O,
    x: &[f64],
    n_samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    if n_samples < 2 {
        return Err(Error::InvalidConfig("need at least two samples".into()));
    }
    let d = x.len();
    let mut mean = vec![0.0; d];
    let mut m2 = vec![0.0; d];
    for n in 1..=n_samples {
        let g = oracle.eval_g(x, rng.next_u64())?;
        for i in 0..d {
            let delta = g[i] - mean[i];
            mean[i] += delta / n as f64;
            m2[i] += delta * (g[i] - mean[i]);
        }
    }
    if d == 0 {
        return Ok(0.0);
    }
    Ok(m2.iter().sum::<f64>() / ((n_samples - 1) as f64 * d as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{NoiseModel, NoisyQuadratic};

    #[test]
    fn zero_iterations_give_initial_row() {
        let q = NoisyQuadratic::random(3, 1.0, 2.0, NoiseModel::default(), 1).unwrap();
        let t = run(&q, vec![0.0; 3], &LmlsConfig::default(), &Budget::iters(0), 5, Timing::Off).unwrap();
        assert_eq!(t.records.len(), 1);
        assert_eq!(t.records[0].iter, 0);
        assert_eq!(t.records[0].cost, 0.0);
    }

    #[test]
    fn deterministic_oracle_has_zero_noise() {
        let q = NoisyQuadratic::random(4, 1.0, 2.0, NoiseModel::default(), 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(estimate_sigma_g(&q, &[0.3; 4], 10, &mut rng).unwrap(), 0.0);
        let noisy = q.with_noise(NoiseModel::gradient_only(2.0)).unwrap();
        let v = estimate_sigma_g(&noisy, &[0.3; 4], 2, &mut rng).unwrap();
        assert!(v.is_finite() && v >= 0.0);
        assert!(estimate_sigma_g(&noisy, &[0.3; 4], 1, &mut rng).is_err());
    }

    #[test]
    fn empty_budget_rejected() {
        let q = NoisyQuadratic::random(2, 1.0, 2.0, NoiseModel::default(), 1).unwrap();
        assert!(run(&q, vec![0.0; 2], &LmlsConfig::default(), &Budget::default(), 0, Timing::Off).is_err());
    }
}
