//! Stochastic backtracking line search on the first Wolfe (Armijo) condition.
//!
//! The initial step is `min(1, ξ/k)`. While the sufficient-decrease test
//! fails on the minibatch estimate, the step is scaled by `ρ`, at most
//! `max(0, τ − k)` times. Once `k ≥ τ` the initial step is taken regardless.
//! All cost evaluations inside one search use the caller's minibatch.

use crate::dense::axpy;
use crate::error::{Error, Result};
use crate::oracles::{BatchSeed, StochasticOracle};

#[derive(Debug, Clone, PartialEq)]
pub struct LineSearchConfig {
    /// Sufficient-decrease constant in `(0, 1)`.
    pub c: f64,
    /// Backtracking factor in `(0, 1)`.
    pub rho: f64,
    /// Iteration after which the initial step decays as `ξ/k`; at least 1.
    pub xi: f64,
    /// Backtracking limit; at most `max(0, τ − k)` reductions at iteration `k`.
    pub tau: usize,
}

impl Default for LineSearchConfig {
    fn default() -> Self {
        LineSearchConfig {
            c: 1e-4,
            rho: 0.5,
            xi: 1e3,
            tau: 1000,
        }
    }
}

impl LineSearchConfig {
    pub fn new(c: f64, rho: f64, xi: f64, tau: usize) -> Result<Self> {
        let cfg = LineSearchConfig { c, rho, xi, tau };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.c > 0.0 && self.c < 1.0) {
            return bad("c must lie in (0, 1)");
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return bad("rho must lie in (0, 1)");
        }
        if !(self.xi >= 1.0 && self.xi.is_finite()) {
            return bad("xi must be at least 1");
        }
        if self.tau == 0 {
            return bad("tau must be positive");
        }
        Ok(())
    }

    /// Number of reductions allowed at iteration `k`.
    pub fn budget(&self, k: usize) -> usize {
        self.tau.saturating_sub(k)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineSearchOutcome {
    pub alpha: f64,
    pub backtracks: usize,
    /// Trial cost evaluations (the base cost is supplied by the caller).
    pub f_evals: usize,
    pub wolfe_satisfied: bool,
    /// Cost estimate at the accepted point.
    pub f_trial: f64,
}

/// `min(1, ξ/k)` for `k ≥ 1`.
#[inline]
pub fn initial_step(k: usize, xi: f64) -> f64 {
    assert!(k >= 1, "iterations are counted from 1");
    (xi / k as f64).min(1.0)
}

/// `f_trial ≤ f_base + c α gᵀp`. A NaN anywhere counts as a violation.
#[inline]
pub fn wolfe_holds(f_trial: f64, f_base: f64, alpha: f64, c: f64, gp_inner: f64) -> bool {
    f_trial <= f_base + c * alpha * gp_inner
}

/// Run the backtracking loop from `x` along `p_hat` and return the outcome
/// together with `x + α p̂` for the final step.
#[allow(clippy::too_many_arguments)]
pub fn backtrack<O: StochasticOracle + ?Sized>(
    oracle: &O,
    x: &[f64],
    p_hat: &[f64],
    g_hat: &[f64],
    f_base: f64,
    k: usize,
    cfg: &LineSearchConfig,
    batch: BatchSeed,
) -> Result<(LineSearchOutcome, Vec<f64>)> {
    if p_hat.len() != x.len() || g_hat.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: if p_hat.len() != x.len() { p_hat.len() } else { g_hat.len() },
        });
    }
    let gp: f64 = g_hat.iter().zip(p_hat).map(|(g, p)| g * p).sum();
    let alpha0 = initial_step(k, cfg.xi);
    let budget = cfg.budget(k);
    let mut backtracks = 0usize;
    let mut trial = vec![0.0; x.len()];
    loop {
        let alpha = alpha0 * cfg.rho.powi(backtracks as i32);
        trial.copy_from_slice(x);
        axpy(alpha, p_hat, &mut trial);
        let f_trial = oracle.eval_f(&trial, batch)?;
        let ok = wolfe_holds(f_trial, f_base, alpha, cfg.c, gp);
        if ok || backtracks >= budget {
            return Ok((
                LineSearchOutcome {
                    alpha,
                    backtracks,
                    f_evals: backtracks + 1,
                    wolfe_satisfied: ok,
                    f_trial,
                },
                trial,
            ));
        }
        backtracks += 1;
    }
}
