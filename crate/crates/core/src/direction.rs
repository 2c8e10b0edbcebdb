//! Search direction from the limited-memory least-squares inverse Hessian
//!
//! ```text
//! H = (γI + λ⁻¹ S Yᵀ)(I − Y (λI + YᵀY)⁻¹ Yᵀ)
//! ```
//!
//! together with its trace, the adaptive prior scale `γ` and the safeguard
//! that makes the direction a descent direction in expectation.

use crate::chol::CholFactor;
use crate::dense::{axpy, dot, norm_sq};
use crate::error::{Error, Result};
use crate::memory::PairRingBuffer;

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionConfig {
    /// Weight of the prior term in the least-squares fit.
    pub lambda: f64,
    /// Initial prior scale `γ₀`.
    pub gamma0: f64,
    /// Multiplicative step for `γ`, at least 1.
    pub kappa: f64,
    /// Backtracking count at which `γ` is reduced.
    pub q: usize,
    /// Gradient-noise variance estimate. `None` asks the driver to estimate
    /// it from repeated gradient draws at the starting point.
    pub sigma_g_sq: Option<f64>,
    /// Relative slack added to the safeguard bound: `δ = margin·(1 + |bound|)`.
    pub beta_margin: f64,
}

impl Default for DirectionConfig {
    fn default() -> Self {
        DirectionConfig {
            lambda: 1.0,
            gamma0: 1e-3,
            kappa: 1.3,
            q: 3,
            sigma_g_sq: None,
            beta_margin: 1e-6,
        }
    }
}

impl DirectionConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return bad("lambda must be positive");
        }
        if !(self.gamma0 > 0.0 && self.gamma0.is_finite()) {
            return bad("gamma0 must be positive");
        }
        if !(self.kappa >= 1.0 && self.kappa.is_finite()) {
            return bad("kappa must be at least 1");
        }
        if self.q == 0 {
            return bad("q must be at least 1");
        }
        if let Some(s) = self.sigma_g_sq {
            if !(s >= 0.0 && s.is_finite()) {
                return bad("sigma_g_sq must be non-negative");
            }
        }
        if !(self.beta_margin > 0.0 && self.beta_margin.is_finite()) {
            return bad("beta_margin must be positive");
        }
        Ok(())
    }
}

/// `p̂ = −H ĝ` in `O(dm)` plus one forward-backward solve.
///
/// With `w = (λI + YᵀY)⁻¹ Yᵀĝ` and `z = ĝ − Yw`, the identity `λ⁻¹ Yᵀz = w`
/// turns `p̂ = −γz − λ⁻¹ S (Yᵀz)` into `p̂ = −γz − S w`, which stays accurate
/// as `λ → 0`.
pub fn compute_direction(buf: &PairRingBuffer, factor: &CholFactor, gamma: f64, g_hat: &[f64]) -> Result<Vec<f64>> {
    check_consistent(buf, factor, g_hat.len())?;
    let mut p: Vec<f64> = g_hat.iter().map(|v| -gamma * v).collect();
    if buf.is_empty() {
        return Ok(p);
    }
    let y = buf.y();
    let s = buf.s();
    let w = factor.solve_fb(&y.tr_mul_vec(g_hat))?;
    for (j, wj) in w.iter().enumerate() {
        axpy(gamma * wj, y.col(j), &mut p);
        axpy(-wj, s.col(j), &mut p);
    }
    Ok(p)
}

/// `Tr(H)` from the compact representation `H = γ(I − YGYᵀ) + SGYᵀ`:
///
/// ```text
/// Tr(H) = γd − Tr(G (γ YᵀY − YᵀS)),   G = (λI + YᵀY)⁻¹
/// ```
pub fn trace_h(buf: &PairRingBuffer, factor: &CholFactor, gamma: f64) -> Result<f64> {
    check_consistent(buf, factor, buf.dim())?;
    let d = buf.dim() as f64;
    let n = buf.len();
    if n == 0 {
        return Ok(gamma * d);
    }
    let yts = buf.yts();
    let mut tr = 0.0;
    let mut col = vec![0.0; n];
    for j in 0..n {
        for (i, c) in col.iter_mut().enumerate() {
            *c = gamma * buf.yty(i, j) - yts[i * n + j];
        }
        tr += factor.solve_fb(&col)?[j];
    }
    Ok(gamma * d - tr)
}

/// Slack added to the safeguard bound on `β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Margin {
    /// `β = bound + δ`.
    Absolute(f64),
    /// `β = bound + δ·(1 + |bound|)`.
    Relative(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Safeguarded {
    pub direction: Vec<f64>,
    pub beta: f64,
    /// `(p̂ᵀĝ − σ̂² Tr H) / (ĝᵀĝ + d σ̂²)`
    pub bound: f64,
}

/// Shift `p̂` towards `−ĝ` so that the estimated expected inner product with
/// the gradient is negative:
///
/// ```text
/// β = max(0, (p̂ᵀĝ − σ̂² Tr H) / (ĝᵀĝ + d σ̂²) + δ),   p̃ = p̂ − β ĝ
/// ```
pub fn descent_safeguard(
    p_hat: &[f64],
    g_hat: &[f64],
    trace_h: f64,
    sigma_sq: f64,
    margin: Margin,
) -> Result<Safeguarded> {
    if p_hat.len() != g_hat.len() {
        return Err(Error::DimensionMismatch {
            expected: g_hat.len(),
            found: p_hat.len(),
        });
    }
    let gg = norm_sq(g_hat);
    if gg == 0.0 {
        if p_hat.iter().any(|&v| v != 0.0) {
            return Err(Error::ZeroGradient);
        }
        return Ok(Safeguarded {
            direction: p_hat.to_vec(),
            beta: 0.0,
            bound: 0.0,
        });
    }
    let d = g_hat.len() as f64;
    let bound = (dot(p_hat, g_hat) - sigma_sq * trace_h) / (gg + d * sigma_sq);
    let delta = match margin {
        Margin::Absolute(v) => v,
        Margin::Relative(v) => v * (1.0 + bound.abs()),
    };
    let beta = (bound + delta).max(0.0);
    let mut direction = p_hat.to_vec();
    if beta > 0.0 {
        axpy(-beta, g_hat, &mut direction);
    }
    Ok(Safeguarded { direction, beta, bound })
}

/// Adapt the prior scale from the previous line search:
/// `κγ` if the initial step was accepted, `γ/κ` after at least `q`
/// reductions, `γ` otherwise (checked in that order).
pub fn adapt_gamma(gamma_prev: f64, step_was_full: bool, backtracks: usize, cfg: &DirectionConfig) -> f64 {
    if step_was_full {
        cfg.kappa * gamma_prev
    } else if backtracks >= cfg.q {
        gamma_prev / cfg.kappa
    } else {
        gamma_prev
    }
}

/// Upper bound `c̄ = pᵀg / (pᵀg − σ² Tr H)` on the sufficient-decrease constant
/// for which the stochastic first Wolfe condition holds in expectation.
pub fn wolfe_c_bound(pg_inner: f64, trace_h: f64, sigma_sq: f64) -> Result<f64> {
    let den = pg_inner - sigma_sq * trace_h;
    if !(den < 0.0) {
        return Err(Error::InvalidDenominator(den));
    }
    Ok(pg_inner / den)
}

/// Direction plus diagnostics for one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionReport {
    pub p_hat: Vec<f64>,
    pub beta: f64,
    /// `p̂ᵀĝ` after the safeguard.
    pub pg_inner: f64,
    /// Only evaluated when the noise estimate is positive.
    pub trace_h: Option<f64>,
}

/// Full direction pipeline: quasi-Newton direction, then the safeguard.
pub fn safeguarded_direction(
    buf: &PairRingBuffer,
    factor: &CholFactor,
    gamma: f64,
    g_hat: &[f64],
    sigma_sq: f64,
    beta_margin: f64,
) -> Result<DirectionReport> {
    let p = compute_direction(buf, factor, gamma, g_hat)?;
    let trace = if sigma_sq > 0.0 {
        Some(trace_h(buf, factor, gamma)?)
    } else {
        None
    };
    let sg = descent_safeguard(&p, g_hat, trace.unwrap_or(0.0), sigma_sq, Margin::Relative(beta_margin))?;
    let pg_inner = dot(&sg.direction, g_hat);
    Ok(DirectionReport {
        p_hat: sg.direction,
        beta: sg.beta,
        pg_inner,
        trace_h: trace,
    })
}

fn check_consistent(buf: &PairRingBuffer, factor: &CholFactor, d: usize) -> Result<()> {
    if d != buf.dim() {
        return Err(Error::DimensionMismatch {
            expected: buf.dim(),
            found: d,
        });
    }
    if factor.dim() != buf.len() {
        return Err(Error::DimensionMismatch {
            expected: buf.len(),
            found: factor.dim(),
        });
    }
    Ok(())
}
