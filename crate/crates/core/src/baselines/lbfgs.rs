use std::collections::VecDeque;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dense::{axpy, dot, norm_sq};
use crate::error::{Error, Result};
use crate::line_search::{backtrack, LineSearchConfig};
use crate::oracles::StochasticOracle;
use crate::run::{EvalCounter, Optimizer, StepInfo};

/// Pairs with `sᵀy ≤ SKIP_TOL ‖s‖‖y‖` are not stored.
const SKIP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct LbfgsConfig {
    pub memory: usize,
    pub line_search: LineSearchConfig,
}

impl Default for LbfgsConfig {
    fn default() -> Self {
        LbfgsConfig {
            memory: 20,
            line_search: LineSearchConfig::default(),
        }
    }
}

impl LbfgsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.memory == 0 {
            return Err(Error::InvalidConfig("memory must be at least 1".into()));
        }
        self.line_search.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvaturePair {
    pub s: Vec<f64>,
    pub y: Vec<f64>,
    /// `1 / sᵀy`
    pub rho: f64,
}

impl CurvaturePair {
    /// `None` when the curvature condition fails.
    pub fn new(s: Vec<f64>, y: Vec<f64>) -> Option<Self> {
        let sy = dot(&s, &y);
        if sy <= SKIP_TOL * (norm_sq(&s) * norm_sq(&y)).sqrt() {
            return None;
        }
        Some(CurvaturePair { s, y, rho: 1.0 / sy })
    }
}

/// Two-loop recursion: returns `−H g` for the inverse-Hessian approximation
/// defined by `pairs` (oldest first) with initial scaling `sᵀy / yᵀy` from
/// the newest pair, or the identity when there are none.
pub fn lbfgs_direction<'a, I>(pairs: I, g: &[f64]) -> Vec<f64>
where
    I: IntoIterator<Item = &'a CurvaturePair>,
    I::IntoIter: DoubleEndedIterator + Clone,
{
    let pairs = pairs.into_iter();
    let mut q = g.to_vec();
    let mut alphas = Vec::new();
    for p in pairs.clone().rev() {
        let a = p.rho * dot(&p.s, &q);
        axpy(-a, &p.y, &mut q);
        alphas.push(a);
    }
    let h0 = pairs
        .clone()
        .next_back()
        .map_or(1.0, |p| 1.0 / (p.rho * norm_sq(&p.y)));
    q.iter_mut().for_each(|v| *v *= h0);
    for (p, a) in pairs.zip(alphas.into_iter().rev()) {
        let b = p.rho * dot(&p.y, &q);
        axpy(a - b, &p.s, &mut q);
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

/// Stochastic L-BFGS with the same minibatch pairing and line search as LMLS.
#[derive(Debug, Clone)]
pub struct Lbfgs {
    cfg: LbfgsConfig,
    x: Vec<f64>,
    pairs: VecDeque<CurvaturePair>,
    g_prev: Option<Vec<f64>>,
    s_pending: Option<Vec<f64>>,
    k: usize,
    rng: ChaCha8Rng,
    skipped: usize,
}

impl Lbfgs {
    pub fn new(x0: Vec<f64>, cfg: LbfgsConfig, seed: u64) -> Self {
        Lbfgs {
            cfg,
            x: x0,
            pairs: VecDeque::new(),
            g_prev: None,
            s_pending: None,
            k: 1,
            rng: ChaCha8Rng::seed_from_u64(seed),
            skipped: 0,
        }
    }

    pub fn pairs(&self) -> &VecDeque<CurvaturePair> {
        &self.pairs
    }

    /// Pairs rejected by the curvature test.
    pub fn skipped(&self) -> usize {
        self.skipped
    }

    fn scaling(&self) -> f64 {
        self.pairs.back().map_or(1.0, |p| 1.0 / (p.rho * norm_sq(&p.y)))
    }
}

impl Optimizer for Lbfgs {
    fn x(&self) -> &[f64] {
        &self.x
    }

    fn initial_gamma(&self) -> f64 {
        self.scaling()
    }

    fn step<O: StochasticOracle + ?Sized>(&mut self, oracle: &O, evals: &mut EvalCounter) -> Result<StepInfo> {
        let batch = self.rng.next_u64();
        let (f_base, g_hat) = oracle.eval_fg(&self.x, batch)?;
        evals.grad += oracle.batch_cost();
        evals.f += oracle.batch_cost();

        if let (Some(s), Some(g_prev)) = (self.s_pending.take(), self.g_prev.as_ref()) {
            let mut y = g_hat.clone();
            axpy(-1.0, g_prev, &mut y);
            match CurvaturePair::new(s, y) {
                Some(p) => {
                    if self.pairs.len() == self.cfg.memory {
                        self.pairs.pop_front();
                    }
                    self.pairs.push_back(p);
                }
                None => self.skipped += 1,
            }
        }

        let scale = self.scaling();
        let p = lbfgs_direction(&self.pairs, &g_hat);
        let (ls, x_next) = backtrack(oracle, &self.x, &p, &g_hat, f_base, self.k, &self.cfg.line_search, batch)?;
        evals.f += ls.f_evals as u64 * oracle.batch_cost();

        let mut s = x_next.clone();
        axpy(-1.0, &self.x, &mut s);
        self.s_pending = Some(s);
        self.g_prev = Some(g_hat);
        self.x = x_next;
        self.k += 1;
        Ok(StepInfo {
            alpha: ls.alpha,
            backtracks: ls.backtracks,
            beta: 0.0,
            gamma: scale,
            f_estimate: ls.f_trial,
        })
    }
}
