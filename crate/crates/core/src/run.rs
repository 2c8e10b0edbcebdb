//! Budgeted iteration loop shared by every optimizer.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::oracles::StochasticOracle;
use crate::trace::{RunTrace, TraceRecord};

/// Stop as soon as any limit is reached.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Budget {
    pub max_iters: Option<usize>,
    /// Per-sample gradient evaluations, setup costs included.
    pub max_grad_evals: Option<u64>,
    pub wall_clock: Option<Duration>,
}

impl Budget {
    pub fn iters(n: usize) -> Self {
        Budget {
            max_iters: Some(n),
            ..Default::default()
        }
    }

    pub fn grad_evals(n: u64) -> Self {
        Budget {
            max_grad_evals: Some(n),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters.is_none() && self.max_grad_evals.is_none() && self.wall_clock.is_none() {
            return Err(Error::InvalidConfig("budget needs at least one limit".into()));
        }
        Ok(())
    }
}

/// Whether `wall_ms` is measured. With timing off every trace column is a
/// deterministic function of the seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Timing {
    #[default]
    Wall,
    Off,
}

/// Cumulative per-sample evaluation counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EvalCounter {
    pub grad: u64,
    pub f: u64,
}

/// Diagnostics of one optimizer iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub alpha: f64,
    pub backtracks: usize,
    pub beta: f64,
    pub gamma: f64,
    /// Cost estimate at the new iterate (or NaN when none was computed).
    pub f_estimate: f64,
}

pub trait Optimizer {
    fn x(&self) -> &[f64];

    /// Prior scale or step size worth reporting in the initial trace row.
    fn initial_gamma(&self) -> f64 {
        0.0
    }

    /// Gradient evaluations the next `step` will consume.
    fn next_step_grad_cost<O: StochasticOracle + ?Sized>(&self, oracle: &O) -> u64 {
        oracle.batch_cost()
    }

    fn step<O: StochasticOracle + ?Sized>(&mut self, oracle: &O, evals: &mut EvalCounter) -> Result<StepInfo>;
}

/// Iterate `opt` until the budget is spent. `evals` carries any setup cost
/// already paid (it shows up in the initial row).
pub fn run_optimizer<Opt: Optimizer, O: StochasticOracle + ?Sized>(
    opt: &mut Opt,
    oracle: &O,
    budget: &Budget,
    timing: Timing,
    mut evals: EvalCounter,
    started: Instant,
) -> Result<RunTrace> {
    budget.validate()?;
    let elapsed_ms = || match timing {
        Timing::Wall => started.elapsed().as_secs_f64() * 1e3,
        Timing::Off => 0.0,
    };
    let mut records = vec![TraceRecord {
        iter: 0,
        wall_ms: elapsed_ms(),
        grad_evals: evals.grad,
        f_evals: evals.f,
        cost: oracle.true_f(opt.x()).unwrap_or(f64::NAN),
        alpha: 0.0,
        backtracks: 0,
        beta: 0.0,
        gamma: opt.initial_gamma(),
    }];
    let mut iter = 0usize;
    loop {
        if budget.max_iters.is_some_and(|m| iter >= m) {
            break;
        }
        if budget
            .max_grad_evals
            .is_some_and(|m| evals.grad + opt.next_step_grad_cost(oracle) > m)
        {
            break;
        }
        if budget.wall_clock.is_some_and(|w| started.elapsed() >= w) {
            break;
        }
        let info = opt.step(oracle, &mut evals)?;
        iter += 1;
        let cost = oracle.true_f(opt.x()).unwrap_or(info.f_estimate);
        records.push(TraceRecord {
            iter,
            wall_ms: elapsed_ms(),
            grad_evals: evals.grad,
            f_evals: evals.f,
            cost,
            alpha: info.alpha,
            backtracks: info.backtracks,
            beta: info.beta,
            gamma: info.gamma,
        });
    }
    Ok(RunTrace { records })
}
