//! Comparison optimizers sharing the oracle, budget and trace machinery.

mod adam;
mod lbfgs;
mod sgd;
mod svrg;

pub use adam::{adam_step, Adam, AdamConfig, AdamState};
pub use lbfgs::{lbfgs_direction, CurvaturePair, Lbfgs, LbfgsConfig};
pub use sgd::{sgd_step, Sgd};
pub use svrg::{svrg_run, Svrg};

use std::time::Instant;

use crate::error::{Error, Result};
use crate::oracles::StochasticOracle;
use crate::run::{run_optimizer, Budget, EvalCounter, Timing};
use crate::trace::RunTrace;

#[derive(Debug, Clone, PartialEq)]
pub enum BaselineConfig {
    Sgd { eta: f64 },
    Adam(AdamConfig),
    Svrg { eta: f64, epoch_length: usize },
    Lbfgs(LbfgsConfig),
}

impl BaselineConfig {
    pub fn name(&self) -> &'static str {
        match self {
            BaselineConfig::Sgd { .. } => "sg",
            BaselineConfig::Adam(_) => "adam",
            BaselineConfig::Svrg { .. } => "svrg",
            BaselineConfig::Lbfgs(_) => "lbfgs",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |eta: f64| {
            if eta > 0.0 && eta.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidConfig("step size must be positive".into()))
            }
        };
        match self {
            BaselineConfig::Sgd { eta } => positive(*eta),
            BaselineConfig::Adam(c) => c.validate(),
            BaselineConfig::Svrg { eta, epoch_length } => {
                positive(*eta)?;
                if *epoch_length == 0 {
                    return Err(Error::InvalidConfig("epoch length must be positive".into()));
                }
                Ok(())
            }
            BaselineConfig::Lbfgs(c) => c.validate(),
        }
    }
}

/// Run a baseline from `x0` until the budget is spent.
pub fn run_baseline<O: StochasticOracle + ?Sized>(
    oracle: &O,
    x0: Vec<f64>,
    cfg: &BaselineConfig,
    budget: &Budget,
    seed: u64,
    timing: Timing,
) -> Result<RunTrace> {
    cfg.validate()?;
    budget.validate()?;
    if x0.len() != oracle.dim() {
        return Err(Error::DimensionMismatch {
            expected: oracle.dim(),
            found: x0.len(),
        });
    }
    let started = Instant::now();
    let evals = EvalCounter::default();
    match cfg {
        BaselineConfig::Sgd { eta } => {
            let mut opt = Sgd::new(x0, *eta, seed);
            run_optimizer(&mut opt, oracle, budget, timing, evals, started)
        }
        BaselineConfig::Adam(c) => {
            let mut opt = Adam::new(x0, c.clone(), seed);
            run_optimizer(&mut opt, oracle, budget, timing, evals, started)
        }
        BaselineConfig::Svrg { eta, epoch_length } => svrg_run(oracle, x0, *epoch_length, *eta, budget, seed, timing),
        BaselineConfig::Lbfgs(c) => {
            let mut opt = Lbfgs::new(x0, c.clone(), seed);
            run_optimizer(&mut opt, oracle, budget, timing, evals, started)
        }
    }
}
