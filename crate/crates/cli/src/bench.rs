//! Seeded Monte-Carlo trials and their CSV output.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use lmls_core::baselines::{run_baseline, BaselineConfig};
use lmls_core::oracles::{read_libsvm, LogisticOracle, NoiseModel, NoisyQuadratic, StochasticOracle};
use lmls_core::trace::mean_trace;
use lmls_core::{Budget, RunTrace, Timing};
use rayon::prelude::*;

use crate::config::{AlgoConfig, BenchConfig, ProblemSpec};
use crate::error::{CliError, Result};

/// SplitMix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `i`; the problem instance itself depends only on `base`.
pub fn trial_seed(base: u64, i: usize) -> u64 {
    base ^ splitmix64(i as u64)
}

pub enum Problem {
    Logistic(LogisticOracle),
    Quadratic(NoisyQuadratic),
}

impl Problem {
    pub fn build(spec: &ProblemSpec, seed: u64) -> Result<Problem> {
        match spec {
            ProblemSpec::Logistic { data, batch_size, mu } => {
                let ds = read_libsvm(data).map_err(|e| match e {
                    lmls_core::Error::Io(msg) => CliError::Io {
                        path: data.display().to_string(),
                        source: std::io::Error::other(msg),
                    },
                    other => other.into(),
                })?;
                let n = ds.n_samples().max(1);
                let mu = mu.unwrap_or(1.0 / n as f64);
                Ok(Problem::Logistic(LogisticOracle::new(ds, mu, (*batch_size).min(n))?))
            }
            ProblemSpec::Quadratic {
                dim,
                noise_sd,
                min_eig,
                max_eig,
            } => Ok(Problem::Quadratic(NoisyQuadratic::random(
                *dim,
                *min_eig,
                *max_eig,
                NoiseModel::gradient_only(*noise_sd),
                seed,
            )?)),
        }
    }

    pub fn oracle(&self) -> &dyn StochasticOracle {
        match self {
            Problem::Logistic(o) => o,
            Problem::Quadratic(o) => o,
        }
    }
}

/// One optimizer run from the origin.
pub fn run_trial(problem: &Problem, algo: &AlgoConfig, budget: &Budget, seed: u64, timing: Timing) -> Result<RunTrace> {
    let oracle = problem.oracle();
    let x0 = vec![0.0; oracle.dim()];
    let trace = match algo {
        AlgoConfig::Lmls(cfg) => lmls_core::run(oracle, x0, cfg, budget, seed, timing)?,
        AlgoConfig::SvrgDefaultEpoch { eta } => {
            let epoch_length = match problem {
                Problem::Logistic(o) => o.data().n_samples().div_ceil(o.batch_size()),
                Problem::Quadratic(_) => 1,
            };
            let cfg = BaselineConfig::Svrg { eta: *eta, epoch_length };
            run_baseline(oracle, x0, &cfg, budget, seed, timing)?
        }
        AlgoConfig::Baseline(cfg) => run_baseline(oracle, x0, cfg, budget, seed, timing)?,
    };
    Ok(trace)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchOutcome {
    pub traces: Vec<RunTrace>,
    /// Row-wise mean over the trials.
    pub aggregate: RunTrace,
}

/// Run every trial (in parallel up to the configured thread count) and,
/// when an output directory is set, write `trial_NNN.csv`, `aggregate.csv`
/// and `run.txt` there.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchOutcome> {
    let problem = Problem::build(&cfg.problem, cfg.seed)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError::Pool(e.to_string()))?;
    let traces: Vec<RunTrace> = pool.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|i| run_trial(&problem, &cfg.algo, &cfg.budget, trial_seed(cfg.seed, i), cfg.timing))
            .collect::<Result<Vec<_>>>()
    })?;
    let aggregate = mean_trace(&traces);
    if let Some(dir) = &cfg.out {
        write_outputs(dir, cfg, &traces, &aggregate)?;
    }
    Ok(BenchOutcome { traces, aggregate })
}

fn write_outputs(dir: &Path, cfg: &BenchConfig, traces: &[RunTrace], aggregate: &RunTrace) -> Result<()> {
    let io = |path: &Path| {
        let path = path.display().to_string();
        move |source| CliError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let width = (cfg.trials.max(1) - 1).to_string().len().max(3);
    for (i, t) in traces.iter().enumerate() {
        let path = dir.join(format!("trial_{i:0width$}.csv"));
        write_trace(&path, t)?;
    }
    write_trace(&dir.join("aggregate.csv"), aggregate)?;
    let meta = dir.join("run.txt");
    let mut w = fs::File::create(&meta).map_err(io(&meta))?;
    writeln!(w, "algorithm = {}", cfg.algo.name()).map_err(io(&meta))?;
    writeln!(w, "description = {}", describe(&cfg.algo)).map_err(io(&meta))?;
    writeln!(w, "trials = {}", cfg.trials).map_err(io(&meta))?;
    writeln!(w, "seed = {}", cfg.seed).map_err(io(&meta))?;
    writeln!(w, "problem = {:?}", cfg.problem).map_err(io(&meta))?;
    writeln!(w, "config = {:?}", cfg.algo).map_err(io(&meta))?;
    writeln!(w, "budget = {:?}", cfg.budget).map_err(io(&meta))?;
    Ok(())
}

fn write_trace(path: &Path, trace: &RunTrace) -> Result<()> {
    let file = fs::File::create(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut w = BufWriter::new(file);
    trace.write_csv(&mut w)?;
    w.flush().map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn describe(algo: &AlgoConfig) -> &'static str {
    match algo {
        AlgoConfig::Lmls(_) => "limited-memory least-squares quasi-Newton with stochastic backtracking",
        AlgoConfig::SvrgDefaultEpoch { .. } => "stochastic variance-reduced gradient, fixed step",
        AlgoConfig::Baseline(BaselineConfig::Sgd { .. }) => "stochastic gradient, fixed step",
        AlgoConfig::Baseline(BaselineConfig::Adam(_)) => "Adam, fixed step",
        AlgoConfig::Baseline(BaselineConfig::Svrg { .. }) => "stochastic variance-reduced gradient, fixed step",
        AlgoConfig::Baseline(BaselineConfig::Lbfgs(_)) => {
            "stand-in stochastic L-BFGS: standard two-loop recursion with the shared stochastic backtracking line search"
        }
    }
}
