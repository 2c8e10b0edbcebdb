//! Command-line and config-file parsing.
//!
//! Every flag can also be set in a config file as `key = value`, one per
//! line, with `#` comments. Keys are flag names without the leading dashes
//! (`batch-size` or `batch_size`). A flag on the command line wins over the
//! file, and the file wins over the built-in default.

use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, ValueEnum};
use lmls_core::baselines::{AdamConfig, BaselineConfig, LbfgsConfig};
use lmls_core::{Budget, DirectionConfig, LineSearchConfig, LmlsConfig, Timing};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProblemKind {
    Logistic,
    Quadratic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Lmls,
    Sg,
    Adam,
    Svrg,
    Lbfgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TimingArg {
    On,
    Off,
}

#[derive(Debug, Clone, Default, Parser)]
#[command(name = "lmls-bench", version, about = "Seeded Monte-Carlo benchmark runs for LMLS and baseline optimizers")]
pub struct Args {
    /// Objective to minimize.
    #[arg(long, value_enum)]
    pub problem: Option<ProblemKind>,
    /// LIBSVM file for the logistic problem (`.gz` accepted).
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub algo: Option<Algo>,
    /// Minibatch size in samples [default: 32, capped at the dataset size].
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Iteration limit per trial.
    #[arg(long)]
    pub iters: Option<usize>,
    /// Per-sample gradient evaluation limit per trial.
    #[arg(long)]
    pub grad_budget: Option<u64>,
    /// Wall-clock limit per trial in seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory for per-trial and aggregate CSV files.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `key = value` config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads for trials (0 = all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// `off` writes 0 in the wall_ms column so traces are bit-reproducible.
    #[arg(long, value_enum)]
    pub timing: Option<TimingArg>,

    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub memory: Option<usize>,
    #[arg(long)]
    pub gamma0: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long)]
    pub tau: Option<usize>,
    /// Gradient noise standard deviation; estimated at x₀ when omitted.
    #[arg(long)]
    pub sigma_g: Option<f64>,
    /// Draws used to estimate the gradient noise.
    #[arg(long)]
    pub sigma_samples: Option<usize>,
    /// L2 weight of the logistic loss [default: 1/n].
    #[arg(long)]
    pub mu: Option<f64>,

    /// Fixed step size for sg, adam and svrg.
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub beta1: Option<f64>,
    #[arg(long)]
    pub beta2: Option<f64>,
    #[arg(long)]
    pub adam_eps: Option<f64>,
    /// SVRG inner steps per snapshot [default: one pass over the data].
    #[arg(long)]
    pub epoch_length: Option<usize>,

    /// Dimension of the synthetic quadratic.
    #[arg(long)]
    pub quad_dim: Option<usize>,
    /// Gradient noise standard deviation of the synthetic quadratic.
    #[arg(long)]
    pub quad_noise: Option<f64>,
    /// Eigenvalue range of the synthetic quadratic Hessian.
    #[arg(long)]
    pub quad_min_eig: Option<f64>,
    #[arg(long)]
    pub quad_max_eig: Option<f64>,
}

macro_rules! fill_from {
    ($dst:ident, $src:ident; $($field:ident),* $(,)?) => {
        $( if $dst.$field.is_none() { $dst.$field = $src.$field; } )*
    };
}

impl Args {
    /// Fill every unset field from `other`.
    pub fn or(mut self, other: Args) -> Args {
        fill_from!(self, other;
            problem, data, algo, batch_size, iters, grad_budget, time_limit, trials, seed, out, config,
            threads, timing, lambda, memory, gamma0, kappa, q, rho, c, xi, tau, sigma_g, sigma_samples, mu,
            eta, beta1, beta2, adam_eps, epoch_length, quad_dim, quad_noise, quad_min_eig, quad_max_eig,
        );
        self
    }
}

/// Parse config-file text into the same structure as the command line.
pub fn parse_config_text(text: &str) -> Result<Args> {
    let mut argv = vec!["lmls-bench".to_string()];
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Config(format!("line {}: expected `key = value`", n + 1)));
        };
        let key = key.trim().replace('_', "-");
        if key == "config" {
            return Err(CliError::Config(format!("line {}: config files cannot nest", n + 1)));
        }
        argv.push(format!("--{key}"));
        argv.push(value.trim().to_string());
    }
    Args::try_parse_from(argv).map_err(|e| CliError::Config(e.to_string()))
}

pub fn load_config_file(path: &Path) -> Result<Args> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    parse_config_text(&text)
}

/// Problem instance description.
#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSpec {
    Logistic {
        data: PathBuf,
        batch_size: usize,
        mu: Option<f64>,
    },
    Quadratic {
        dim: usize,
        noise_sd: f64,
        min_eig: f64,
        max_eig: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum AlgoConfig {
    Lmls(LmlsConfig),
    /// SVRG without an explicit epoch length: one pass over the data.
    SvrgDefaultEpoch { eta: f64 },
    Baseline(BaselineConfig),
}

impl AlgoConfig {
    pub fn name(&self) -> &'static str {
        match self {
            AlgoConfig::Lmls(_) => "lmls",
            AlgoConfig::SvrgDefaultEpoch { .. } => "svrg",
            AlgoConfig::Baseline(b) => b.name(),
        }
    }
}

/// Fully resolved benchmark configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub problem: ProblemSpec,
    pub algo: AlgoConfig,
    pub trials: usize,
    pub seed: u64,
    pub budget: Budget,
    pub out: Option<PathBuf>,
    /// 0 means one worker per core.
    pub threads: usize,
    pub timing: Timing,
}

pub const DEFAULT_BATCH: usize = 32;
pub const DEFAULT_ITERS: usize = 1000;

impl BenchConfig {
    /// Parse `argv` (including the program name), merge the config file if
    /// one is named, and validate.
    pub fn from_argv<I, T>(argv: I) -> Result<BenchConfig>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        let cli = Args::try_parse_from(argv)?;
        BenchConfig::from_args(cli)
    }

    pub fn from_args(cli: Args) -> Result<BenchConfig> {
        let merged = match &cli.config {
            Some(path) => {
                let file = load_config_file(path)?;
                cli.or(file)
            }
            None => cli,
        };
        BenchConfig::resolve(merged)
    }

    /// Apply defaults and validate.
    pub fn resolve(a: Args) -> Result<BenchConfig> {
        let problem = match a.problem.unwrap_or(ProblemKind::Quadratic) {
            ProblemKind::Logistic => ProblemSpec::Logistic {
                data: a
                    .data
                    .clone()
                    .ok_or_else(|| CliError::Config("--problem logistic needs --data PATH".into()))?,
                batch_size: a.batch_size.unwrap_or(DEFAULT_BATCH),
                mu: a.mu,
            },
            ProblemKind::Quadratic => ProblemSpec::Quadratic {
                dim: a.quad_dim.unwrap_or(20),
                noise_sd: a.quad_noise.unwrap_or(0.1),
                min_eig: a.quad_min_eig.unwrap_or(0.1),
                max_eig: a.quad_max_eig.unwrap_or(10.0),
            },
        };
        if let ProblemSpec::Quadratic { dim, noise_sd, min_eig, max_eig } = &problem {
            if *dim == 0 {
                return Err(CliError::Config("quad-dim must be at least 1".into()));
            }
            if !(*noise_sd >= 0.0) {
                return Err(CliError::Config("quad-noise must be non-negative".into()));
            }
            if !(*min_eig > 0.0 && max_eig >= min_eig) {
                return Err(CliError::Config("quadratic eigenvalue range must be positive".into()));
            }
        }

        let algo = match a.algo.unwrap_or(Algo::Lmls) {
            Algo::Lmls => AlgoConfig::Lmls(lmls_config(&a)?),
            Algo::Sg => AlgoConfig::Baseline(BaselineConfig::Sgd {
                eta: a.eta.unwrap_or(0.1),
            }),
            Algo::Adam => {
                let d = AdamConfig::default();
                AlgoConfig::Baseline(BaselineConfig::Adam(AdamConfig {
                    eta: a.eta.unwrap_or(d.eta),
                    beta1: a.beta1.unwrap_or(d.beta1),
                    beta2: a.beta2.unwrap_or(d.beta2),
                    eps: a.adam_eps.unwrap_or(d.eps),
                }))
            }
            Algo::Svrg => {
                let eta = a.eta.unwrap_or(0.1);
                match a.epoch_length {
                    Some(epoch_length) => AlgoConfig::Baseline(BaselineConfig::Svrg { eta, epoch_length }),
                    None => AlgoConfig::SvrgDefaultEpoch { eta },
                }
            }
            Algo::Lbfgs => AlgoConfig::Baseline(BaselineConfig::Lbfgs(LbfgsConfig {
                memory: a.memory.unwrap_or(LbfgsConfig::default().memory),
                line_search: line_search_config(&a),
            })),
        };
        match &algo {
            AlgoConfig::Lmls(c) => c.validate()?,
            AlgoConfig::SvrgDefaultEpoch { eta } => BaselineConfig::Sgd { eta: *eta }.validate()?,
            AlgoConfig::Baseline(b) => b.validate()?,
        }

        let budget = Budget {
            max_iters: a.iters,
            max_grad_evals: a.grad_budget,
            wall_clock: match a.time_limit {
                Some(s) if s > 0.0 && s.is_finite() => Some(Duration::from_secs_f64(s)),
                Some(_) => return Err(CliError::Config("time-limit must be positive".into())),
                None => None,
            },
        };
        let budget = if budget == Budget::default() {
            Budget::iters(DEFAULT_ITERS)
        } else {
            budget
        };

        let trials = a.trials.unwrap_or(1);
        if trials == 0 {
            return Err(CliError::Config("trials must be at least 1".into()));
        }
        Ok(BenchConfig {
            problem,
            algo,
            trials,
            seed: a.seed.unwrap_or(0),
            budget,
            out: a.out,
            threads: a.threads.unwrap_or(0),
            timing: match a.timing.unwrap_or(TimingArg::On) {
                TimingArg::On => Timing::Wall,
                TimingArg::Off => Timing::Off,
            },
        })
    }
}

fn line_search_config(a: &Args) -> LineSearchConfig {
    let d = LineSearchConfig::default();
    LineSearchConfig {
        c: a.c.unwrap_or(d.c),
        rho: a.rho.unwrap_or(d.rho),
        xi: a.xi.unwrap_or(d.xi),
        tau: a.tau.unwrap_or(d.tau),
    }
}

fn lmls_config(a: &Args) -> Result<LmlsConfig> {
    let d = LmlsConfig::default();
    let dd = DirectionConfig::default();
    if let Some(s) = a.sigma_g {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(CliError::Config("sigma-g must be non-negative".into()));
        }
    }
    Ok(LmlsConfig {
        direction: DirectionConfig {
            lambda: a.lambda.unwrap_or(dd.lambda),
            gamma0: a.gamma0.unwrap_or(dd.gamma0),
            kappa: a.kappa.unwrap_or(dd.kappa),
            q: a.q.unwrap_or(dd.q),
            sigma_g_sq: a.sigma_g.map(|s| s * s),
            beta_margin: dd.beta_margin,
        },
        line_search: line_search_config(a),
        memory: a.memory.unwrap_or(d.memory),
        sigma_samples: a.sigma_samples.unwrap_or(d.sigma_samples),
    })
}
