//! Stochastic limited-memory quasi-Newton optimization.
//!
//! The inverse-Hessian approximation is the regularized least-squares fit
//! `H = (γI + λ⁻¹SYᵀ)(I − Y(λI + YᵀY)⁻¹Yᵀ)` to the stored correction pairs.
//! A Cholesky factor of `λI + YᵀY` is maintained incrementally as pairs are
//! pushed into a ring buffer, so a direction costs `O(md + m²)`.

pub mod baselines;
pub mod chol;
pub mod dense;
pub mod direction;
pub mod driver;
pub mod error;
pub mod line_search;
pub mod memory;
pub mod oracles;
pub mod run;
pub mod trace;

pub use chol::CholFactor;
pub use dense::ColMatrix;
pub use direction::{DirectionConfig, DirectionReport};
pub use driver::{run, LmlsConfig, LmlsState};
pub use error::{Error, Result};
pub use line_search::{LineSearchConfig, LineSearchOutcome};
pub use memory::{PairRingBuffer, PushOutcome};
pub use oracles::{BatchSeed, StochasticOracle};
pub use run::{Budget, EvalCounter, Optimizer, StepInfo, Timing};
pub use trace::{RunTrace, TraceRecord, CSV_HEADER};
