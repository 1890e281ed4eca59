//! Simulation and estimation for the Chen bathtub-hazard lifetime model under
//! improved adaptive Type-II progressive censoring.
//!
//! - [`chen`]: the distribution itself.
//! - [`censoring`]: censoring plans, exact experiment simulation and the
//!   likelihood coefficients of an observed record.
//! - [`mle`]: likelihood, score, profile fixed-point solver, observed
//!   information and Wald intervals.
//! - [`bayes`]: gamma priors, Metropolis-within-Gibbs and importance
//!   sampling, with squared-error, LINEX and entropy loss estimates.
//! - [`montecarlo`]: replicated simulation studies (bias, MSE, coverage).
//! - [`gof`]: Kolmogorov-Smirnov and Anderson-Darling statistics with
//!   parametric bootstrap p-values.
//! - [`data`]: input parsing and the bundled device-failure data set.

pub mod bayes;
pub mod censoring;
pub mod chen;
pub mod data;
pub mod error;
pub mod gof;
pub mod mle;
pub mod montecarlo;
pub mod rng;

pub use censoring::{CensoredSample, CensoringPlan, TerminationCase};
pub use chen::ChenParams;
pub use error::{Error, Result};
