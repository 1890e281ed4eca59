use thiserror::Error;

/// Errors produced by the estimation and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid censoring plan: {0}")]
    InvalidPlan(String),

    #[error("sample inconsistent with plan: {0}")]
    Inconsistent(String),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error(
        "no root of the profile score on [{low}, {high}]: h({low}) = {h_low}, h({high}) = {h_high}"
    )]
    NoRoot {
        low: f64,
        high: f64,
        h_low: f64,
        h_high: f64,
    },

    #[error("observed information is singular (relative determinant {0:e})")]
    SingularInformation(f64),

    #[error(
        "importance proposal for beta is invalid: rate d - sum(ln x) = {rate} <= 0; \
         use the Metropolis-Hastings sampler for this data set"
    )]
    ProposalInvalid { rate: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("every one of the {0} replications failed")]
    AllReplicationsFailed(usize),

    #[error("{failed} of {reps} bootstrap refits failed (more than 10%)")]
    BootstrapFailures { failed: usize, reps: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
