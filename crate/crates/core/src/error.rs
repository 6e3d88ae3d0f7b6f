use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("events are not simultaneous (time difference {dt:e} s)")]
    NotSimultaneous { dt: f64 },

    #[error("invalid spatial metric: {0}")]
    InvalidMetric(String),

    #[error("vector is not future-directed (<tau, v> = {tau_v})")]
    NotFutureDirected { tau_v: f64 },

    #[error("vector is not a velocity: <tau, v> = {tau_v}, expected 1")]
    NotUnitTime { tau_v: f64 },

    #[error("mass must be positive and finite, got {0}")]
    InvalidMass(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("state became non-finite at step {step}")]
    NonFiniteState { step: usize },

    #[error("critical-point solve did not converge (fiber gradient norm {residual:e})")]
    NoConvergence { residual: f64 },

    #[error("point is not critical: fiber gradient norm {norm:e} exceeds tolerance {tol:e}")]
    NotCritical { norm: f64, tol: f64 },

    #[error("family is not Morse at a sampled critical point (rank {rank}, expected {expected})")]
    NotMorse { rank: usize, expected: usize },

    #[error("eliminated block has distinct stationary solutions (separation {separation:e})")]
    SectionNotUnique { separation: f64 },

    #[error("W elements project to different vectors (|dv| = {0:e})")]
    ProjectionMismatch(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
