use alloc::boxed::Box;
use alloc::string::String;

use crate::integrator::Trajectory;
use crate::params::ParamName;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parameter {name} = {value}: {bound}")]
    InvalidParameter {
        name: ParamName,
        value: f64,
        bound: &'static str,
    },

    #[error("feasibility guard violated: {guard} = {value} must be > 0")]
    Infeasible { guard: &'static str, value: f64 },

    #[error("state component {component} is not finite ({value})")]
    NonFiniteState { component: &'static str, value: f64 },

    #[error("state component {component} is negative ({value})")]
    NegativeState { component: &'static str, value: f64 },

    #[error("domain error: {0}")]
    Domain(&'static str),

    #[error("invalid integration request: {0}")]
    InvalidRequest(String),

    /// Integration stopped early; the samples produced so far are kept.
    #[error("integration failed at t = {t}: {reason}")]
    IntegrationFailure {
        t: f64,
        reason: String,
        partial: Box<Trajectory>,
    },

    #[error("equilibrium {kind} does not exist: {reason}")]
    NonExistent { kind: &'static str, reason: String },

    #[error("root finder did not converge after {iterations} iterations (last iterate lambda_h = {lambda_h}, lambda_v = {lambda_v})")]
    NoConvergence {
        iterations: usize,
        lambda_h: f64,
        lambda_v: f64,
    },

    #[error("singular matrix: {0}")]
    Singular(&'static str),

    #[error("eigenvalue solver did not converge for matrix {0}")]
    Eigen(String),

    #[error("sensitivity index undefined: target is zero")]
    ZeroTarget,
}
