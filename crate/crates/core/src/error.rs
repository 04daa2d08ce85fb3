//! Error type shared by every module.

use thiserror::Error;

/// Failures reported by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("step size underflow at path parameter {tau:.6e} (segment {segment})")]
    StepUnderflow { segment: usize, tau: f64 },
    #[error("non-finite value in vector field at path parameter {tau:.6e} (segment {segment})")]
    NonFinite { segment: usize, tau: f64 },
    #[error("step budget of {0} exhausted")]
    TooManySteps(usize),
    #[error("quadrature did not converge: estimate {err:.3e} above tolerance {tol:.3e}")]
    NoConvergence { err: f64, tol: f64 },
    #[error("root not bracketed: g(lo) = {glo:.6e}, g(hi) = {ghi:.6e}")]
    NoBracket { glo: f64, ghi: f64 },
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("collision: distance {0:.3e} to a primary")]
    Collision(f64),
    #[error("polar transform undefined at r = {0:.3e}")]
    OriginSingular(f64),
    #[error("eccentricity {0} is not elliptic")]
    HyperbolicInput(f64),
    #[error("collision singularity of the pendulum at lambda = {0}")]
    CollisionSingularity(String),
    #[error("fractional power evaluated within 1e-6 rad of the branch cut (U = {0})")]
    NearBranchCut(String),
    #[error("|1 + J| = {0:.3e} is too small")]
    SqrtDomain(f64),
    #[error("|1 + g| = {0:.3e} makes the graph parametrization singular")]
    TimeReparamSingular(f64),
    #[error("asymptotic series used too close to the origin (|U| = {0:.3e} < 30)")]
    TooClose(f64),
    #[error("fit rejected: {0}")]
    FitRejected(String),
    #[error("only {remaining:.2} significant digits survive the cancellation at rho = {rho}")]
    PrecisionLoss { rho: f64, remaining: f64 },
    #[error("no crossing of the section before |t| = {0}")]
    NoCrossing(f64),
    #[error("degenerate event: angular velocity {0:.3e} at the crossing")]
    EventDegenerate(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
