//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("point ({0}, {1}) lies outside the closed parameter region")]
    OutsideRegion(f64, f64),

    #[error("alpha parameters must be non-negative (got {0})")]
    NegativeAlpha(f64),

    #[error("gamma function pole at non-positive integer argument {0}")]
    PoleArgument(f64),

    #[error("point is within resonance distance of the boundary; use the resonant path")]
    ResonantPoint,

    #[error("operation is not defined for boundary case {0}")]
    WrongCase(&'static str),

    #[error("contour abscissa {0} too close to the pole lattice")]
    ContourTooClose(f64),

    #[error("quadrature failed to converge: {0}")]
    NonConvergent(&'static str),

    #[error("exponent spacing {0:.3e} is resonant to working precision; route to the resonant series")]
    NearResonanceIllConditioned(f64),

    #[error("cubature refinement exceeded its budget")]
    CubatureBudgetExceeded,

    #[error("matrix construction self-check failed: {0}")]
    StructureInconsistent(String),

    #[error("lambda-ODE integration lost step control near lambda = {0:.3e}")]
    StiffFailure(f64),

    #[error("trajectory blew up at x = {last_x:.6e} (norm > {limit:.1e})")]
    BlowUp { last_x: f64, limit: f64 },

    #[error("step size underflow at x = {0:.6e}")]
    StepUnderflow(f64),

    #[error("asymptotic signal below noise floor in the fit window")]
    SignalBelowNoise,

    #[error("exponential overflow in Toda right-hand side (argument {0:.3e})")]
    Overflow(f64),

    #[error("singular matrix in 4x4 solve (|det| = {0:.3e})")]
    SingularMatrix(f64),

    #[error("{0}")]
    InvalidInput(String),
}
