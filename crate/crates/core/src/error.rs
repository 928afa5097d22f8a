use thiserror::Error;

use crate::dynamics::IntegrationFailure;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("precision mismatch: {0} bits vs {1} bits")]
    PrecisionMismatch(u32, u32),

    #[error("malformed rational function: {0}")]
    MalformedRational(String),

    #[error("root finder did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no quasi-polynomial solutions: M not a positive integer ({0})")]
    NoQuasiPolynomialSolutions(String),

    #[error("repeated eigenvalue within tolerance at indices {0} and {1}")]
    RepeatedEigenvalue(usize, usize),

    #[error("degenerate Wronskian: inputs are linearly dependent")]
    DegenerateWronskian,

    #[error("P_I has a root of multiplicity {mult} near {location}; pole strength {strength} is not k(k+1)")]
    InconsistentMultiplicity {
        location: String,
        mult: u32,
        strength: String,
    },

    #[error("pole of order {order} at {location}: not a double-pole Schrödinger potential")]
    PoleOrderTooHigh { order: i64, location: String },

    #[error("singular Jacobian")]
    SingularJacobian,

    #[error("point collision: minimum distance {distance:e} below threshold {threshold:e}")]
    Collision { distance: f64, threshold: f64 },

    #[error("iteration cap of {max_iter} reached (residual {residual:e})")]
    IterationCap {
        max_iter: usize,
        residual: f64,
        /// Last accepted iterate.
        last: Vec<rug::Complex>,
    },

    #[error("coincident zero and pole at {0}")]
    CoincidentZeroPole(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("{0}")]
    Integration(Box<IntegrationFailure>),
}
