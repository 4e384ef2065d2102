use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("length mismatch: {left} values vs {right} probabilities")]
    LengthMismatch { left: usize, right: usize },

    #[error("probability at index {index} is not strictly positive ({value})")]
    NonPositiveProbability { index: usize, value: f64 },

    #[error("probabilities sum to {sum}, expected 1")]
    BadNormalization { sum: f64 },

    #[error("non-finite value at index {index}")]
    NonFiniteValue { index: usize },

    #[error("empty sample")]
    EmptySample,

    #[error("{name} = {value} is out of range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("scale factor {0} is negative")]
    NegativeScale(f64),

    #[error("sequence is not nondecreasing at index {index}")]
    NotMonotone { index: usize },

    #[error("solver did not reach tolerance {abs_tol} within {max_iter} iterations")]
    MaxIterExceeded { abs_tol: f64, max_iter: usize },

    #[error("invalid solver configuration: {0}")]
    InvalidSolverConfig(String),

    #[error("subset must be nonempty and proper")]
    EmptyOrFullSubset,

    #[error("random variables live on different probability spaces")]
    SpaceMismatch,

    #[error("{atoms} atoms exceeds the subset enumeration limit of {limit}")]
    TooManyAtoms { atoms: usize, limit: usize },

    #[error("invalid distortion `{label}`: {reason}")]
    InvalidDistortion { label: String, reason: String },

    #[error("invalid mixing measure: {0}")]
    InvalidMeasure(String),

    #[error("Lipschitz bound violated: |delta e| = {delta_e} > {bound} * {d1}")]
    BoundViolated { delta_e: f64, d1: f64, bound: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}
