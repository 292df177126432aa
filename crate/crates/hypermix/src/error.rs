//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Steering requires a nonzero group parameter.
    #[error("steering parameter z must be nonzero")]
    ZeroParameter,

    /// The scaled steering solve reported a relative residual above tolerance.
    #[error("ill-conditioned steering solve: relative residual {residual:.3e} exceeds {tolerance:.3e}")]
    IllConditioned { residual: f64, tolerance: f64 },

    /// A flattened product grid would exceed the configured dimension cap.
    #[error("product dimension {requested} exceeds cap {cap}")]
    CapExceeded { requested: usize, cap: usize },

    /// Multi-index outside the configured grid.
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    /// No coordinate of the steering parameter reached the large-coordinate
    /// threshold; steering is impossible at that step.
    #[error("no coordinate of z reached the large-coordinate threshold {threshold}")]
    NoLargeCoordinate { threshold: f64 },

    /// Vector not supported on the steerable core block.
    #[error("vector has support outside the steerable core block")]
    SupportOutsideCore,

    /// Rank deficiency among functionals handed to the biorthogonalizer.
    #[error("functionals are linearly dependent (rank deficiency at step {step})")]
    DependentFunctionals { step: usize },

    /// The alpha recursion needs strictly positive epsilon values.
    #[error("epsilon value at grade {grade} is not positive")]
    NonpositiveEpsilon { grade: usize },

    /// Truncation must end at a grade boundary.
    #[error("truncation dimension {dim} is not a grade boundary for k = {k}")]
    IncompleteGrade { dim: usize, k: usize },

    /// Kernel span too far from a ball center to seed witnesses.
    #[error("kernel span is not reachable from ball center (distance {distance:.3e} >= radius {radius:.3e})")]
    NotReachable { distance: f64, radius: f64 },

    /// Symbol degree incompatible with the requested truncation.
    #[error("symbol degree {degree} too high for truncation {truncation}")]
    DegreeTooHigh { degree: usize, truncation: usize },

    /// Dynamics criteria require a non-constant symbol.
    #[error("constant symbol rejected: the criterion requires a non-constant symbol")]
    NonConstantRequired,

    /// Sampled image hugs the unit circle too closely to decide.
    #[error("inconclusive: all sampled moduli lie within the margin band of 1")]
    Inconclusive,

    /// Grid fields with different layouts cannot be combined.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A shifted field would wrap around the model box.
    #[error("field support escapes the model box (needed half-width {needed:.3})")]
    SupportEscape { needed: f64 },

    /// Linear system with a singular matrix.
    #[error("singular matrix in linear solve")]
    SingularMatrix,

    /// Configuration failed validation.
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
