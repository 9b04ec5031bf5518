use thiserror::Error;

/// Errors raised by `gcs-core`.
#[derive(Debug, Error)]
pub enum Error {
    #[error("a groupoid must have at least one object")]
    EmptyGroupoid,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("object {index} out of range (groupoid has {count} objects)")]
    InvalidObject { index: usize, count: usize },
    #[error("morphism {index} out of range (groupoid has {count} morphisms)")]
    InvalidMorphism { index: usize, count: usize },
    #[error("algebra elements belong to different groupoids")]
    GroupoidMismatch,
    #[error("Fock space of dimension {dim} is too small (need at least {required})")]
    DimensionTooSmall { dim: usize, required: usize },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("deformation function has no value f({0})")]
    MissingDeformationValue(usize),
    #[error("deformation function must be positive, f({level}) = {value}")]
    NonPositiveDeformation { level: usize, value: f64 },
    #[error("deformed factorial [f(n)]! leaves the floating-point range at n = {level}")]
    FactorialRange { level: usize },
    #[error("state is not normalizable on the truncated space")]
    NotNormalizable,
    #[error("coherent family has no samples")]
    EmptyFamily,
    #[error("unknown sample label `{0}`")]
    UnknownLabel(String),
    #[error("duplicate sample label `{0}`")]
    DuplicateLabel(String),
    #[error("degenerate family: lambda = {0:e}")]
    DegenerateFamily(f64),
    #[error("sample `{label}` is not unitary (deviation {deviation:e})")]
    NotUnitary { label: String, deviation: f64 },
    #[error("fiducial vector is not normalized (norm {0})")]
    FiducialNotNormalized(f64),
    #[error("zero isotropy order")]
    ZeroIsotropy,
    #[error("fiber count {count} is not divisible by isotropy order {isotropy}")]
    FiberNotDivisible { count: usize, isotropy: usize },
    #[error("malformed document: {0}")]
    Format(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
