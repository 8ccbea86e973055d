use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix has {got} entries, expected {rows}x{cols}")]
    EntryCount { rows: usize, cols: usize, got: usize },
    #[error("matrix dimensions must be positive, got {rows}x{cols}")]
    EmptyMatrix { rows: usize, cols: usize },
    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric (relative asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("factorization failed: regularized matrix is not positive definite (pivot {pivot:e} at {index})")]
    FactorizationFailure { index: usize, pivot: f64 },
    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch { expected: (usize, usize), got: (usize, usize) },

    #[error("dataset has no samples")]
    EmptyDataset,
    #[error("class {class} has no samples")]
    EmptyClass { class: usize },
    #[error("label {label} is outside 1..={classes}")]
    InvalidLabel { label: usize, classes: usize },
    #[error("{samples} samples but {labels} labels")]
    LabelCount { samples: usize, labels: usize },
    #[error("fitting needs at least two classes")]
    SingleClass,
    #[error("fitting needs at least two samples")]
    TooFewSamples,
    #[error("requested dimension {requested} but only {available} nonzero eigenvalues are available")]
    RankDeficient { requested: usize, available: usize },
    #[error("reduced dimension {r} is outside 1..={max}")]
    InvalidDimension { r: usize, max: usize },
    #[error("projector columns are not orthonormal")]
    NonOrthonormalProjector,

    #[error("direction is not unit length (norm {norm})")]
    NonUnitDirection { norm: f64 },
    #[error("projected covariance is singular")]
    SingularCovariance,
    #[error("no sampled direction produced an invertible projected covariance")]
    DegenerateDataset,

    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("nothing to evaluate")]
    Empty,

    #[error("invalid corruption parameter: {0}")]
    InvalidCorruption(String),

    #[error("manifest lists no images")]
    EmptyManifest,
    #[error("missing file: {0}")]
    MissingFile(String),
    #[error("cannot decode {path}: {reason}")]
    DecodeError { path: String, reason: String },
    #[error("image {path} is {got:?}, expected {expected:?}")]
    DimensionMismatch { path: String, expected: (usize, usize), got: (usize, usize) },
    #[error("class {class} has {size} samples, need more than {per_class_train}")]
    InsufficientClassSize { class: usize, size: usize, per_class_train: usize },
    #[error("io error: {0}")]
    Io(String),
    #[error("malformed projector file: {0}")]
    ProjectorFormat(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
