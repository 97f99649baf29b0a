use thiserror::Error;

/// Every failure mode surfaced by the library.
///
/// Variants carry enough context to be reported per sweep point; the harness
/// maps them to stable string codes through [`Error::code`].
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix is not hermitian (relative defect {defect:.3e})")]
    NonHermitianInput { defect: f64 },
    #[error("matrix is not real skew-symmetric: {0}")]
    NotRealSkew(String),
    #[error("pivot growth exceeded {limit:.3e} during symmetric-indefinite factorization")]
    IndefinitePivotBreakdown { limit: f64 },
    #[error("skew matrix is numerically singular (pivot {pivot:.3e})")]
    SingularSkewMatrix { pivot: f64 },
    #[error("skew matrix has odd dimension {0}")]
    OddDimension(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("eigendecomposition failed to converge")]
    EigenFailure,

    #[error("symmetry violation: {0}")]
    SymmetryViolation(String),
    #[error("geometry too small: {0}")]
    GeometryTooSmall(String),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("irrational flux {0} unsupported for Bloch evaluation")]
    IrrationalFluxUnsupported(f64),
    #[error("unknown model '{0}'")]
    UnknownModel(String),
    #[error("missing parameter '{param}' for model '{model}'")]
    MissingParameter { model: String, param: String },

    #[error("spectral gap closed on the k-grid (min gap {min_gap:.3e})")]
    GapClosedOnGrid { min_gap: f64 },
    #[error("result not converged: {0}")]
    NonConvergent(String),
    #[error("model does not declare a chiral symmetry")]
    NotChiral,
    #[error("off-diagonal chiral block is singular (min singular value {0:.3e})")]
    SingularOffDiagonal(f64),

    #[error("spectral gap closed at mu={mu} (gap {gap:.3e})")]
    GapClosed { mu: f64, gap: f64 },
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("no singular-value cluster gap (best ratio {ratio:.3})")]
    NoClusterGap { ratio: f64 },
    #[error("region touches the sample boundary")]
    RegionTouchesBoundary,

    #[error("operator has no gap at the reference level")]
    NoGap,
    #[error("truncation contains no sites")]
    EmptyTruncation,
    #[error("localizer is singular ({n_zero} eigenvalues below tolerance)")]
    SingularLocalizer { n_zero: usize },
    #[error("signature {0} is odd")]
    OddSignature(i64),
    #[error("determinant is not real (relative imaginary part {0:.3e})")]
    DeterminantNotReal(f64),
    #[error("localizer variant incompatible with model: {0}")]
    IncompatibleVariant(String),
    #[error("localizer gap {gap_l:.3e} below certified bound {bound:.3e}")]
    CertificateViolated { gap_l: f64, bound: f64 },

    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),
    #[error("ambiguous chirality {0:.3} of a near-zero mode")]
    AmbiguousChirality(f64),
    #[error("bump function support leaves the gap interval")]
    SupportOutsideGap,
    #[error("spectral flow step too coarse after refinement")]
    StepTooCoarse,

    #[error("invalid config at '{path}': {message}")]
    ConfigInvalid { path: String, message: String },
    #[error("task failed: {0}")]
    TaskFailed(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable code used in reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonHermitianInput { .. } => "NonHermitianInput",
            Error::NotRealSkew(_) => "NotRealSkew",
            Error::IndefinitePivotBreakdown { .. } => "IndefinitePivotBreakdown",
            Error::SingularSkewMatrix { .. } => "SingularSkewMatrix",
            Error::OddDimension(_) => "OddDimension",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::EigenFailure => "EigenFailure",
            Error::SymmetryViolation(_) => "SymmetryViolation",
            Error::GeometryTooSmall(_) => "GeometryTooSmall",
            Error::InvalidGeometry(_) => "InvalidGeometry",
            Error::IrrationalFluxUnsupported(_) => "IrrationalFluxUnsupported",
            Error::UnknownModel(_) => "UnknownModel",
            Error::MissingParameter { .. } => "MissingParameter",
            Error::GapClosedOnGrid { .. } => "GapClosedOnGrid",
            Error::NonConvergent(_) => "NonConvergent",
            Error::NotChiral => "NotChiral",
            Error::SingularOffDiagonal(_) => "SingularOffDiagonal",
            Error::GapClosed { .. } => "GapClosed",
            Error::UnsupportedDimension(_) => "UnsupportedDimension",
            Error::NoClusterGap { .. } => "NoClusterGap",
            Error::RegionTouchesBoundary => "RegionTouchesBoundary",
            Error::NoGap => "NoGap",
            Error::EmptyTruncation => "EmptyTruncation",
            Error::SingularLocalizer { .. } => "SingularLocalizer",
            Error::OddSignature(_) => "OddSignature",
            Error::DeterminantNotReal(_) => "DeterminantNotReal",
            Error::IncompatibleVariant(_) => "IncompatibleVariant",
            Error::CertificateViolated { .. } => "CertificateViolated",
            Error::GeometryMismatch(_) => "GeometryMismatch",
            Error::AmbiguousChirality(_) => "AmbiguousChirality",
            Error::SupportOutsideGap => "SupportOutsideGap",
            Error::StepTooCoarse => "StepTooCoarse",
            Error::ConfigInvalid { .. } => "ConfigInvalid",
            Error::TaskFailed(_) => "TaskFailed",
            Error::Io(_) => "Io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
