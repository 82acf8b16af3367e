use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of the maps and verification routines.
///
/// Variants that stem from a guard band name the guard in their message so the
/// CLI can report it verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate gradient: |grad rho| = {0:e} is below tolerance")]
    DegenerateGradient(f64),
    #[error("point is not on the hypersurface: |rho| = {0:e}")]
    NotOnSurface(f64),
    #[error("degenerate frame: Re and Im parts are nearly parallel (sin angle = {0:e})")]
    DegenerateFrame(f64),
    #[error("point is not on the null quadric: residual {0:e}")]
    NotOnNullQuadric(f64),
    #[error("pole hit: |denominator| = {0:e}")]
    PoleHit(f64),
    #[error("ambient mismatch: expected a point of {expected}")]
    AmbientMismatch { expected: &'static str },
    #[error("parameter out of range: {0}")]
    RangeError(String),
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("sampling failed for {0} after bounded retries")]
    SamplingFailed(String),
    #[error("(x,u) = (0,0) has no polar angle")]
    OriginPoint,
    #[error("the origin is excluded from the domain")]
    OriginExcluded,
    #[error("point is not on the quadric: residual {0:e}")]
    NotOnQuadric(f64),
    #[error("null cone guard: ||z|^2 - |w|^2| = {0:e}")]
    NullConeExcluded(f64),
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("z = 0 guard: |z| = {0:e}")]
    ZeroZ(f64),
    #[error("point is not in Sigma^nu")]
    NotInSigmaNu,
    #[error("point is not in Sigma^eta")]
    NotInSigmaEta,
    #[error("unit disk guard: |t| = {0} >= 1")]
    DiskViolation(f64),
    #[error("axis guard: (x,u) = (0,0) excluded")]
    AxisExcluded,
    #[error("ambiguous classification: {0:?} all match within tolerance")]
    Ambiguous(Vec<String>),
    #[error("branch cut: principal-branch argument {0} lies on the negative real axis")]
    BranchCut(String),
    #[error("unsupported factorization pair: {0}")]
    UnsupportedPair(String),
    #[error("continuation failed: {0}")]
    ContinuationFailed(String),
    #[error("witness does not lie over the base point: residual {0:e}")]
    WitnessInvalid(f64),
    #[error("invalid descriptor: {0}")]
    Descriptor(String),
}
