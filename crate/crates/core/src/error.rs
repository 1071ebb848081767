use num_complex::Complex64;
use thiserror::Error;

/// Every failure mode of the library. Variants carry the offending point
/// where one exists so callers can report it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("jet division by a jet with zero value")]
    DivisionByZeroJet,
    #[error("log/pow argument {0} lies on the branch cut")]
    BranchCutViolation(Complex64),
    #[error("jet component exceeded the finite range")]
    NonFiniteJet,
    #[error("point {0} is outside the exterior disk |z| > 1")]
    OutsideDomain(Complex64),
    #[error("point {0} is a pole")]
    PoleAtPoint(Complex64),
    #[error("derivative vanishes at {0}; local univalence fails there")]
    CriticalPoint(Complex64),
    #[error("invalid function spec: {0}")]
    InvalidSpec(String),
    #[error("evaluation failed: {0}")]
    EvaluationFailure(String),
    #[error("branch continuation failed near {0}")]
    BranchTrackingFailure(Complex64),
    #[error("h vanishes at {0}")]
    HVanishes(Complex64),
    #[error("invalid sampling plan: {0}")]
    InvalidPlan(String),
    #[error("critical point inside the sampled region at {0}")]
    CriticalPointInRegion(Complex64),
    #[error("chain denominator vanishes at z = {z}, t = {t}")]
    DenominatorVanishes { z: Complex64, t: f64 },
    #[error("w(z,t) = 1, p is undefined")]
    WEqualsOne,
    #[error("contour passes through a singularity near {0}")]
    ContourThroughSingularity(Complex64),
    #[error("point {0} is too close to the contour")]
    PointTooCloseToContour(Complex64),
    #[error("contour is not closed")]
    OpenContour,
    #[error("finite-difference stencil around {0} leaves the exterior disk")]
    StencilLeavesDomain(Complex64),
    #[error("usage: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
