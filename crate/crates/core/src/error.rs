use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("input vector is not unit length (norm {norm})")]
    NonUnitInput { norm: f64 },
    #[error("no rotation exists in dimension {n}")]
    DimensionTooSmall { n: usize },
    #[error("matrix is not rank one (second eigenvalue {second}, trace {trace})")]
    NotRankOne { second: f64, trace: f64 },
    #[error("floating point overflow in {0}")]
    Overflow(&'static str),
    #[error("wrong size: expected {expected}, got {got}")]
    WrongSize { expected: String, got: String },
    #[error("bad signature ({p},{q}): both must be at least 3")]
    BadSignature { p: usize, q: usize },
    #[error("matrix is not special orthogonal (residual {residual})")]
    NotSpecialOrthogonal { residual: f64 },
    #[error("not in SO°(p,q): {check} failed with residual {residual}")]
    NotInGroup { check: &'static str, residual: f64 },
    #[error("zero vector has no meaningful stabilizer")]
    ZeroVector,
    #[error("element does not stabilize the vector (residual {residual})")]
    NotAStabilizer { residual: f64 },
    #[error("bad flow parameters: {0}")]
    BadParameters(String),
    #[error("ODE integration failed: {0}")]
    IntegrationFailure(String),
    #[error("operation requires a {expected} flow")]
    WrongKind { expected: &'static str },
    #[error("angles {from} and {to} lie on different arcs")]
    DifferentArcs { from: f64, to: f64 },
    #[error("angle {0} is a fixed point of the flow")]
    AtFixedPoint(f64),
    #[error("residues at the fixed points do not cancel")]
    NonCancellingResidues,
    #[error("flows are of different kinds")]
    KindMismatch,
    #[error("bad input flow: {0}")]
    BadInputFlow(String),
    #[error("trace {t} below the minimum {min} of the scale function")]
    NoRealRoot { t: f64, min: f64 },
    #[error("configuration outside W+ (gap {gap})")]
    OutsideWPlus { gap: f64 },
    #[error("ambiguous decomposition (best residual {best}, runner-up {runner_up})")]
    NumericalAmbiguity { best: f64, runner_up: f64 },
    #[error("point outside chart domain: {0}")]
    OutsideDomain(String),
    #[error("no evaluation route succeeded: {0}")]
    Unreachable(String),
    #[error("element does not preserve the null line (residual {residual})")]
    NotInP { residual: f64 },
    #[error("bundle canonicalization failed: {0}")]
    CanonicalizationFailure(String),
    #[error("action evaluation failed: {0}")]
    EvaluatorFailure(String),
    #[error("rank decision ill-conditioned (singular value gap {gap})")]
    IllConditioned { gap: f64 },
    #[error("no stabilizer algebra contained in the isotropy (angle {angle})")]
    NoContainment { angle: f64 },
}
