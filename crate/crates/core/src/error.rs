use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid quiver: {0}")]
    InvalidQuiver(String),
    #[error("invalid dimension vector: {0}")]
    InvalidDimensionVector(String),
    #[error("invalid framing: {0}")]
    InvalidFraming(String),
    #[error("zero dimension vector: {0}")]
    ZeroDimensionVector(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("invalid relation: {0}")]
    InvalidRelation(String),
    #[error("invalid expansion: {0}")]
    InvalidExpansion(String),
    #[error("shape mismatch: {0}")]
    ShapeError(String),
    #[error("relations of degree other than two are not supported here: {0}")]
    UnsupportedRelationDegree(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("central element is not admissible: {0}")]
    InadmissibleCentral(String),
    #[error("representation is not critical: {0}")]
    NotCritical(String),
    #[error("degenerate spectrum (margin {margin:.3e}): {detail}")]
    DegenerateSpectrum { margin: f64, detail: String },
    #[error("tangent vector is not on the flow-line stratum: {0}")]
    NotOnFlowLine(String),
    #[error("numerical stall: {0}")]
    NumericalStall(String),
    #[error("ledger samples disagree: {0}")]
    UnstableLedger(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
