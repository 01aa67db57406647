//! Crate-wide error type.
//!
//! Variants are named after the condition they signal and those names are
//! surfaced verbatim in CLI reports, so renaming one is a compatibility
//! break.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CcError {
    // ---- construction / validation -------------------------------------
    #[error("invalid space: {reason}")]
    InvalidSpace { reason: String },

    #[error("invalid projection: {reason}")]
    InvalidProjection { reason: String },

    #[error("invalid density matrix: {reason}")]
    InvalidDensity { reason: String },

    #[error("not a valid rational: {text:?}")]
    BadRational { text: String },

    #[error("number is not finite: {value}")]
    NonFiniteNumber { value: f64 },

    #[error("atom index {index} out of range for a space of {atom_count} atoms")]
    BadAtomIndex { index: usize, atom_count: usize },

    #[error("unknown name {name:?}")]
    UnknownName { name: String },

    #[error("malformed input document: {detail}")]
    ParseError { detail: String },

    // ---- classical event algebra ----------------------------------------
    #[error("event belongs to a different space")]
    ForeignEvent,

    #[error("conditioning event has measure zero")]
    ConditionOnNull,

    #[error("space has {atom_count} atoms, above the enumeration limit {limit}")]
    AtomCountTooLarge { atom_count: usize, limit: usize },

    #[error("event list {which} is not closed under complement")]
    NotComplementClosed { which: String },

    // ---- Reichenbach conditions and cause types -------------------------
    #[error("probability of {which} is zero but must be positive")]
    ZeroProbabilityCondition { which: String },

    #[error("events are not positively correlated")]
    NotCorrelated,

    #[error("joint probability exceeds a marginal")]
    InconsistentJoint,

    #[error("parameters hit a degenerate denominator ({which})")]
    DegenerateParams { which: String },

    #[error("parameter {which} outside its admissible bounds")]
    OutOfBounds { which: String },

    #[error("cause type is not admissible for the given correlation: {reason}")]
    NotAdmissible { reason: String },

    // ---- completion ------------------------------------------------------
    #[error("completion would create {atoms} atoms, above the limit {limit}")]
    RequestLimit { atoms: usize, limit: usize },

    // ---- quantum ----------------------------------------------------------
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("projections do not commute")]
    NonCommuting,

    #[error("density matrix has a negative eigenvalue {eigenvalue}")]
    NotPositive { eigenvalue: f64 },

    #[error("cos^2 of a cell angle is {value}, outside [0, 1]")]
    CosineOutOfRange { value: f64 },

    #[error("cell of dimension {dim} has no direction orthogonal to the block vector")]
    CellDimensionTooSmall { dim: usize },
}

impl CcError {
    /// The bare variant name, as surfaced in machine-readable reports.
    pub fn name(&self) -> &'static str {
        use CcError::*;
        match self {
            InvalidSpace { .. } => "InvalidSpace",
            InvalidProjection { .. } => "InvalidProjection",
            InvalidDensity { .. } => "InvalidDensity",
            BadRational { .. } => "BadRational",
            NonFiniteNumber { .. } => "NonFiniteNumber",
            BadAtomIndex { .. } => "BadAtomIndex",
            UnknownName { .. } => "UnknownName",
            ParseError { .. } => "ParseError",
            ForeignEvent => "ForeignEvent",
            ConditionOnNull => "ConditionOnNull",
            AtomCountTooLarge { .. } => "AtomCountTooLarge",
            NotComplementClosed { .. } => "NotComplementClosed",
            ZeroProbabilityCondition { .. } => "ZeroProbabilityCondition",
            NotCorrelated => "NotCorrelated",
            InconsistentJoint => "InconsistentJoint",
            DegenerateParams { .. } => "DegenerateParams",
            OutOfBounds { .. } => "OutOfBounds",
            NotAdmissible { .. } => "NotAdmissible",
            RequestLimit { .. } => "RequestLimit",
            DimensionMismatch { .. } => "DimensionMismatch",
            NonCommuting => "NonCommuting",
            NotPositive { .. } => "NotPositive",
            CosineOutOfRange { .. } => "CosineOutOfRange",
            CellDimensionTooSmall { .. } => "CellDimensionTooSmall",
        }
    }
}
