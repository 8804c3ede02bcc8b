use thiserror::Error;

use crate::ground::Mask;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ground set of {n} elements exceeds the limit of {max}")]
    GroundSetTooLarge { n: usize, max: usize },

    #[error("mask {mask:#x} does not index a table over {n} elements")]
    IndexOutOfRange { mask: u64, n: usize },

    #[error("families in the partition overlap at {0:?}")]
    OverlappingParts(Mask),

    #[error("forced-in set {s:?} and forced-out set {t:?} intersect")]
    OverlappingST { s: Mask, t: Mask },

    #[error("tie-break transform may overflow: (n+1)*{bound} + n with n = {n}")]
    OverflowRisk { n: usize, bound: i64 },

    #[error("minimum-norm-point iteration stalled after {iterations} major cycles (gap {gap})")]
    NumericalStall { iterations: usize, gap: f64 },

    #[error("hierarchy bound {k} exceeds ground set size {n}")]
    InvalidBound { k: usize, n: usize },

    #[error("structural promise violated: {0}")]
    StructureViolation(String),

    #[error("only {found} distinct values exist, {requested} requested")]
    ExhaustedValues { found: usize, requested: usize },

    #[error("unsupported instance kind {0:?}")]
    UnsupportedKind(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
