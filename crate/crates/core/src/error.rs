use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("truncation of {cells} cells exceeds the enumeration cap {cap}")]
    CapExceeded { cells: u128, cap: u64 },
    #[error("carry out of depth {depth}: shift needs a deeper prefix")]
    CarryOverflow { depth: usize },
    #[error("prefix is all zeros; the value depends on deeper coordinates")]
    UnresolvedTail,
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown rule `{0}`")]
    UnknownTheorem(String),
    #[error("unknown gallery id `{0}`")]
    UnknownGallery(String),
    #[error("no strategy meets the smallness conditions: {0}")]
    StrategyInfeasible(String),
    #[error("hypothesis unavailable: {0}")]
    HypothesisUnavailable(String),
    #[error("nothing found within the horizon: {0}")]
    NotFoundWithinHorizon(String),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("root not bracketed: {0}")]
    BracketFailure(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("operation needs kind {expected}")]
    WrongKind { expected: &'static str },
}

pub type Result<T> = std::result::Result<T, Error>;
