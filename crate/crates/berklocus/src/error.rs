//! Error types shared across the crate.
//!
//! Every fallible operation returns [`enum@Error`] rather than guessing. In
//! particular, arithmetic that cannot certify a result at the working
//! precision reports [`Error::PrecisionExhausted`]; callers are expected to
//! rerun with a larger digit budget.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("insufficient tower: {0}")]
    InsufficientTower(String),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("oracle mismatch: {0}")]
    OracleMismatch(String),

    #[error("unsupported factorization: {0}")]
    FactorizationUnsupported(String),

    #[error("no pole-free target conjugation among candidates: {0}")]
    CandidateExhausted(String),

    #[error("witness search exhausted: {0}")]
    SearchExhausted(String),

    #[error("point is not fixed by the map")]
    NotFixed,

    #[error("residue of an element with negative valuation")]
    NegativeValuation,

    #[error("zero polynomial")]
    ZeroPolynomial,

    #[error("denominator is identically zero")]
    ZeroDenominator,

    #[error("division by zero")]
    DivisionByZero,

    #[error("elements belong to different field contexts")]
    MixedContexts,
}

impl Error {
    /// Stable machine-readable code, used by the JSON error objects and to
    /// pick the process exit status.
    pub fn code(&self) -> &'static str {
        match self {
            Error::PrecisionExhausted(_) => "PRECISION",
            Error::InsufficientTower(_) => "TOWER",
            Error::Parse { .. } => "PARSE",
            Error::Config(_) => "PARSE",
            Error::Inconclusive(_) => "INCONCLUSIVE",
            Error::OracleMismatch(_) => "ORACLE_MISMATCH",
            Error::FactorizationUnsupported(_) => "UNSUPPORTED_FACTORIZATION",
            Error::CandidateExhausted(_) => "INCONCLUSIVE",
            Error::SearchExhausted(_) => "INCONCLUSIVE",
            Error::NotFixed
            | Error::NegativeValuation
            | Error::ZeroPolynomial
            | Error::ZeroDenominator
            | Error::DivisionByZero
            | Error::MixedContexts => "PARSE",
        }
    }

    /// Process exit status contract: 0 success, 2 parse/config, 3
    /// precision/tower, 4 inconclusive, 5 oracle mismatch.
    pub fn exit_code(&self) -> i32 {
        match self.code() {
            "PRECISION" | "TOWER" => 3,
            "INCONCLUSIVE" => 4,
            "ORACLE_MISMATCH" => 5,
            "UNSUPPORTED_FACTORIZATION" => 4,
            _ => 2,
        }
    }
}
