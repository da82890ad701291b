use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("precision exhausted: coefficient at exponent {exponent} requested, series certified only below {precision}")]
    PrecisionExhausted { exponent: i64, precision: i64 },

    #[error("series is zero up to its precision")]
    ZeroSeries,

    #[error("series is not a unit: leading coefficient vanishes")]
    NonUnit,

    #[error("ramification mismatch: {0} vs {1}")]
    RamificationMismatch(u32, u32),

    #[error("element is not ad-nilpotent")]
    NotNilpotent,

    #[error("connection is not in reduced form")]
    NotReduced,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid Lie algebra data: {0}")]
    InvalidAlgebra(String),

    #[error("operator is not of oper shape: {0}")]
    NotOperShaped(String),

    #[error("cyclic vector elimination degenerated")]
    CyclicVectorFailure,

    #[error("operation requires a type A algebra with its standard representation")]
    NotTypeA,

    #[error("annihilation bound violated: {0}")]
    BoundViolation(String),

    #[error("schema error: {0}")]
    Schema(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::PrecisionExhausted { .. } | Error::ZeroSeries => 2,
            Error::Schema(_) | Error::InvalidAlgebra(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
