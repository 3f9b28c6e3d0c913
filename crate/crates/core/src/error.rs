use thiserror::Error;

use crate::linalg::Int;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("linear system has no solution")]
    NoSolution,

    #[error("resource limit exceeded: {0}")]
    Budget(String),

    #[error("cochain is not a cocycle: {0}")]
    NotCocycle(String),

    #[error("class is not torsion")]
    NotTorsion,

    #[error("no lift: class of order {order} is not the Bockstein of a mod-{n} class")]
    NoLift { order: Int, n: Int },

    #[error("lift coset of size {size} exceeds the cap {cap}")]
    CosetTooLarge { size: u128, cap: u128 },

    #[error("coefficient mismatch: {0}")]
    Modulus(String),

    #[error("cochains live on different spaces")]
    SpaceMismatch,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("internal consistency violation: {0}")]
    Internal(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable short name, used in machine-readable error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse(_) => "parse",
            Error::Shape(_) => "shape",
            Error::NoSolution => "no-solution",
            Error::Budget(_) => "budget",
            Error::NotCocycle(_) => "not-cocycle",
            Error::NotTorsion => "not-torsion",
            Error::NoLift { .. } => "no-lift",
            Error::CosetTooLarge { .. } => "coset-too-large",
            Error::Modulus(_) => "modulus",
            Error::SpaceMismatch => "space-mismatch",
            Error::Unsupported(_) => "unsupported",
            Error::Internal(_) => "internal",
            Error::Io(_) => "io",
        }
    }
}
