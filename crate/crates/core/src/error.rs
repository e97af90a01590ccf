use thiserror::Error;

use crate::ratpoly::JetVar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at offset {pos}: {message}")]
    Syntax { pos: usize, message: String },

    #[error("unknown variable `{name}` at offset {pos}")]
    UnknownVariable { pos: usize, name: String },

    #[error("jet order {j} exceeds the truncation order {n}")]
    JetOrderOutOfRange { j: u32, n: u32 },

    #[error("variable {var} is not a base-ring variable")]
    NotBaseVariable { var: JetVar },

    #[error("variable {var} is outside the ring with s={s}, n={n}")]
    VariableOutsideRing { var: JetVar, s: u32, n: u32 },

    #[error("relation `{relation}` must only mention base variables x1..x{s}")]
    InvalidRelation { relation: String, s: u32 },

    #[error("jet weight {weight} exceeds the derivation order l={l}")]
    WeightExceedsOrder { weight: u32, l: u32 },

    #[error("a differential operator term with |alpha| = 0 does not kill constants")]
    ZeroOrderTerm,

    #[error("operator term of order {degree} exceeds the derivation order {m}")]
    OperatorOrderTooHigh { degree: u32, m: u32 },

    #[error("table key `{key}` must have degree between 1 and {m}")]
    TableKey { key: String, m: u32 },

    #[error("expected {expected} factors, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("derivation domain (s={s}, n={n}) does not match ring (s={ring_s}, n={ring_n})")]
    DomainMismatch { s: u32, n: u32, ring_s: u32, ring_n: u32 },

    #[error("{0}")]
    Unsupported(String),

    #[error("{0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
