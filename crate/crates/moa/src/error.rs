use thiserror::Error;

use crate::shape::Shape;

/// Errors shared across the array calculus, the loop-nest IR, and the
/// planning layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("index {index:?} is not valid for shape {shape}")]
    InvalidIndex { index: Vec<usize>, shape: Shape },

    #[error("offset {offset} out of range for shape {shape} ({count} components)")]
    OffsetOutOfRange {
        offset: usize,
        shape: Shape,
        count: usize,
    },

    #[error("shape mismatch: {left} vs {right}")]
    ShapeMismatch { left: Shape, right: Shape },

    #[error("layout mismatch between operands")]
    LayoutMismatch,

    #[error("{op} requires row-major operands")]
    RowMajorRequired { op: &'static str },

    #[error("{context}: expected rank {expected}, got shape {shape}")]
    RankError {
        context: &'static str,
        expected: usize,
        shape: Shape,
    },

    #[error("scalar op {op} has no identity element")]
    NoIdentity { op: &'static str },

    #[error("data length {len} does not match shape {shape} ({count} components)")]
    DataLength {
        len: usize,
        shape: Shape,
        count: usize,
    },

    #[error("loop extent must be non-negative, got {value}")]
    NegativeExtent { value: i64 },

    #[error("extent {extent} is not divisible by {divisor}")]
    NotDivisible { extent: i64, divisor: i64 },

    #[error("unknown variable `{name}`")]
    UnknownVariable { name: String },

    #[error("name `{name}` collides with an existing loop variable or parameter")]
    NameCollision { name: String },

    #[error("unbound parameter `{name}`")]
    UnboundParameter { name: String },

    #[error("{buffer} offset {offset} out of bounds (length {len})")]
    OffsetOutOfBounds {
        buffer: &'static str,
        offset: i64,
        len: usize,
    },

    #[error("loop extent for `{var}` depends on `{dependency}`, which is not bound by an enclosing loop")]
    ExtentDependency { var: String, dependency: String },

    #[error("interchange order {order:?} is not a permutation of the nest's loops")]
    BadLoopOrder { order: Vec<String> },

    #[error("expression divides by zero")]
    DivisionByZero,

    #[error("inexact division: {lhs} / {rhs}")]
    InexactDivision { lhs: i64, rhs: i64 },

    #[error("budget of {budget} bytes cannot hold {required} bytes ({what})")]
    BudgetTooSmall {
        budget: u64,
        required: u64,
        what: &'static str,
    },

    #[error("hardware shape `{name}` is invalid: {reason}")]
    BadHardwareShape { name: String, reason: String },

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
