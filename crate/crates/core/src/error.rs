use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    CompositeModulus(u64),
    #[error("characteristic 2 is not supported")]
    CharTwoUnsupported,
    #[error("{value} is a square modulo {p}; a non-residue is required")]
    ResidueIsSquare { value: u64, p: u64 },
    #[error("modulus {0} exceeds the supported range (p < 2^32)")]
    ModulusTooLarge(u64),
    #[error("cannot parse {input:?} as an element of {field}: {reason}")]
    Parse {
        input: String,
        field: String,
        reason: String,
    },
    #[error("scalars from different fields were combined")]
    FieldMismatch,

    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("dimension {0} is odd")]
    OddDimension(usize),
    #[error("matrix is not skew-symmetric with zero diagonal")]
    NotSkewSymmetric,
    #[error("index {index} out of range for dimension {bound}")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("row and column index sets differ in size ({rows} vs {cols}) or are not increasing")]
    SizeMismatch { rows: usize, cols: usize },
    #[error("matrix does not have full rank ({rank} < {needed})")]
    RankDeficient { rank: usize, needed: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("invalid bilinear form: {0}")]
    InvalidForm(String),
    #[error("invalid orbit parameters {params} for this configuration: {reason}")]
    InvalidParams { params: String, reason: String },
    #[error("form has Witt index {available}, but {needed} is required")]
    InsufficientWittIndex { needed: usize, available: usize },
    #[error("no reference maximal isotropic subspace exists for this form over this field")]
    SignUndefinedForForm,
    #[error("parameters ({r1},{r2}) split into two components; a sign is required")]
    ExceptionalNeedsSign { r1: usize, r2: usize },
    #[error("parameters belong to different configurations")]
    ConfigMismatch,
    #[error("right-hand side is not {expected}")]
    SymmetryMismatch { expected: &'static str },

    #[error("star eigenvalue square root of {square} does not exist in {field}; pass a quadratic extension field")]
    EigenvalueNotInField { square: String, field: String },
    #[error("operation requires a {expected} form")]
    WrongKind { expected: &'static str },

    #[error("enumeration needs {needed} visits, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("operation requires a finite field")]
    InfiniteField,
    #[error("{0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
