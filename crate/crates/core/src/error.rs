use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("field order {order} exceeds the cap {cap}")]
    FieldCap { order: u64, cap: u32 },
    #[error("no fixed irreducible polynomial for q = {0}")]
    UnsupportedField(u64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix dimension {0} exceeds the supported maximum")]
    DimensionTooLarge(usize),
    #[error("singular matrix")]
    Singular,
    #[error("group order {order} exceeds the cap {cap}")]
    OrderCap { order: u128, cap: usize },
    #[error("subgroup enumeration needs |G| <= {cap}, got {order}")]
    SubgroupCap { order: usize, cap: usize },
    #[error("split {alpha} out of range for degree {degree}")]
    SplitOutOfRange { alpha: usize, degree: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("ambient mismatch: {0} vs {1}")]
    AmbientMismatch(String, String),
    #[error("value is not rational")]
    NotRational,
    #[error("invalid triple: {0}")]
    InvalidTriple(String),
    #[error("not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("malformed specifier: {0}")]
    Parse(String),
    #[error("singular mark matrix: rank {rank} of {size}")]
    SingularMarks { rank: usize, size: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
