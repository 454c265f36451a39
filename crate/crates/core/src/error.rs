use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("n must be at least {min}, got {got}")]
    RankTooSmall { min: usize, got: usize },
    #[error("index k={k} out of range 1..={n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("embedding set mismatch: expected {expected} labels, got {got}")]
    EmbeddingMismatch { expected: usize, got: usize },
    #[error("infinity type not regular: eta={eta} lies strictly between 0 and n={n}")]
    NotRegular { eta: i64, n: usize },
    #[error("infinity type not balanced at pair ({a}, {b}) for n={n}")]
    NotBalanced { a: i64, b: i64, n: usize },
    #[error("enumeration of {size} elements exceeds cap {cap}")]
    EnumerationCap { size: u128, cap: u128 },
    #[error("non-critical atom: {0}")]
    NonCriticalAtom(String),
    #[error("all-zero row")]
    ZeroRow,
    #[error("invalid composition: {0}")]
    InvalidComposition(String),
    #[error("quadrature: {0}")]
    Quadrature(String),
    #[error("singular basis")]
    SingularBasis,
    #[error("not a rational square: {0}")]
    NotRationalSquare(String),
    #[error("invalid tower: {0}")]
    InvalidTower(String),
    #[error("incompatible sigma: {0}")]
    IncompatibleSigma(String),
    #[error("sigma has no cyclotomic data and the square-free part is {0}")]
    MissingCyclotomicData(i64),
    #[error("invalid config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
