use thiserror::Error;

use crate::degree::ExponentVector;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus {0} is not a prime below 2^63")]
    InvalidModulus(u64),
    #[error("division by zero in the prime field")]
    DivisionByZero,
    #[error("invalid partition count {0}")]
    InvalidPartition(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid exponent vector: {0}")]
    InvalidExponents(String),
    #[error("exponent overflow while constructing a vector for p = {0}")]
    Overflow(usize),
    #[error("search budget of {nodes} nodes exhausted at candidate maximum {bound}")]
    BudgetExceeded {
        nodes: u64,
        bound: u64,
        /// Best valid vector known when the search gave up.
        best: ExponentVector,
    },
    #[error("field of size {q} is too small for {n} distinct nonzero evaluation points")]
    FieldTooSmall { q: u64, n: usize },
    #[error("no decodable evaluation points found after {attempts} attempts; try a larger field")]
    PointSelectionFailed { attempts: usize },
    #[error("not enough responses: {missing} more needed")]
    NotEnoughResponses { missing: usize },
    #[error("decoding system is singular")]
    DecodingSingular,
    #[error("collusion parameter X = {0} is not supported (only X = 1)")]
    UnsupportedCollusion(usize),
    #[error("every worker was dropped")]
    NoResponses,
    #[error("Gram matrix is numerically singular")]
    SingularGram,
    #[error("unknown scheme {0:?}")]
    InvalidScheme(String),
    #[error("enumeration of {0} cases exceeds the audit bound")]
    TooLarge(u128),
    #[error("truncated frame")]
    Truncated,
    #[error("malformed frame: {0}")]
    Malformed(String),
    #[error("remote worker error: {0}")]
    Remote(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
