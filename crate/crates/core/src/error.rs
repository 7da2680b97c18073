use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("precision exhausted: {0}")]
    Precision(String),

    #[error("element is not invertible: {0}")]
    NotInvertible(String),

    #[error("quadratic elements carry different discriminants ({0} vs {1})")]
    DiscriminantMismatch(i64, i64),

    #[error("{0} is not a unit non-square modulo {1}")]
    NotInert(i64, u64),

    #[error("prime {0} is not supported (odd primes only)")]
    UnsupportedPrime(u64),

    #[error("size guard: {what} has {size} elements, bound is {bound}")]
    SizeGuard { what: String, size: u128, bound: u128 },

    #[error("input is not a group: {0}")]
    NotAGroup(String),

    #[error("no solution for a_theta: {0}")]
    NoSolution(String),

    #[error("element outside the support ZK_T(n)")]
    NotInSupport,

    #[error("decomposition failed: {0}")]
    Decomposition(String),

    #[error("quadrature or refinement did not stabilise: {0}")]
    Unstable(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("coefficient {m} = {value} violates the Ramanujan-type bound {bound}")]
    Ramanujan { m: u64, value: f64, bound: f64 },

    #[error("coefficient source does not cover m = {0}")]
    Coverage(u64),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
