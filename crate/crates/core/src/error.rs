use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("extension degree {0} outside supported range 3..=16")]
    UnsupportedDegree(u32),
    #[error("polynomial {poly:#x} does not have degree {s}")]
    PolynomialDegree { poly: u32, s: u32 },
    #[error("polynomial {poly:#x} is not primitive (powers of x repeat after {period})")]
    NonPrimitivePolynomial { poly: u32, period: usize },
    #[error("{n} does not divide the multiplicative order {order}")]
    NotADivisor { n: usize, order: usize },
    #[error("subgroup order {0} is not prime")]
    NotPrime(usize),
    #[error("{what}: expected length {expected}, found {found}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("symbol {symbol:#x} is not an element of GF(2^{s})")]
    SymbolOutOfField { symbol: u16, s: u32 },
    #[error("root set is empty or has m >= n (m = {m}, n = {n})")]
    RootCount { m: usize, n: usize },
    #[error("root exponents are not distinct modulo n: {0} repeats")]
    DuplicateRoots(usize),
    #[error("binary mode requires a root set closed under doubling mod n; {missing} is missing (conjugate of {root})")]
    ConjugacyViolation { root: usize, missing: usize },
    #[error("operation requires {expected} mode")]
    WrongMode { expected: &'static str },
    #[error("Hadamard index {k} out of range (valid: {lo}..{n})")]
    HadamardIndex { k: usize, lo: usize, n: usize },
    #[error("exhaustive search too large: {0}")]
    TooLarge(String),
    #[error("dense construction requested for n = {n} > {limit}")]
    ScaleGuard { n: usize, limit: usize },
    #[error("local encoding produced a nonzero syndrome in group {group}")]
    EncodingSyndrome { group: usize },
    #[error("malformed alist: {0}")]
    Alist(String),
    #[error("malformed trace file: {0}")]
    Trace(String),
    #[error("invalid configuration: {field}: {message}")]
    Config { field: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
