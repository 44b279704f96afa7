use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("p-adic valuation of zero is undefined")]
    ZeroValuation,

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("division is not exact: nonzero remainder {remainder}")]
    InexactDivision { remainder: String },

    #[error("derivative leaves the log-polynomial class: coefficient of ln^{power}(1+x) is not divisible by (1+x)")]
    NotRepresentable { power: usize },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("negative entry {value} at index {index}")]
    NegativeEntry { index: usize, value: String },

    #[error("non-integral value {value} for n = {n}")]
    NonIntegral { n: u64, value: String },

    #[error("malformed rational {0:?}")]
    Parse(String),
}
