use thiserror::Error;

/// Errors raised across the calculus.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("subsets belong to different group contexts ({0} vs {1})")]
    ContextMismatch(String, String),
    #[error("invalid group table: {0}")]
    InvalidGroup(String),
    #[error("group order {order} exceeds enumeration cap {cap}")]
    CapExceeded { order: usize, cap: usize },
    #[error("invalid set parameters: {0}")]
    InvalidSet(String),
    #[error("operation leaves the exact fragment: {0}")]
    UnsupportedExact(String),
    #[error("ideal is improper on this group: {0}")]
    ImproperIdeal(String),
    #[error("window budget exceeded: radius {radius} > cap {cap}")]
    BudgetExceeded { radius: u64, cap: u64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("{0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
