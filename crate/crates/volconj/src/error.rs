//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("argument on branch cut: {0}")]
    BranchCut(String),
    #[error("term budget exceeded: estimated {estimated:.3e} terms > budget {budget:.3e}; use a restricted window")]
    BudgetExceeded { estimated: f64, budget: f64 },
    #[error("precision insufficient: {digits} digits < required {required} (peak term ~1e{peak_exponent})")]
    PrecisionInsufficient { digits: u32, required: u32, peak_exponent: u32 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("parse error at position {position}: expected {expected}")]
    Parse { position: usize, expected: String },
}

pub type Result<T> = std::result::Result<T, Error>;
