//! Shared fixtures for the criterion benchmarks.

use volconj::{make_eval_point, EvalPoint, Precision};

/// Evaluation point at the default 64-digit precision.
pub fn eval_point(n: u32) -> EvalPoint {
    make_eval_point(n, Precision::default()).expect("valid level")
}
