//! Common error type for the whole crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// A signed log-space sum came out non-positive, so its logarithm does
    /// not exist. Carries the signed-log residual for diagnostics; callers
    /// that try several evaluation strategies treat this as method failure.
    #[error("signed log-sum is not positive (sign {sign}, log|sum| = {logabs})")]
    NonPositiveSum { sign: i8, logabs: f64 },

    #[error("table capacity exceeded: requested index {requested}, bound {bound}")]
    Capacity { requested: usize, bound: usize },

    #[error("no sign change on [{lo}, {hi}]: f(lo) = {flo:e}, f(hi) = {fhi:e}")]
    Bracket { lo: f64, hi: f64, flo: f64, fhi: f64 },

    #[error("no convergence within {iterations} iterations")]
    Convergence { iterations: usize },

    #[error("objective evaluation returned a non-finite value at {at}")]
    Evaluation { at: f64 },

    #[error("{what} = {value} outside attainable range ({lo}, {hi})")]
    Range {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("row {row} is degenerate: column {col} holds {value}")]
    DegenerateRow { row: usize, col: usize, value: f64 },

    #[error("evaluation method {method} failed: {reason}")]
    MethodFailure { method: &'static str, reason: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
