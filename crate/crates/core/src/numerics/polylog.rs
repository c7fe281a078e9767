//! Polylogarithm of negative integer order on (0,1), in log scale.
//!
//! Li_{−n}(z) = Σ_k ⟨n over k⟩ z^{n−k} / (1−z)^{n+1} with Eulerian numbers
//! ⟨n over k⟩. All terms are positive, the polynomial has exact degree n, and
//! (1 − z) is obtained through the log1mexp path, so the evaluation stays
//! accurate arbitrarily close to z = 1 where the defining power series would
//! need an unbounded number of terms.

use std::sync::OnceLock;

use super::logspace::{log1mexp, logaddexp, lsum, LogValue};
use super::stirling::STIRLING_BOUND;
use crate::error::{Error, Result};

const DIM: usize = STIRLING_BOUND + 1;

static EULERIAN_LOG: OnceLock<Vec<f64>> = OnceLock::new();

/// log ⟨n over k⟩ via ⟨n,k⟩ = (k+1)⟨n−1,k⟩ + (n−k)⟨n−1,k−1⟩.
fn eulerian_table() -> &'static [f64] {
    EULERIAN_LOG.get_or_init(|| {
        let mut t = vec![f64::NEG_INFINITY; DIM * DIM];
        t[0] = 0.0; // <0 over 0> = 1
        for n in 1..DIM {
            for k in 0..n {
                let a = ((k + 1) as f64).ln() + t[(n - 1) * DIM + k];
                let b = if k > 0 {
                    ((n - k) as f64).ln() + t[(n - 1) * DIM + k - 1]
                } else {
                    f64::NEG_INFINITY
                };
                t[n * DIM + k] = logaddexp(a, b);
            }
        }
        t
    })
}

/// log Li_{−n}(z) for z ∈ (0,1), given log z.
pub fn polylog_neg(n: usize, logz: LogValue) -> Result<LogValue> {
    let lz = logz.log();
    if !(lz < 0.0) || lz == f64::NEG_INFINITY {
        return Err(Error::Domain(format!(
            "polylog_neg needs z in (0,1), got log z = {lz}"
        )));
    }
    if n > STIRLING_BOUND {
        return Err(Error::Capacity {
            requested: n,
            bound: STIRLING_BOUND,
        });
    }
    let log_1mz = log1mexp(-lz)?;
    if n == 0 {
        // Li_0(z) = z / (1-z)
        return Ok(LogValue::from_log(lz - log_1mz));
    }
    let table = eulerian_table();
    let terms: Vec<LogValue> = (0..n)
        .map(|k| LogValue::from_log(table[n * DIM + k] + ((n - k) as f64) * lz))
        .collect();
    let num = lsum(&terms)?;
    Ok(LogValue::from_log(num.log() - ((n + 1) as f64) * log_1mz))
}
