//! Stirling numbers of both kinds, tabulated once per process in log scale.
//!
//! |s(n,k)| overflows doubles near n = 100, so the first kind is stored as
//! log|s| with the sign recovered from the parity of n − k.

use std::sync::OnceLock;

use super::logspace::{logaddexp, LogValue, SignedLogValue};
use crate::error::{Error, Result};

/// Largest admissible n and k (inclusive).
pub const STIRLING_BOUND: usize = 120;

const DIM: usize = STIRLING_BOUND + 1;

static STIRLING1_LOGABS: OnceLock<Vec<f64>> = OnceLock::new();
static STIRLING2_LOG: OnceLock<Vec<f64>> = OnceLock::new();

fn check_bound(n: usize, k: usize) -> Result<()> {
    if n > STIRLING_BOUND || k > STIRLING_BOUND {
        return Err(Error::Capacity {
            requested: n.max(k),
            bound: STIRLING_BOUND,
        });
    }
    Ok(())
}

/// log|s(n,k)| from s(n+1,k) = s(n,k-1) - n s(n,k). Both contributions to
/// |s(n+1,k)| carry the same sign, so the log recurrence is additive.
fn stirling1_table() -> &'static [f64] {
    STIRLING1_LOGABS.get_or_init(|| {
        let mut t = vec![f64::NEG_INFINITY; DIM * DIM];
        t[0] = 0.0; // |s(0,0)| = 1
        for n in 0..STIRLING_BOUND {
            for k in 1..=STIRLING_BOUND {
                let carry = t[n * DIM + k - 1];
                let scaled = (n as f64).ln() + t[n * DIM + k];
                t[(n + 1) * DIM + k] = logaddexp(carry, scaled);
            }
        }
        t
    })
}

/// log S(n,k) from S(n+1,k) = S(n,k-1) + k S(n,k); all terms positive.
fn stirling2_table() -> &'static [f64] {
    STIRLING2_LOG.get_or_init(|| {
        let mut t = vec![f64::NEG_INFINITY; DIM * DIM];
        t[0] = 0.0; // S(0,0) = 1
        for n in 0..STIRLING_BOUND {
            for k in 1..=STIRLING_BOUND {
                let carry = t[n * DIM + k - 1];
                let scaled = (k as f64).ln() + t[n * DIM + k];
                t[(n + 1) * DIM + k] = logaddexp(carry, scaled);
            }
        }
        t
    })
}

/// Stirling number of the first kind s(n,k), as sign (−1)^{n−k} and log|s|.
pub fn stirling1(n: usize, k: usize) -> Result<SignedLogValue> {
    check_bound(n, k)?;
    let logabs = stirling1_table()[n * DIM + k];
    if logabs == f64::NEG_INFINITY {
        return Ok(SignedLogValue::ZERO);
    }
    let sign = if (n - k) % 2 == 0 { 1 } else { -1 };
    Ok(SignedLogValue::new(sign, logabs))
}

/// Stirling number of the second kind S(n,k) as a log value.
pub fn stirling2(n: usize, k: usize) -> Result<LogValue> {
    check_bound(n, k)?;
    Ok(LogValue::from_log(stirling2_table()[n * DIM + k]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_cases() {
        assert_eq!(stirling1(0, 0).unwrap().value(), 1.0);
        assert_eq!(stirling2(0, 0).unwrap().value(), 1.0);
        for n in 1..10 {
            assert_eq!(stirling1(n, 0).unwrap().sign, 0);
            assert_eq!(stirling1(0, n).unwrap().sign, 0);
            assert!(stirling2(n, 0).unwrap().is_zero());
            assert!(stirling2(0, n).unwrap().is_zero());
        }
    }

    #[test]
    fn small_values_unrolled() {
        // s(3,1) = 2, s(3,2) = -3, s(3,3) = 1; S(3,2) = 3
        let s31 = stirling1(3, 1).unwrap();
        assert_eq!(s31.sign, 1);
        assert!((s31.value() - 2.0).abs() < 1e-12);
        let s32 = stirling1(3, 2).unwrap();
        assert_eq!(s32.sign, -1);
        assert!((s32.value() + 3.0).abs() < 1e-12);
        assert!((stirling2(3, 2).unwrap().value() - 3.0).abs() < 1e-12);
        // s(4,2) = 11, S(4,2) = 7
        assert!((stirling1(4, 2).unwrap().value() - 11.0).abs() < 1e-11);
        assert!((stirling2(4, 2).unwrap().value() - 7.0).abs() < 1e-11);
    }

    #[test]
    fn second_kind_row_sums_are_bell_numbers() {
        // Bell numbers via the triangle recurrence, exact in u64 for n <= 20
        let mut bell = vec![1u64];
        let mut row = vec![1u64];
        for _ in 1..=20 {
            let mut next = vec![*row.last().unwrap()];
            for &x in &row {
                next.push(next.last().unwrap() + x);
            }
            bell.push(next[0]);
            row = next;
        }
        for n in 0..=20usize {
            let sum: f64 = (0..=n)
                .map(|k| stirling2(n, k).unwrap().value())
                .sum();
            let expect = bell[n] as f64;
            assert!(
                (sum - expect).abs() < 1e-10 * expect,
                "row {n}: {sum} vs Bell {expect}"
            );
        }
    }

    #[test]
    fn capacity_error_beyond_bound() {
        assert!(matches!(
            stirling1(STIRLING_BOUND + 1, 1),
            Err(Error::Capacity { .. })
        ));
        assert!(matches!(
            stirling2(3, STIRLING_BOUND + 1),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn large_entries_stay_finite_in_log_scale() {
        let v = stirling1(100, 50).unwrap();
        assert!(v.logabs.is_finite());
        assert!(v.logabs > 200.0);
        // near the table bound the magnitudes leave the double range
        let v = stirling1(STIRLING_BOUND, 2).unwrap();
        assert!(v.logabs.is_finite());
    }
}
