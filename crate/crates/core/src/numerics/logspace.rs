//! Log-scale scalars and stable (signed) log-sum-exp primitives.
//!
//! Everything downstream — generator derivatives, copula densities, the
//! Gumbel/Joe polynomials — is assembled from sums of exponentials whose
//! naive values overflow or underflow doubles long before the quantities
//! themselves become meaningless. These primitives keep all of that in log
//! space.

use crate::error::{Error, Result};

/// A nonnegative quantity stored as its natural logarithm.
///
/// `-inf` encodes log 0. `+inf` and NaN are rejected.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LogValue(f64);

impl LogValue {
    /// log 0.
    pub const ZERO: LogValue = LogValue(f64::NEG_INFINITY);
    /// log 1.
    pub const ONE: LogValue = LogValue(0.0);

    pub fn new(log: f64) -> Result<Self> {
        if log.is_nan() || log == f64::INFINITY {
            return Err(Error::Domain(format!("invalid log-scale value {log}")));
        }
        Ok(LogValue(log))
    }

    /// Wraps a value already on the log scale. Debug-checked only.
    #[inline]
    pub fn from_log(log: f64) -> Self {
        debug_assert!(
            !log.is_nan() && log != f64::INFINITY,
            "invalid log value {log}"
        );
        LogValue(log)
    }

    /// Takes the logarithm of a nonnegative value.
    #[inline]
    pub fn from_value(x: f64) -> Self {
        debug_assert!(x >= 0.0, "negative value {x} has no log");
        LogValue(x.ln())
    }

    #[inline]
    pub fn log(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0.exp()
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }
}

/// A real quantity stored as sign and log of absolute value.
///
/// Invariant: `sign == 0` iff `logabs == -inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignedLogValue {
    pub sign: i8,
    pub logabs: f64,
}

impl SignedLogValue {
    pub const ZERO: SignedLogValue = SignedLogValue {
        sign: 0,
        logabs: f64::NEG_INFINITY,
    };

    pub fn new(sign: i8, logabs: f64) -> Self {
        debug_assert!(matches!(sign, -1 | 0 | 1));
        if sign == 0 || logabs == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            SignedLogValue { sign, logabs }
        }
    }

    pub fn from_value(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            SignedLogValue {
                sign: if x > 0.0 { 1 } else { -1 },
                logabs: x.abs().ln(),
            }
        }
    }

    pub fn value(self) -> f64 {
        f64::from(self.sign) * self.logabs.exp()
    }
}

/// log(exp(a) + exp(b)) without overflow.
#[inline]
pub(crate) fn logaddexp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a >= b {
        a + (b - a).exp().ln_1p()
    } else {
        b + (a - b).exp().ln_1p()
    }
}

/// log Σ exp(bᵢ), computed as b_max + log Σ exp(bᵢ − b_max).
///
/// Returns log 0 iff every term is log 0; never overflows for finite input.
pub fn lsum(b: &[LogValue]) -> Result<LogValue> {
    if b.is_empty() {
        return Err(Error::InvalidArgument("lsum of empty sequence".into()));
    }
    let b_max = b.iter().map(|v| v.0).fold(f64::NEG_INFINITY, f64::max);
    if b_max == f64::NEG_INFINITY {
        return Ok(LogValue::ZERO);
    }
    let sum: f64 = b.iter().map(|v| (v.0 - b_max).exp()).sum();
    Ok(LogValue(b_max + sum.ln()))
}

/// log Σ sᵢ exp(bᵢ) for signs sᵢ ∈ {-1, 0, +1}, assuming the true sum is
/// positive.
///
/// Each sign group is accumulated in increasing order of b to limit
/// cancellation; pass `presorted = true` when `b` is already ascending.
/// A non-positive computed sum yields [`Error::NonPositiveSum`] carrying the
/// signed-log residual.
pub fn lssum(b: &[LogValue], signs: &[i8], presorted: bool) -> Result<LogValue> {
    if b.is_empty() {
        return Err(Error::InvalidArgument("lssum of empty sequence".into()));
    }
    if b.len() != signs.len() {
        return Err(Error::InvalidArgument(format!(
            "lssum length mismatch: {} values, {} signs",
            b.len(),
            signs.len()
        )));
    }
    let b_max = b
        .iter()
        .zip(signs)
        .filter(|(_, &s)| s != 0)
        .map(|(v, _)| v.0)
        .fold(f64::NEG_INFINITY, f64::max);
    if b_max == f64::NEG_INFINITY {
        return Err(Error::NonPositiveSum {
            sign: 0,
            logabs: f64::NEG_INFINITY,
        });
    }

    let mut order: Vec<usize> = (0..b.len()).filter(|&i| signs[i] != 0).collect();
    if !presorted {
        order.sort_by(|&i, &j| b[i].0.partial_cmp(&b[j].0).expect("NaN in lssum input"));
    }
    let mut pos = 0.0f64;
    let mut neg = 0.0f64;
    for &i in &order {
        let t = (b[i].0 - b_max).exp();
        if signs[i] > 0 {
            pos += t;
        } else {
            neg += t;
        }
    }
    let diff = pos - neg;
    if diff > 0.0 {
        Ok(LogValue(b_max + diff.ln()))
    } else {
        Err(Error::NonPositiveSum {
            sign: if diff < 0.0 { -1 } else { 0 },
            logabs: if diff == 0.0 {
                f64::NEG_INFINITY
            } else {
                b_max + diff.abs().ln()
            },
        })
    }
}

/// log(1 − e^{−a}) for a > 0, switching formulas at a = log 2.
///
/// Below the cutoff the accurate `expm1` path is used, above it `log1p`.
pub fn log1mexp(a: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("log1mexp needs a > 0, got {a}")));
    }
    Ok(if a <= core::f64::consts::LN_2 {
        (-(-a).exp_m1()).ln()
    } else {
        (-(-a).exp()).ln_1p()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lv(x: f64) -> LogValue {
        LogValue::from_log(x)
    }

    #[test]
    fn lsum_two_units() {
        let r = lsum(&[lv(0.0), lv(0.0)]).unwrap();
        assert!((r.log() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn lsum_identity_with_zero_term() {
        let r = lsum(&[LogValue::ZERO, lv(0.0)]).unwrap();
        assert_eq!(r.log(), 0.0);
    }

    #[test]
    fn lsum_shift_above_overflow() {
        // naive exp(1000) overflows; shifted evaluation must not
        let r = lsum(&[lv(1000.0), lv(1000.0)]).unwrap();
        assert!((r.log() - (1000.0 + 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn lsum_all_zero() {
        let r = lsum(&[LogValue::ZERO, LogValue::ZERO]).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn lsum_empty_is_error() {
        assert!(lsum(&[]).is_err());
    }

    #[test]
    fn lssum_three_minus_one() {
        let r = lssum(&[lv(3f64.ln()), lv(0.0)], &[1, -1], false).unwrap();
        assert!((r.log() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn lssum_two_minus_one_plus_one() {
        let r = lssum(&[lv(2f64.ln()), lv(0.0), lv(0.0)], &[1, -1, 1], false).unwrap();
        assert!((r.log() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn lssum_zero_sum_is_domain_error() {
        match lssum(&[lv(0.0), lv(0.0)], &[1, -1], false) {
            Err(Error::NonPositiveSum { sign, .. }) => assert_eq!(sign, 0),
            other => panic!("expected NonPositiveSum, got {other:?}"),
        }
    }

    #[test]
    fn lssum_negative_sum_reports_residual() {
        match lssum(&[lv(0.0), lv(3f64.ln())], &[1, -1], false) {
            Err(Error::NonPositiveSum { sign, logabs }) => {
                assert_eq!(sign, -1);
                assert!((logabs - 2f64.ln()).abs() < 1e-14);
            }
            other => panic!("expected NonPositiveSum, got {other:?}"),
        }
    }

    #[test]
    fn log1mexp_at_cutoff() {
        let a = core::f64::consts::LN_2;
        let r = log1mexp(a).unwrap();
        assert!((r + core::f64::consts::LN_2).abs() < 1e-15);
        // continuity across the branch switch
        let lo = log1mexp(a * (1.0 - 1e-13)).unwrap();
        let hi = log1mexp(a * (1.0 + 1e-13)).unwrap();
        assert!((lo - hi).abs() < 1e-12);
    }

    #[test]
    fn log1mexp_frozen_oracle_values() {
        // expected values frozen from a 60-digit evaluation of log(1 - exp(-a))
        let r = log1mexp(1e-10).unwrap();
        assert!((r - (-23.0258509299904568401794225)).abs() < 1e-13 * 23.0);
        let r = log1mexp(50.0).unwrap();
        assert!((r - (-1.92874984796391778301752882e-22)).abs() < 1e-13 * 2e-22);
    }

    #[test]
    fn log1mexp_domain() {
        assert!(log1mexp(0.0).is_err());
        assert!(log1mexp(-1.0).is_err());
    }

    #[test]
    fn signed_log_value_invariant() {
        let z = SignedLogValue::from_value(0.0);
        assert_eq!(z.sign, 0);
        assert_eq!(z.logabs, f64::NEG_INFINITY);
        let m = SignedLogValue::from_value(-3.0);
        assert_eq!(m.sign, -1);
        assert!((m.value() + 3.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn lsum_matches_naive_when_safe(b in proptest::collection::vec(-500.0f64..500.0, 1..40)) {
            let vals: Vec<LogValue> = b.iter().map(|&x| lv(x)).collect();
            let r = lsum(&vals).unwrap().log();
            let naive: f64 = b.iter().map(|&x| x.exp()).sum::<f64>().ln();
            if naive.is_finite() {
                prop_assert!((r - naive).abs() <= 1e-13 * naive.abs().max(1.0));
            }
        }

        #[test]
        fn lsum_shift_invariance(b in proptest::collection::vec(-50.0f64..50.0, 1..20), c in -300.0f64..300.0) {
            let vals: Vec<LogValue> = b.iter().map(|&x| lv(x)).collect();
            let shifted: Vec<LogValue> = b.iter().map(|&x| lv(x + c)).collect();
            let r0 = lsum(&vals).unwrap().log();
            let r1 = lsum(&shifted).unwrap().log();
            // ulp scale of the shifted inputs, not of the (possibly
            // cancelling) result
            let scale = c.abs() + r0.abs() + 1.0;
            prop_assert!((r1 - (r0 + c)).abs() <= 4.0 * f64::EPSILON * scale);
        }

        #[test]
        fn lssum_all_positive_is_lsum(b in proptest::collection::vec(-200.0f64..200.0, 1..30)) {
            let vals: Vec<LogValue> = b.iter().map(|&x| lv(x)).collect();
            let signs = vec![1i8; b.len()];
            let r0 = lsum(&vals).unwrap().log();
            let r1 = lssum(&vals, &signs, false).unwrap().log();
            prop_assert!((r0 - r1).abs() <= 1e-13 * r0.abs().max(1.0));
        }

        #[test]
        fn log1mexp_monotone(a in 1e-6f64..100.0, h in 1e-3f64..1.0) {
            let lo = log1mexp(a).unwrap();
            let hi = log1mexp(a + h).unwrap();
            prop_assert!(hi > lo);
            prop_assert!(lo < 0.0);
        }
    }
}
