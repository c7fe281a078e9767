//! The polynomials appearing in the Gumbel and Joe copula densities.
//!
//! Both are evaluated from log x. Joe's polynomial has positive coefficients
//! and one stable route; Gumbel's requires several methods whose validity
//! regions differ, dispatched by `PolyGMethod::Default` with a fixed
//! fall-through order so results stay deterministic.

use crate::error::{Error, Result};
use crate::numerics::{
    lchoose, lfactorial, lgamma, lssum, lsum, poisson_log_cdf, stirling1, stirling2, LogValue,
    STIRLING_BOUND,
};

/// Evaluation strategy for the Gumbel polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyGMethod {
    /// Coefficients from the binomial representation through the signed
    /// log-sum, then one positive log-sum over powers of x.
    DssibLog,
    /// Poisson-CDF representation, summed directly.
    PoisDirect,
    /// Poisson-CDF representation through the signed log-sum.
    Pois,
    /// Stirling-number representation with Horner evaluation in -x, in
    /// ordinary arithmetic. Fails by overflow for large d.
    Stirling,
    /// Dispatch with fall-through: DssibLog for α ≥ 0.5 or d ≤ 30,
    /// PoisDirect otherwise; on failure continue down the fixed order
    /// DssibLog → PoisDirect → Pois → Stirling.
    Default,
}

impl PolyGMethod {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "dssib-log" => Ok(Self::DssibLog),
            "pois-direct" => Ok(Self::PoisDirect),
            "pois" => Ok(Self::Pois),
            "stirling" => Ok(Self::Stirling),
            "default" => Ok(Self::Default),
            other => Err(Error::InvalidArgument(format!(
                "unknown polyG method '{other}'"
            ))),
        }
    }
}

/// Cancellation budget for the signed coefficient sums: e-folds between the
/// largest term and the result beyond which the result's digits cannot be
/// trusted to the cross-method agreement tolerance.
const COEFF_CANCEL_MAX: f64 = 10.5;

/// Result-adaptive cancellation budget for a signed sum whose per-term
/// relative noise is `noise_scale` ulps and whose log-result is `log_r`:
/// the depth beyond which the log cannot be accurate to 1e-9 relative.
fn cancel_budget(noise_scale: f64, log_r: f64) -> f64 {
    (1e-9 * log_r.abs().max(1.0) / (noise_scale.max(2.0) * f64::EPSILON)).ln()
}

fn check_poly_args(alpha: f64, d: usize) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!(
            "polynomial needs alpha in (0,1], got {alpha}"
        )));
    }
    if d == 0 {
        return Err(Error::InvalidArgument("polynomial needs d >= 1".into()));
    }
    if d > STIRLING_BOUND {
        return Err(Error::Capacity {
            requested: d,
            bound: STIRLING_BOUND,
        });
    }
    Ok(())
}

/// Precomputed pieces of P^G_{d,α} that do not depend on the evaluation
/// point: the signed falling-factorial logs of the Poisson representation
/// and, when the signed log-sum succeeds, the coefficient logs of the
/// binomial representation.
#[derive(Clone, Debug)]
pub(crate) struct PolyGCache {
    alpha: f64,
    d: usize,
    /// log |(αj)_d| for j = 1..=d (index j-1).
    log_abs_ffact: Vec<f64>,
    /// s_j: the sign of (αj)_d (-1)^{d-j}; zero exactly when αj is a
    /// positive integer other than the (α = 1, j = d) corner.
    sign_ffact: Vec<i8>,
    /// log a^G_{dk} for k = 1..=d (index k-1), when computable.
    dssib_coeffs: Option<Vec<f64>>,
}

impl PolyGCache {
    pub(crate) fn new(alpha: f64, d: usize) -> Result<Self> {
        check_poly_args(alpha, d)?;
        let mut log_abs_ffact = Vec::with_capacity(d);
        let mut sign_ffact = Vec::with_capacity(d);
        for j in 1..=d {
            let aj = alpha * j as f64;
            let integer_aj = aj.fract() == 0.0;
            if integer_aj && !(alpha == 1.0 && j == d) {
                // a factor of the falling factorial is exactly zero
                log_abs_ffact.push(f64::NEG_INFINITY);
                sign_ffact.push(0);
                continue;
            }
            let mut logabs = 0.0;
            for l in 0..d {
                logabs += (aj - l as f64).abs().ln();
            }
            log_abs_ffact.push(logabs);
            let sign = if alpha == 1.0 && j == d {
                1
            } else {
                let excess = j as i64 - aj.ceil() as i64;
                if excess % 2 == 0 {
                    1
                } else {
                    -1
                }
            };
            sign_ffact.push(sign);
        }

        let dssib_coeffs = Self::binomial_coeff_logs(alpha, d, &log_abs_ffact, &sign_ffact);
        Ok(PolyGCache {
            alpha,
            d,
            log_abs_ffact,
            sign_ffact,
            dssib_coeffs,
        })
    }

    /// log a^G_{dk} = log(d!/k!) + log Σ_j C(k,j) binom(αj, d) (-1)^{d-j};
    /// None when cancellation defeats the signed log-sum for some k.
    fn binomial_coeff_logs(
        alpha: f64,
        d: usize,
        log_abs_ffact: &[f64],
        sign_ffact: &[i8],
    ) -> Option<Vec<f64>> {
        let _ = alpha;
        let lfact_d = lfactorial(d);
        let mut coeffs = Vec::with_capacity(d);
        let mut b = Vec::with_capacity(d);
        let mut s = Vec::with_capacity(d);
        for k in 1..=d {
            b.clear();
            s.clear();
            for j in 1..=k {
                if sign_ffact[j - 1] == 0 {
                    continue;
                }
                b.push(LogValue::from_log(
                    lchoose(k, j) + log_abs_ffact[j - 1] - lfact_d,
                ));
                s.push(sign_ffact[j - 1]);
            }
            if b.is_empty() {
                // a true zero coefficient (α = 1, k < d)
                coeffs.push(f64::NEG_INFINITY);
                continue;
            }
            let b_max = b.iter().map(|v| v.log()).fold(f64::NEG_INFINITY, f64::max);
            match lssum(&b, &s, false) {
                // reject coefficients whose signed sum cancelled away more
                // digits than double precision can back up
                Ok(v) if b_max - v.log() <= COEFF_CANCEL_MAX => {
                    coeffs.push(lfact_d - lfactorial(k) + v.log())
                }
                _ => return None,
            }
        }
        Some(coeffs)
    }

    fn eval_dssib_log(&self, logx: f64) -> Result<LogValue> {
        let coeffs = self.dssib_coeffs.as_ref().ok_or(Error::MethodFailure {
            method: "dssib-log",
            reason: "coefficient cancellation".into(),
        })?;
        let terms: Vec<LogValue> = coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| LogValue::from_log(c + (i + 1) as f64 * logx))
            .collect();
        lsum(&terms)
    }

    /// Terms of the Poisson representation at x = e^{logx}.
    fn pois_terms(&self, logx: f64) -> Result<(Vec<LogValue>, Vec<i8>)> {
        let x = logx.exp();
        if !x.is_finite() || x > 1e15 {
            // the +x / -x cancellation in the exponents loses all accuracy
            return Err(Error::MethodFailure {
                method: "pois",
                reason: format!("x = {x} too large"),
            });
        }
        let mut b = Vec::with_capacity(self.d);
        let mut s = Vec::with_capacity(self.d);
        for j in 1..=self.d {
            if self.sign_ffact[j - 1] == 0 {
                continue;
            }
            let t = self.log_abs_ffact[j - 1] + j as f64 * logx + x - lfactorial(j)
                + poisson_log_cdf(self.d - j, x)?;
            b.push(LogValue::from_log(t));
            s.push(self.sign_ffact[j - 1]);
        }
        Ok((b, s))
    }

    fn eval_pois(&self, logx: f64, direct: bool) -> Result<LogValue> {
        let (b, s) = self.pois_terms(logx)?;
        let b_max = b.iter().map(|v| v.log()).fold(f64::NEG_INFINITY, f64::max);
        let result = if direct {
            let sum: f64 = b
                .iter()
                .zip(&s)
                .map(|(v, &sg)| f64::from(sg) * (v.log() - b_max).exp())
                .sum();
            if sum > 0.0 && sum.is_finite() {
                LogValue::from_log(b_max + sum.ln())
            } else {
                return Err(Error::MethodFailure {
                    method: "pois-direct",
                    reason: format!("non-positive sum {sum}"),
                });
            }
        } else {
            lssum(&b, &s, false).map_err(|e| Error::MethodFailure {
                method: "pois",
                reason: e.to_string(),
            })?
        };
        let depth = b_max - result.log();
        // the +x in every exponent contributes x ulps of term noise
        if depth > cancel_budget(b.len() as f64 + logx.exp(), result.log()) {
            return Err(Error::MethodFailure {
                method: if direct { "pois-direct" } else { "pois" },
                reason: format!("cancellation depth {depth:.1}"),
            });
        }
        Ok(result)
    }

    /// Direct evaluation of the Stirling representation in ordinary
    /// arithmetic; the inner polynomial in -x goes through Horner's scheme.
    fn eval_stirling(&self, logx: f64) -> Result<LogValue> {
        let x = logx.exp();
        let log_alpha = self.alpha.ln();
        let mut outer = 0.0f64;
        let mut log_peak = f64::NEG_INFINITY;
        let mut alpha_pow = 1.0f64;
        for j in 1..=self.d {
            alpha_pow *= self.alpha;
            let s1 = stirling1(self.d, j)?;
            let s_dj = f64::from(s1.sign) * s1.logabs.exp();
            let mut h = stirling2(j, j)?.log().exp();
            for k in (0..j - 1).rev() {
                h = h * (-x) + stirling2(j, k + 1)?.log().exp();
            }
            outer += s_dj * h * alpha_pow;
            // largest monomial S(j,m+1) x^m contributing through this j-term
            for m in 0..j {
                log_peak = log_peak.max(
                    stirling2(j, m + 1)?.log() + m as f64 * logx + s1.logabs
                        + j as f64 * log_alpha,
                );
            }
        }
        let sign = if self.d % 2 == 1 { 1.0 } else { -1.0 };
        let p = sign * x * outer;
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::MethodFailure {
                method: "stirling",
                reason: format!("value {p} not a positive finite number"),
            });
        }
        let depth = log_peak - outer.abs().ln();
        // Stirling values reconstructed from log tables carry hundreds of
        // ulps of relative noise each
        if depth > cancel_budget(self.d as f64 * 1000.0, p.ln()) {
            return Err(Error::MethodFailure {
                method: "stirling",
                reason: format!("cancellation depth {depth:.1}"),
            });
        }
        Ok(LogValue::from_log(p.ln()))
    }

    pub(crate) fn eval(&self, logx: f64, method: PolyGMethod) -> Result<LogValue> {
        match method {
            PolyGMethod::DssibLog => self.eval_dssib_log(logx),
            PolyGMethod::PoisDirect => self.eval_pois(logx, true),
            PolyGMethod::Pois => self.eval_pois(logx, false),
            PolyGMethod::Stirling => self.eval_stirling(logx),
            PolyGMethod::Default => {
                let chain = [
                    PolyGMethod::DssibLog,
                    PolyGMethod::PoisDirect,
                    PolyGMethod::Pois,
                    PolyGMethod::Stirling,
                ];
                let start = if self.alpha >= 0.5 || self.d <= 30 { 0 } else { 1 };
                let mut last = None;
                for &m in &chain[start..] {
                    match self.eval(logx, m) {
                        Ok(v) => return Ok(v),
                        Err(e) => last = Some(e),
                    }
                }
                Err(last.expect("chain is non-empty"))
            }
        }
    }
}

/// log P^G_{d,α}(x) from log x.
///
/// P^G_{d,α}(x) = Σ_{k=1}^d a^G_{dk}(α) x^k with positive coefficients; the
/// individual methods may still fail from internal cancellation, which is
/// reported so a caller can fall through to another strategy.
pub fn poly_g(logx: LogValue, alpha: f64, d: usize, method: PolyGMethod) -> Result<LogValue> {
    PolyGCache::new(alpha, d)?.eval(logx.log(), method)
}


/// log a^J_{dk} = log S(d,k+1) + log (k-α)_k for k = 0..d-1, with the
/// falling factorial via lgamma(k+1-α) − lgamma(1-α).
pub(crate) fn poly_j_coeff_logs(alpha: f64, d: usize) -> Result<Vec<f64>> {
    check_poly_args(alpha, d)?;
    let lg1ma = lgamma(1.0 - alpha);
    (0..d)
        .map(|k| {
            let s = stirling2(d, k + 1)?;
            if k == 0 {
                return Ok(s.log()); // empty falling factorial
            }
            if alpha == 1.0 {
                return Ok(f64::NEG_INFINITY); // (k-1)_k contains a zero factor
            }
            Ok(s.log() + lgamma(k as f64 + 1.0 - alpha) - lg1ma)
        })
        .collect()
}

pub(crate) fn poly_j_eval(coeff_logs: &[f64], logx: f64) -> Result<LogValue> {
    let terms: Vec<LogValue> = coeff_logs
        .iter()
        .enumerate()
        .map(|(k, &c)| LogValue::from_log(c + k as f64 * logx))
        .collect();
    lsum(&terms)
}

/// log P^J_{d,α}(x) from log x; all coefficients are positive, so a single
/// positive log-sum suffices.
pub fn poly_j(logx: LogValue, alpha: f64, d: usize) -> Result<LogValue> {
    poly_j_eval(&poly_j_coeff_logs(alpha, d)?, logx.log())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(x: f64) -> LogValue {
        LogValue::from_log(x)
    }

    #[test]
    fn poly_g_single_coefficient() {
        // d = 1: P = α x
        for &alpha in &[0.2, 0.5, 0.9, 1.0] {
            let r = poly_g(lv(0.7), alpha, 1, PolyGMethod::Default).unwrap();
            assert!((r.log() - (alpha.ln() + 0.7)).abs() < 1e-12);
        }
    }

    #[test]
    fn poly_g_d2_unrolled() {
        // coefficients a21 = α - α², a22 = α²
        let alpha = 0.5f64;
        let x = 1.0f64;
        let expect = ((alpha - alpha * alpha) * x + alpha * alpha * x * x).ln();
        for m in [
            PolyGMethod::DssibLog,
            PolyGMethod::PoisDirect,
            PolyGMethod::Pois,
            PolyGMethod::Stirling,
        ] {
            let r = poly_g(lv(0.0), alpha, 2, m).unwrap();
            assert!((r.log() - expect).abs() < 1e-10, "method {m:?}");
        }
    }

    #[test]
    fn poly_g_alpha_one_collapses_to_monomial() {
        // α = 1: P(x) = x^d
        for &d in &[1usize, 3, 7, 40] {
            let r = poly_g(lv(2.5), 1.0, d, PolyGMethod::Default).unwrap();
            assert!((r.log() - d as f64 * 2.5).abs() < 1e-9, "d = {d}");
        }
    }

    #[test]
    fn poly_g_methods_agree_small() {
        for &d in &[2usize, 5, 10] {
            for &alpha in &[0.1, 0.4, 0.6, 0.95] {
                for &logx in &[-3.0, 0.0, 2.0] {
                    let values: Vec<f64> = [
                        PolyGMethod::DssibLog,
                        PolyGMethod::PoisDirect,
                        PolyGMethod::Pois,
                        PolyGMethod::Stirling,
                    ]
                    .iter()
                    .filter_map(|&m| poly_g(lv(logx), alpha, d, m).ok().map(|v| v.log()))
                    .collect();
                    assert!(
                        values.len() >= 2,
                        "d={d} alpha={alpha} logx={logx}: too few successes"
                    );
                    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
                    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    assert!(
                        hi - lo < 1e-8 * hi.abs().max(1.0),
                        "d={d} alpha={alpha} logx={logx}: spread {}",
                        hi - lo
                    );
                }
            }
        }
    }

    #[test]
    fn poly_j_base_cases() {
        // d = 1: P = 1
        let r = poly_j(lv(1.3), 0.5, 1).unwrap();
        assert!(r.log().abs() < 1e-14);
        // d = 2, α = 0.5, x = 2: P = 1 + (1-α) x = 2
        let r = poly_j(lv(2f64.ln()), 0.5, 2).unwrap();
        assert!((r.log() - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn poly_j_monotone_in_logx_and_dominates_terms() {
        let alpha = 0.3;
        let d = 12;
        let coeffs = poly_j_coeff_logs(alpha, d).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for i in -20..=20 {
            let logx = i as f64 / 2.0;
            let v = poly_j(lv(logx), alpha, d).unwrap().log();
            assert!(v > prev);
            prev = v;
            let max_term = coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| c + k as f64 * logx)
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(v >= max_term);
        }
    }

    #[test]
    fn capacity_and_domain_errors() {
        assert!(poly_g(lv(0.0), 0.5, STIRLING_BOUND + 1, PolyGMethod::Default).is_err());
        assert!(poly_g(lv(0.0), 1.5, 3, PolyGMethod::Default).is_err());
        assert!(poly_j(lv(0.0), 0.0, 3).is_err());
    }
}
