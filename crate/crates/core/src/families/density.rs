//! Generator derivative logs, copula log-densities and diagonal densities.
//!
//! All products and ratios are assembled in log space. The quantity
//! log((−1)^k ψ^{(k)}(t)) is a real number for every completely monotone
//! generator, which is what makes the log-space route possible at all.

use super::poly::{poly_j_coeff_logs, poly_j_eval, PolyGCache, PolyGMethod};
use super::{log_neg_dpsi_inv, log_neg_log1mexp, log_psi_inv, psi_inv, Family, FamilySpec};
use crate::error::{Error, Result};
use crate::numerics::{log1mexp, lsum, polylog_neg, LogValue};

/// Per-(family, θ, d) constants for repeated density evaluation.
///
/// The MLE objective rebuilds one of these per parameter value; construction
/// is O(d) except for the one-off Gumbel coefficient work, which amortizes
/// over the n rows evaluated with it.
#[derive(Clone, Debug)]
pub struct DensityContext {
    spec: FamilySpec,
    d: usize,
    cache: Cache,
}

#[derive(Clone, Debug)]
enum Cache {
    Independence,
    AliMikhailHaq {
        log_const: f64, // (d+1) log(1-θ) - 2 log θ
    },
    Clayton {
        log_prod: f64, // Σ_{k<d} log(θk + 1)
    },
    Frank {
        log1me_theta: f64, // log(1 - e^{-θ})
        log_const: f64,    // (d-1)(log θ - log(1-e^{-θ}))
    },
    Gumbel {
        polyg: PolyGCache,
    },
    Joe {
        coeff_logs: Vec<f64>,
    },
}

impl DensityContext {
    pub fn new(spec: FamilySpec, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidArgument(format!(
                "density needs d >= 2, got {d}"
            )));
        }
        let th = spec.theta();
        let cache = if spec.is_independence() {
            Cache::Independence
        } else {
            match spec.family() {
                Family::AliMikhailHaq => Cache::AliMikhailHaq {
                    log_const: (d as f64 + 1.0) * (1.0 - th).ln() - 2.0 * th.ln(),
                },
                Family::Clayton => Cache::Clayton {
                    log_prod: (0..d).map(|k| (th * k as f64 + 1.0).ln()).sum(),
                },
                Family::Frank => {
                    let log1me = log1mexp(th)?;
                    Cache::Frank {
                        log1me_theta: log1me,
                        log_const: (d as f64 - 1.0) * (th.ln() - log1me),
                    }
                }
                Family::Gumbel => Cache::Gumbel {
                    polyg: PolyGCache::new(1.0 / th, d)?,
                },
                Family::Joe => Cache::Joe {
                    coeff_logs: poly_j_coeff_logs(1.0 / th, d)?,
                },
            }
        };
        Ok(DensityContext { spec, d, cache })
    }

    #[inline]
    pub fn spec(&self) -> &FamilySpec {
        &self.spec
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }
}

fn check_interior(u: &[f64], d: usize) -> Result<()> {
    if u.len() != d {
        return Err(Error::InvalidArgument(format!(
            "expected {d} components, got {}",
            u.len()
        )));
    }
    for (j, &v) in u.iter().enumerate() {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::DegenerateRow {
                row: 0,
                col: j,
                value: v,
            });
        }
    }
    Ok(())
}

/// log c_θ(u) for u in the open unit cube.
pub fn log_density(ctx: &DensityContext, u: &[f64]) -> Result<LogValue> {
    check_interior(u, ctx.d)?;
    let spec = &ctx.spec;
    let th = spec.theta();
    let d = ctx.d as f64;
    match &ctx.cache {
        Cache::Independence => Ok(LogValue::ONE),
        Cache::AliMikhailHaq { log_const } => {
            // c = (1-θ)^{d+1}/θ² · h/(Π u_j²) · Li_{-d}(h),
            // h = θ Π u_j/(1 - θ(1 - u_j))
            let mut log_h = th.ln();
            let mut sum_log_u = 0.0;
            for &uj in u {
                let lu = uj.ln();
                log_h += lu - (1.0 - th * (1.0 - uj)).ln();
                sum_log_u += lu;
            }
            let li = polylog_neg(ctx.d, LogValue::from_log(log_h))?;
            Ok(LogValue::from_log(
                log_const + log_h - 2.0 * sum_log_u + li.log(),
            ))
        }
        Cache::Clayton { log_prod } => {
            // log(1 + t) through a log-sum so ψ⁻¹ may exceed the double range
            let mut terms = Vec::with_capacity(ctx.d + 1);
            terms.push(LogValue::ONE);
            let mut sum_log_u = 0.0;
            for &uj in u {
                terms.push(LogValue::from_log(log_psi_inv(spec, uj)));
                sum_log_u += uj.ln();
            }
            let log_1pt = lsum(&terms)?.log();
            Ok(LogValue::from_log(
                log_prod - (1.0 + th) * sum_log_u - (d + 1.0 / th) * log_1pt,
            ))
        }
        Cache::Frank {
            log1me_theta,
            log_const,
        } => {
            // h = (1-e^{-θ})^{1-d} Π (1 - e^{-θ u_j})
            let mut log_h = (1.0 - d) * log1me_theta;
            let mut sum_u = 0.0;
            for &uj in u {
                log_h += log1mexp(th * uj)?;
                sum_u += uj;
            }
            let li = polylog_neg(ctx.d - 1, LogValue::from_log(log_h))?;
            Ok(LogValue::from_log(
                log_const + li.log() - th * sum_u - log_h,
            ))
        }
        Cache::Gumbel { polyg } => {
            let alpha = 1.0 / th;
            let mut terms = Vec::with_capacity(ctx.d);
            let mut sum_log_nlu = 0.0; // Σ log(-log u_j)
            let mut sum_log_u = 0.0;
            for &uj in u {
                let lnlu = (-uj.ln()).ln();
                sum_log_nlu += lnlu;
                sum_log_u += uj.ln();
                terms.push(LogValue::from_log(th * lnlu));
            }
            let log_t = lsum(&terms)?.log();
            let p = polyg.eval(alpha * log_t, PolyGMethod::Default)?;
            Ok(LogValue::from_log(
                d * th.ln() - (alpha * log_t).exp() + (th - 1.0) * sum_log_nlu
                    - d * log_t
                    - sum_log_u
                    + p.log(),
            ))
        }
        Cache::Joe { coeff_logs } => {
            let alpha = 1.0 / th;
            let mut t = 0.0;
            let mut sum_log_1mu = 0.0;
            for &uj in u {
                t += psi_inv(spec, uj)?;
                sum_log_1mu += (-uj).ln_1p();
            }
            // h = e^{-t}, x = h/(1-h): log x = -t - log(1-e^{-t})
            let log_1mh = log1mexp(t)?;
            let p = poly_j_eval(coeff_logs, -t - log_1mh)?;
            Ok(LogValue::from_log(
                (d - 1.0) * th.ln() + (th - 1.0) * sum_log_1mu - (1.0 - alpha) * log_1mh
                    + p.log(),
            ))
        }
    }
}

/// log((−1)^k ψ^{(k)}(t)) for t > 0.
///
/// Closed forms per family, obtained by factoring the explicit densities
/// through the product representation of c; k = 0 reduces to log ψ(t).
pub fn log_dpsi(spec: &FamilySpec, k: usize, t: f64) -> Result<LogValue> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("log_dpsi needs t > 0, got {t}")));
    }
    let th = spec.theta();
    if spec.is_independence() {
        // ψ = e^{-t} regardless of derivative order
        return Ok(LogValue::from_log(-t));
    }
    if k == 0 {
        return log_psi(spec, t);
    }
    Ok(match spec.family() {
        Family::AliMikhailHaq => {
            // ((1-θ)/θ) Li_{-k}(θ e^{-t})
            let li = polylog_neg(k, LogValue::from_log(th.ln() - t))?;
            LogValue::from_log((1.0 - th).ln() - th.ln() + li.log())
        }
        Family::Clayton => {
            let alpha = 1.0 / th;
            let log_prod: f64 = (0..k).map(|j| (alpha + j as f64).ln()).sum();
            LogValue::from_log(log_prod - (alpha + k as f64) * t.ln_1p())
        }
        Family::Frank => {
            // (1/θ) Li_{-(k-1)}((1-e^{-θ}) e^{-t})
            let li = polylog_neg(k - 1, LogValue::from_log(log1mexp(th)? - t))?;
            LogValue::from_log(li.log() - th.ln())
        }
        Family::Gumbel => {
            // ψ(t) P^G_{k,α}(t^α) / t^k
            let alpha = 1.0 / th;
            let log_t = t.ln();
            let p = PolyGCache::new(alpha, k)?.eval(alpha * log_t, PolyGMethod::Default)?;
            LogValue::from_log(-(alpha * log_t).exp() + p.log() - k as f64 * log_t)
        }
        Family::Joe => {
            // (1/θ)(1-e^{-t})^{α-1} e^{-t} P^J_{k,α}(e^{-t}/(1-e^{-t}))
            let alpha = 1.0 / th;
            let log_1me = log1mexp(t)?;
            let p = poly_j_eval(&poly_j_coeff_logs(alpha, k)?, -t - log_1me)?;
            LogValue::from_log((alpha - 1.0) * log_1me - t - th.ln() + p.log())
        }
    })
}

/// log ψ(t) on stable paths for each family.
fn log_psi(spec: &FamilySpec, t: f64) -> Result<LogValue> {
    let th = spec.theta();
    Ok(match spec.family() {
        Family::AliMikhailHaq => {
            LogValue::from_log((1.0 - th).ln() - t - (-th * (-t).exp()).ln_1p())
        }
        Family::Clayton => LogValue::from_log(-t.ln_1p() / th),
        Family::Frank => {
            let w = t - log1mexp(th)?;
            LogValue::from_log(log_neg_log1mexp(w) - th.ln())
        }
        Family::Gumbel => LogValue::from_log(-(t.ln() / th).exp()),
        Family::Joe => {
            let y = log1mexp(t)? / th; // (1-e^{-t})^{1/θ} = e^y, y <= 0
            if y > -1e-10 {
                // 1 - e^y ≈ -y(1 + y/2); log(-y) handled stably
                LogValue::from_log(log_neg_log1mexp(t) - th.ln() + (y / 2.0).ln_1p())
            } else {
                LogValue::from_log((-y.exp_m1()).ln())
            }
        }
    })
}

/// log δ′_θ(y): density of the copula diagonal, δ(u) = ψ(d ψ⁻¹(u)).
///
/// Works from log t = log d + log ψ⁻¹(y) throughout, so extreme parameters
/// where ψ⁻¹ underflows the double range (the large-θ Frank regime of the
/// diagonal likelihood) stay evaluable.
pub fn log_diag_density(spec: &FamilySpec, d: usize, y: f64) -> Result<LogValue> {
    if !(y > 0.0 && y < 1.0) {
        return Err(Error::Domain(format!(
            "diagonal density needs y in (0,1), got {y}"
        )));
    }
    if d == 0 {
        return Err(Error::InvalidArgument("diagonal needs d >= 1".into()));
    }
    let th = spec.theta();
    let log_t = (d as f64).ln() + log_psi_inv(spec, y);
    let t = log_t.exp();
    let log_neg_dpsi1 = if spec.is_independence() {
        -t
    } else {
        match spec.family() {
            Family::AliMikhailHaq => {
                let li = polylog_neg(1, LogValue::from_log(th.ln() - t))?;
                (1.0 - th).ln() - th.ln() + li.log()
            }
            Family::Clayton => -th.ln() - (1.0 / th + 1.0) * t.ln_1p(),
            Family::Frank => {
                // w - log θ - log(1 - e^w), w = log(1-e^{-θ}) - t
                let neg_w = t - log1mexp(th)?;
                if neg_w > 1e-300 {
                    -neg_w - th.ln() - log1mexp(neg_w)?
                } else {
                    // both t and e^{-θ} below the double floor:
                    // -w = t + e^{-θ} on the log scale
                    let log_neg_w = crate::numerics::logspace::logaddexp(log_t, -th);
                    -th.ln() - log_neg_w
                }
            }
            Family::Gumbel => {
                // ψ(t) α t^{α-1} = exp(-t^α) α t^{α-1}
                let alpha = 1.0 / th;
                -(alpha * log_t).exp() - th.ln() + (alpha - 1.0) * log_t
            }
            Family::Joe => {
                // (1/θ)(1-e^{-t})^{α-1} e^{-t}
                let alpha = 1.0 / th;
                let log_1me = if t > 1e-300 { log1mexp(t)? } else { log_t };
                (alpha - 1.0) * log_1me - t - th.ln()
            }
        }
    };
    Ok(LogValue::from_log(
        (d as f64).ln() + log_neg_dpsi1 + log_neg_dpsi_inv(spec, y),
    ))
}
