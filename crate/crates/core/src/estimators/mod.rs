//! The estimation methods: pairwise Kendall's tau inversions, Blomqvist's
//! beta inversion, four minimum-distance estimators on the uniformity
//! transform, maximum likelihood, simulated maximum likelihood, and the
//! diagonal maximum-likelihood estimator.
//!
//! Every method returns an [`EstimateResult`]; numerical breakdowns surface
//! as `converged = false` with the best iterate (or a boundary fallback),
//! never as a silent discard.

pub mod rank;

pub use rank::{pobs, sample_tau};

use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::families::{
    beta_inv, log_diag_density, log_density, log_neg_dpsi_inv, psi_inv, tau_inv, DensityContext,
    Family, FamilySpec, Reparam,
};
use crate::numerics::brent_min;
use crate::sampling::{sample_v_block, RngStream};
use crate::transform::{cvm_distance, hh_transform, ks_distance, RefCdf};

/// Estimation method tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    TauTauBar,
    TauThetaBar,
    Beta,
    MdeChiCvm,
    MdeChiKs,
    MdeGammaCvm,
    MdeGammaKs,
    Mle,
    Smle,
    Dmle,
}

impl Method {
    pub const ALL: [Method; 10] = [
        Method::TauTauBar,
        Method::TauThetaBar,
        Method::Beta,
        Method::MdeChiCvm,
        Method::MdeChiKs,
        Method::MdeGammaCvm,
        Method::MdeGammaKs,
        Method::Mle,
        Method::Smle,
        Method::Dmle,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Method::TauTauBar => "tau-tau-bar",
            Method::TauThetaBar => "tau-theta-bar",
            Method::Beta => "beta",
            Method::MdeChiCvm => "mde-chi-cvm",
            Method::MdeChiKs => "mde-chi-ks",
            Method::MdeGammaCvm => "mde-gamma-cvm",
            Method::MdeGammaKs => "mde-gamma-ks",
            Method::Mle => "mle",
            Method::Smle => "smle",
            Method::Dmle => "dmle",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.tag() == s)
            .ok_or_else(|| {
                let known: Vec<&str> = Method::ALL.iter().map(|m| m.tag()).collect();
                Error::InvalidArgument(format!(
                    "unknown method '{s}', expected one of {}",
                    known.join(", ")
                ))
            })
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.tag())
    }
}

/// What to do when an averaged tau estimate falls outside the attainable
/// range: clamp to the boundary and flag, or refuse with a range error.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TauClampPolicy {
    #[default]
    ClampFlag,
    Error,
}

/// Knobs shared by all estimators.
#[derive(Clone, Debug)]
pub struct EstimatorConfig {
    /// Latent block size for the simulated likelihood.
    pub smle_m: usize,
    /// Include the Kendall component in the uniformity transform;
    /// None picks the dimension-based default (on for d <= 5).
    pub mde_include_k: Option<bool>,
    pub tau_clamp_policy: TauClampPolicy,
    /// Argument tolerance for the reparameterized optimizers.
    pub optimizer_tol: f64,
    /// Widened tolerance for the noisy simulated-likelihood objective.
    pub smle_optimizer_tol: f64,
    /// Kendall's tau range from which initial parameter intervals derive.
    pub tau_range: (f64, f64),
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            smle_m: 10_000,
            mde_include_k: None,
            tau_clamp_policy: TauClampPolicy::ClampFlag,
            optimizer_tol: 1e-9,
            smle_optimizer_tol: 1e-4,
            tau_range: (0.001, 0.999),
        }
    }
}

impl EstimatorConfig {
    pub fn include_k_for(&self, d: usize) -> bool {
        self.mde_include_k.unwrap_or(d <= 5)
    }
}

/// Outcome of one estimator run.
#[derive(Clone, Copy, Debug)]
pub struct EstimateResult {
    pub method: Method,
    pub theta_hat: f64,
    pub converged: bool,
    pub clamped: bool,
    /// Maximized log-likelihood for the likelihood methods, minimized
    /// distance for the MDEs, NaN where meaningless.
    pub objective: f64,
    /// Thread CPU seconds spent inside the estimator call.
    pub user_time: f64,
    /// Number of objective evaluations (or pairwise statistics computed).
    pub evals: usize,
}

#[cfg(unix)]
fn thread_cpu_time() -> f64 {
    let mut ts = libc::timespec {
        tv_sec: 0,
        tv_nsec: 0,
    };
    let rc = unsafe { libc::clock_gettime(libc::CLOCK_THREAD_CPUTIME_ID, &mut ts) };
    if rc == 0 {
        ts.tv_sec as f64 + ts.tv_nsec as f64 * 1e-9
    } else {
        0.0
    }
}

#[cfg(not(unix))]
fn thread_cpu_time() -> f64 {
    use std::time::Instant;
    use std::sync::OnceLock;
    static START: OnceLock<Instant> = OnceLock::new();
    START.get_or_init(Instant::now).elapsed().as_secs_f64()
}

/// Effective tau bounds: the configured range intersected with the family's
/// attainable range (shrunk slightly below an open upper endpoint so the
/// inverse stays finite).
fn effective_tau_bounds(family: Family, cfg: &EstimatorConfig) -> (f64, f64) {
    let (lo_att, hi_att) = family.tau_range();
    let lo = cfg.tau_range.0.max(lo_att).max(1e-6);
    let hi = cfg.tau_range.1.min(hi_att * (1.0 - 1e-3));
    (lo, hi)
}

/// Initial parameter interval [τ⁻¹(τ_lo), τ⁻¹(τ_hi)] for the optimizers.
pub fn initial_interval(family: Family, cfg: &EstimatorConfig) -> Result<(f64, f64)> {
    let (lo, hi) = effective_tau_bounds(family, cfg);
    Ok((tau_inv(family, lo)?, tau_inv(family, hi)?))
}

/// Invert one tau value, clamping to the effective bounds. An exact zero
/// inverts to the degenerate independence parameter where the family has
/// one, without being counted as a clamp.
fn invert_tau_clamped(
    family: Family,
    tau_hat: f64,
    cfg: &EstimatorConfig,
) -> Result<(f64, bool)> {
    let (lo, hi) = effective_tau_bounds(family, cfg);
    if tau_hat >= hi {
        if cfg.tau_clamp_policy == TauClampPolicy::Error && tau_hat > hi {
            return Err(Error::Range {
                what: "tau",
                value: tau_hat,
                lo,
                hi,
            });
        }
        return Ok((tau_inv(family, hi)?, tau_hat > hi));
    }
    if tau_hat <= lo {
        if tau_hat <= 0.0 && family.tau_zero_attainable() {
            let indep = family.independence_theta().expect("zero attainable");
            return Ok((indep, tau_hat < 0.0));
        }
        if cfg.tau_clamp_policy == TauClampPolicy::Error && tau_hat < lo {
            return Err(Error::Range {
                what: "tau",
                value: tau_hat,
                lo,
                hi,
            });
        }
        return Ok((tau_inv(family, lo)?, tau_hat < lo));
    }
    Ok((tau_inv(family, tau_hat)?, false))
}

fn pairwise_taus(data: &DataMatrix) -> Result<Vec<f64>> {
    let d = data.ncols();
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "pairwise tau needs d >= 2, got {d}"
        )));
    }
    let cols: Vec<Vec<f64>> = (0..d).map(|j| data.column(j)).collect();
    let mut taus = Vec::with_capacity(d * (d - 1) / 2);
    for j1 in 0..d {
        for j2 in (j1 + 1)..d {
            taus.push(sample_tau(&cols[j1], &cols[j2])?);
        }
    }
    Ok(taus)
}

/// θ̂ = τ⁻¹(mean of pairwise sample taus).
pub fn est_tau_tau_bar(
    family: Family,
    data: &DataMatrix,
    cfg: &EstimatorConfig,
) -> Result<EstimateResult> {
    let t0 = thread_cpu_time();
    let taus = pairwise_taus(data)?;
    let mean = taus.iter().sum::<f64>() / taus.len() as f64;
    let (theta_hat, clamped) = invert_tau_clamped(family, mean, cfg)?;
    Ok(EstimateResult {
        method: Method::TauTauBar,
        theta_hat,
        converged: true,
        clamped,
        objective: f64::NAN,
        user_time: thread_cpu_time() - t0,
        evals: taus.len(),
    })
}

/// θ̂ = mean of the pairwise inversions τ⁻¹(τ̂_{j1 j2}).
pub fn est_tau_theta_bar(
    family: Family,
    data: &DataMatrix,
    cfg: &EstimatorConfig,
) -> Result<EstimateResult> {
    let t0 = thread_cpu_time();
    let taus = pairwise_taus(data)?;
    let mut sum = 0.0;
    let mut clamped = false;
    for &t in &taus {
        let (th, cl) = invert_tau_clamped(family, t, cfg)?;
        sum += th;
        clamped |= cl;
    }
    Ok(EstimateResult {
        method: Method::TauThetaBar,
        theta_hat: sum / taus.len() as f64,
        converged: true,
        clamped,
        objective: f64::NAN,
        user_time: thread_cpu_time() - t0,
        evals: taus.len(),
    })
}

/// Sample version of the multivariate Blomqvist's beta.
pub fn sample_beta(data: &DataMatrix) -> f64 {
    let d = data.ncols();
    let mut hits = 0usize;
    for row in data.rows() {
        if row.iter().all(|&u| u <= 0.5) || row.iter().all(|&u| u > 0.5) {
            hits += 1;
        }
    }
    let mean = hits as f64 / data.nrows() as f64;
    let half_pow = 2f64.powi(1 - d as i32);
    (mean - half_pow) / (1.0 - half_pow)
}

/// θ̂ = β⁻¹(β̂). Inversion failures (the survival-sum cancellation at large
/// d) fall back to the top of the initial interval with converged = false;
/// the wild estimates this produces are part of the documented breakdown.
pub fn est_beta(family: Family, data: &DataMatrix, cfg: &EstimatorConfig) -> Result<EstimateResult> {
    let t0 = thread_cpu_time();
    let d = data.ncols();
    let beta_hat = sample_beta(data);
    let interval = initial_interval(family, cfg)?;
    let (theta_hat, converged, clamped) = match beta_inv(family, beta_hat, d, interval) {
        Ok(r) => (r.theta, true, r.clamped),
        Err(_) => (interval.1, false, true),
    };
    Ok(EstimateResult {
        method: Method::Beta,
        theta_hat,
        converged,
        clamped,
        objective: f64::NAN,
        user_time: thread_cpu_time() - t0,
        evals: 1,
    })
}

/// Minimize an objective over the reparameterized interval, tracking the
/// best iterate so optimizer failure still yields an estimate.
fn minimize_tracked<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> (f64, f64, usize, bool) {
    let mut evals = 0usize;
    let mut best_x = 0.5 * (lo + hi);
    let mut best_f = f64::INFINITY;
    let outcome = brent_min(
        |x| {
            evals += 1;
            let v = f(x);
            if v < best_f {
                best_f = v;
                best_x = x;
            }
            Ok(v)
        },
        lo,
        hi,
        tol,
    );
    match outcome {
        Ok((x, fx)) => {
            if fx <= best_f {
                (x, fx, evals, true)
            } else {
                (best_x, best_f, evals, true)
            }
        }
        Err(_) => (best_x, best_f, evals, false),
    }
}

fn boundary_flag(alpha: f64, lo: f64, hi: f64, tol: f64) -> bool {
    let eps = (hi - lo) * 1e-5 + 4.0 * tol;
    alpha - lo < eps || hi - alpha < eps
}

/// The four minimum-distance estimators, selected by `method`.
pub fn est_mde(
    family: Family,
    data: &DataMatrix,
    method: Method,
    cfg: &EstimatorConfig,
) -> Result<EstimateResult> {
    let (chi, cvm) = match method {
        Method::MdeChiCvm => (true, true),
        Method::MdeChiKs => (true, false),
        Method::MdeGammaCvm => (false, true),
        Method::MdeGammaKs => (false, false),
        other => {
            return Err(Error::InvalidArgument(format!(
                "est_mde called with non-MDE method {other}"
            )))
        }
    };
    let t0 = thread_cpu_time();
    let d = data.ncols();
    let include_k = cfg.include_k_for(d);
    let dprime = if include_k { d } else { d - 1 };
    let ref_cdf = if chi {
        RefCdf::ChiSquared(dprime)
    } else {
        RefCdf::Gamma(dprime)
    };
    let rep = Reparam::new(family);
    let (th_lo, th_hi) = initial_interval(family, cfg)?;
    let (a_lo, a_hi) = (rep.to_alpha(th_lo), rep.to_alpha(th_hi));

    let objective = |alpha: f64| -> f64 {
        let theta = rep.from_alpha(alpha);
        let Ok(spec) = FamilySpec::new(family, theta) else {
            return f64::INFINITY;
        };
        let Ok(out) = hh_transform(&spec, data, include_k) else {
            return f64::INFINITY;
        };
        let mut y = if chi { out.y_n } else { out.y_l };
        y.sort_by(|a, b| a.partial_cmp(b).expect("finite reductions"));
        let dist = if cvm {
            cvm_distance(&y, ref_cdf)
        } else {
            ks_distance(&y, ref_cdf)
        };
        dist.unwrap_or(f64::INFINITY)
    };

    let (alpha_hat, fmin, evals, converged) =
        minimize_tracked(objective, a_lo, a_hi, cfg.optimizer_tol);
    Ok(EstimateResult {
        method,
        theta_hat: rep.from_alpha(alpha_hat),
        converged: converged && fmin.is_finite(),
        clamped: boundary_flag(alpha_hat, a_lo, a_hi, cfg.optimizer_tol),
        objective: fmin,
        user_time: thread_cpu_time() - t0,
        evals,
    })
}

/// Maximum likelihood over the reparameterized parameter.
pub fn est_mle(family: Family, data: &DataMatrix, cfg: &EstimatorConfig) -> Result<EstimateResult> {
    let t0 = thread_cpu_time();
    let d = data.ncols();
    let rep = Reparam::new(family);
    let (th_lo, th_hi) = initial_interval(family, cfg)?;
    let (a_lo, a_hi) = (rep.to_alpha(th_lo), rep.to_alpha(th_hi));

    let objective = |alpha: f64| -> f64 {
        let theta = rep.from_alpha(alpha);
        let Ok(spec) = FamilySpec::new(family, theta) else {
            return f64::INFINITY;
        };
        let Ok(ctx) = DensityContext::new(spec, d) else {
            return f64::INFINITY;
        };
        let mut loglik = 0.0;
        for row in data.rows() {
            match log_density(&ctx, row) {
                Ok(v) if v.log().is_finite() => loglik += v.log(),
                _ => return f64::INFINITY,
            }
        }
        -loglik
    };

    let (alpha_hat, fmin, evals, converged) =
        minimize_tracked(objective, a_lo, a_hi, cfg.optimizer_tol);
    Ok(EstimateResult {
        method: Method::Mle,
        theta_hat: rep.from_alpha(alpha_hat),
        converged: converged && fmin.is_finite(),
        clamped: boundary_flag(alpha_hat, a_lo, a_hi, cfg.optimizer_tol),
        objective: -fmin,
        user_time: thread_cpu_time() - t0,
        evals,
    })
}

/// Simulated maximum likelihood: log((−1)^d ψ^{(d)}(t)) replaced by a
/// log-mean-exp over a latent block redrawn at every objective evaluation,
/// so the optimizer runs with a widened tolerance.
pub fn est_smle(
    family: Family,
    data: &DataMatrix,
    cfg: &EstimatorConfig,
    rng: &mut RngStream,
) -> Result<EstimateResult> {
    let t0 = thread_cpu_time();
    let d = data.ncols();
    let m = cfg.smle_m.max(1);
    let rep = Reparam::new(family);
    let (th_lo, th_hi) = initial_interval(family, cfg)?;
    let (a_lo, a_hi) = (rep.to_alpha(th_lo), rep.to_alpha(th_hi));
    let log_m = (m as f64).ln();

    let mut v_block = Vec::new();
    let mut log_v = Vec::new();
    let objective = |alpha: f64, rng: &mut RngStream| -> f64 {
        let theta = rep.from_alpha(alpha);
        let Ok(spec) = FamilySpec::new(family, theta) else {
            return f64::INFINITY;
        };
        v_block = sample_v_block(&spec, m, rng);
        log_v.clear();
        log_v.extend(v_block.iter().map(|v| v.ln()));
        let mut loglik = 0.0;
        for row in data.rows() {
            let mut t = 0.0;
            for &u in row {
                t += match psi_inv(&spec, u) {
                    Ok(v) => v,
                    Err(_) => return f64::INFINITY,
                };
                loglik += log_neg_dpsi_inv(&spec, u);
            }
            loglik += log_mean_exp_block(&v_block, &log_v, d as f64, t);
        }
        loglik -= data.nrows() as f64 * log_m;
        -loglik
    };

    let mut obj = objective;
    let (alpha_hat, fmin, evals, converged) = {
        let mut evals = 0usize;
        let mut best_x = 0.5 * (a_lo + a_hi);
        let mut best_f = f64::INFINITY;
        let outcome = brent_min(
            |x| {
                evals += 1;
                let v = obj(x, rng);
                if v < best_f {
                    best_f = v;
                    best_x = x;
                }
                Ok(v)
            },
            a_lo,
            a_hi,
            cfg.smle_optimizer_tol,
        );
        match outcome {
            Ok((x, fx)) => {
                if fx <= best_f {
                    (x, fx, evals, true)
                } else {
                    (best_x, best_f, evals, true)
                }
            }
            Err(_) => (best_x, best_f, evals, false),
        }
    };
    Ok(EstimateResult {
        method: Method::Smle,
        theta_hat: rep.from_alpha(alpha_hat),
        converged: converged && fmin.is_finite(),
        clamped: boundary_flag(alpha_hat, a_lo, a_hi, cfg.smle_optimizer_tol),
        objective: -fmin,
        user_time: thread_cpu_time() - t0,
        evals,
    })
}

/// The simulated-likelihood approximation to log((−1)^d ψ^{(d)}(t)):
/// log of the block mean of V^d e^{-Vt}.
pub fn smle_log_dpsi_approx(v_block: &[f64], d: usize, t: f64) -> f64 {
    let log_v: Vec<f64> = v_block.iter().map(|v| v.ln()).collect();
    log_mean_exp_block(v_block, &log_v, d as f64, t) - (v_block.len() as f64).ln()
}

/// log Σ_k V_k^d e^{-V_k t} over the latent block; the max is factored out
/// so the result is -inf only when every term underflows jointly.
pub(crate) fn log_mean_exp_block(v: &[f64], log_v: &[f64], d: f64, t: f64) -> f64 {
    let mut b_max = f64::NEG_INFINITY;
    for k in 0..v.len() {
        let b = d * log_v[k] - v[k] * t;
        if b > b_max {
            b_max = b;
        }
    }
    if b_max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let mut sum = 0.0;
    for k in 0..v.len() {
        let b = d * log_v[k] - v[k] * t - b_max;
        // terms below the double-precision floor of the sum are dropped
        if b > -40.0 {
            sum += b.exp();
        }
    }
    b_max + sum.ln()
}

/// Diagonal maximum likelihood: fit the univariate law of max_j U_j. For
/// Gumbel the maximizer has the closed form log d / (log n − log Σ −log Yᵢ),
/// adjusted up to the admissible range.
pub fn est_dmle(family: Family, data: &DataMatrix, cfg: &EstimatorConfig) -> Result<EstimateResult> {
    let t0 = thread_cpu_time();
    let d = data.ncols();
    let n = data.nrows();
    let y: Vec<f64> = data
        .rows()
        .map(|row| row.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
        .collect();

    if family == Family::Gumbel {
        let sum_neg_log: f64 = y.iter().map(|&v| -v.ln()).sum();
        let raw = (d as f64).ln() / ((n as f64).ln() - sum_neg_log.ln());
        let theta_hat = raw.max(1.0);
        let spec = FamilySpec::new(family, theta_hat)?;
        let objective: f64 = y
            .iter()
            .map(|&v| log_diag_density(&spec, d, v).map(|l| l.log()))
            .sum::<Result<f64>>()?;
        return Ok(EstimateResult {
            method: Method::Dmle,
            theta_hat,
            converged: true,
            clamped: raw < 1.0,
            objective,
            user_time: thread_cpu_time() - t0,
            evals: 1,
        });
    }

    let rep = Reparam::new(family);
    let (th_lo, th_hi) = initial_interval(family, cfg)?;
    let (a_lo, a_hi) = (rep.to_alpha(th_lo), rep.to_alpha(th_hi));
    let objective = |alpha: f64| -> f64 {
        let theta = rep.from_alpha(alpha);
        let Ok(spec) = FamilySpec::new(family, theta) else {
            return f64::INFINITY;
        };
        let mut loglik = 0.0;
        for &v in &y {
            match log_diag_density(&spec, d, v) {
                Ok(l) if l.log().is_finite() => loglik += l.log(),
                _ => return f64::INFINITY,
            }
        }
        -loglik
    };
    let (alpha_hat, fmin, evals, converged) =
        minimize_tracked(objective, a_lo, a_hi, cfg.optimizer_tol);
    Ok(EstimateResult {
        method: Method::Dmle,
        theta_hat: rep.from_alpha(alpha_hat),
        converged: converged && fmin.is_finite(),
        clamped: boundary_flag(alpha_hat, a_lo, a_hi, cfg.optimizer_tol),
        objective: -fmin,
        user_time: thread_cpu_time() - t0,
        evals,
    })
}

/// Run one estimator; `rng` feeds the simulated likelihood's latent blocks
/// and is untouched by every other method.
pub fn estimate(
    family: Family,
    data: &DataMatrix,
    method: Method,
    cfg: &EstimatorConfig,
    rng: &mut RngStream,
) -> Result<EstimateResult> {
    match method {
        Method::TauTauBar => est_tau_tau_bar(family, data, cfg),
        Method::TauThetaBar => est_tau_theta_bar(family, data, cfg),
        Method::Beta => est_beta(family, data, cfg),
        Method::MdeChiCvm | Method::MdeChiKs | Method::MdeGammaCvm | Method::MdeGammaKs => {
            est_mde(family, data, method, cfg)
        }
        Method::Mle => est_mle(family, data, cfg),
        Method::Smle => est_smle(family, data, cfg, rng),
        Method::Dmle => est_dmle(family, data, cfg),
    }
}
