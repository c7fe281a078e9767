//! The uniformity transform for Archimedean samples, the Kendall
//! distribution function, and the two univariate reductions with their
//! goodness-of-fit distances.
//!
//! With the correct parameter, the transformed matrix is uniform on the unit
//! cube, Yⁿ follows a χ² law and Yˡ a Γ law; the minimum-distance estimators
//! search the parameter that makes the observed reductions look that way.

use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::families::{log_dpsi, log_psi_inv, psi, psi_inv, FamilySpec};
use crate::numerics::{
    chi2_cdf, gamma_cdf, lfactorial, lsum, norm_quantile, LogValue,
};

/// Clamp for Φ⁻¹ inputs so a component rounded to 0 or 1 cannot poison the
/// reductions with infinities.
const QUANTILE_EPS: f64 = 1e-15;

/// Transformed sample plus the univariate reductions.
#[derive(Clone, Debug)]
pub struct TransformOutput {
    /// n×d′ matrix in [0,1]; d′ = d−1, or d when K is included.
    pub uprime: DataMatrix,
    pub include_k: bool,
    /// Σ_j Φ⁻¹(U′_j)², on the χ²_{d′} scale under the correct parameter.
    pub y_n: Vec<f64>,
    /// Σ_j −log U′_j, on the Γ(d′,1) scale under the correct parameter.
    pub y_l: Vec<f64>,
}

impl TransformOutput {
    pub fn dprime(&self) -> usize {
        self.uprime.ncols()
    }
}

/// Kendall distribution function K(t) = P(C(U) ≤ t):
/// Σ_{k<d} ψ^{(k)}(ψ⁻¹(t)) (−ψ⁻¹(t))^k / k!, all terms positive.
pub fn kendall_k(spec: &FamilySpec, d: usize, t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain(format!(
            "kendall_k needs t in (0,1), got {t}"
        )));
    }
    if d == 0 {
        return Err(Error::InvalidArgument("kendall_k needs d >= 1".into()));
    }
    if d == 1 {
        return Ok(t);
    }
    let y = psi_inv(spec, t)?;
    let log_y = log_psi_inv(spec, t);
    let terms: Vec<LogValue> = (0..d)
        .map(|k| {
            Ok(LogValue::from_log(
                log_dpsi(spec, k, y)?.log() + k as f64 * log_y - lfactorial(k),
            ))
        })
        .collect::<Result<_>>()?;
    Ok(lsum(&terms)?.log().exp().min(1.0))
}

/// The uniformity transform of one row, in log space: U′_j is the j-th
/// power of the ratio of prefix sums of ψ⁻¹(U_k); with `include_k` the last
/// component K(C(u)) is appended.
pub fn hh_transform(
    spec: &FamilySpec,
    data: &DataMatrix,
    include_k: bool,
) -> Result<TransformOutput> {
    let n = data.nrows();
    let d = data.ncols();
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "transform needs d >= 2, got {d}"
        )));
    }
    let dprime = if include_k { d } else { d - 1 };
    let mut out = Vec::with_capacity(n * dprime);
    let mut y_n = Vec::with_capacity(n);
    let mut y_l = Vec::with_capacity(n);

    for (i, row) in data.rows().enumerate() {
        for (j, &u) in row.iter().enumerate() {
            if !(u > 0.0 && u < 1.0) {
                return Err(Error::DegenerateRow {
                    row: i,
                    col: j,
                    value: u,
                });
            }
        }
        // prefix log-sums of ψ⁻¹(u_k)
        let mut yn_i = 0.0;
        let mut yl_i = 0.0;
        let mut prev = LogValue::from_log(log_psi_inv(spec, row[0]));
        let push = |uprime: f64, yn_i: &mut f64, yl_i: &mut f64| {
            let v = uprime.clamp(0.0, 1.0);
            let clamped = v.clamp(QUANTILE_EPS, 1.0 - QUANTILE_EPS);
            let z = norm_quantile(clamped).expect("clamped into (0,1)");
            *yn_i += z * z;
            *yl_i -= clamped.ln();
            v
        };
        for j in 1..d {
            let lpsiinv = LogValue::from_log(log_psi_inv(spec, row[j]));
            let next = lsum(&[prev, lpsiinv])?;
            // U'_j = exp(j (L_j − L_{j+1}))
            let v = (j as f64 * (prev.log() - next.log())).exp();
            out.push(push(v, &mut yn_i, &mut yl_i));
            prev = next;
        }
        if include_k {
            let c = psi(spec, prev.log().exp())?;
            let c = c.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0);
            let v = kendall_k(spec, d, c)?;
            out.push(push(v, &mut yn_i, &mut yl_i));
        }
        y_n.push(yn_i);
        y_l.push(yl_i);
    }
    Ok(TransformOutput {
        uprime: DataMatrix::from_vec(n, dprime, out)?,
        include_k,
        y_n,
        y_l,
    })
}

/// Reference law for the distance statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RefCdf {
    /// χ² with d′ degrees of freedom (the normal-quantile reduction).
    ChiSquared(usize),
    /// Γ(d′, 1) (the logarithmic reduction).
    Gamma(usize),
}

impl RefCdf {
    pub fn eval(self, x: f64) -> Result<f64> {
        match self {
            RefCdf::ChiSquared(d) => chi2_cdf(d, x),
            RefCdf::Gamma(d) => gamma_cdf(d as f64, x),
        }
    }
}

fn check_sorted(y: &[f64]) -> Result<()> {
    if y.is_empty() {
        return Err(Error::InvalidArgument("empty sample".into()));
    }
    if y.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument(
            "distance input must be sorted ascending".into(),
        ));
    }
    Ok(())
}

/// Cramér–von Mises distance: 1/(12n) + Σ ((2i−1)/(2n) − F(y₍ᵢ₎))².
pub fn cvm_distance(y_sorted: &[f64], ref_cdf: RefCdf) -> Result<f64> {
    check_sorted(y_sorted)?;
    let n = y_sorted.len() as f64;
    let mut acc = 1.0 / (12.0 * n);
    for (i, &y) in y_sorted.iter().enumerate() {
        let f = ref_cdf.eval(y)?;
        let q = (2.0 * (i as f64 + 1.0) - 1.0) / (2.0 * n) - f;
        acc += q * q;
    }
    Ok(acc)
}

/// Kolmogorov–Smirnov distance: maxᵢ max{F(y₍ᵢ₎) − (i−1)/n, i/n − F(y₍ᵢ₎)}.
pub fn ks_distance(y_sorted: &[f64], ref_cdf: RefCdf) -> Result<f64> {
    check_sorted(y_sorted)?;
    let n = y_sorted.len() as f64;
    let mut acc = f64::NEG_INFINITY;
    for (i, &y) in y_sorted.iter().enumerate() {
        let f = ref_cdf.eval(y)?;
        let i = i as f64;
        acc = acc.max(f - i / n).max((i + 1.0) / n - f);
    }
    Ok(acc)
}
