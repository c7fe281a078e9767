//! The five one-parameter Archimedean families: Ali-Mikhail-Haq (A),
//! Clayton (C), Frank (F), Gumbel (G), and Joe (J).
//!
//! Generators, inverse generators, Kendall's tau and Blomqvist's beta maps,
//! parameter spaces and the optimizer reparameterizations. Derivative logs,
//! densities and the Gumbel/Joe polynomials live in the submodules.

pub mod density;
pub mod poly;

pub use density::{log_diag_density, log_dpsi, log_density, DensityContext};
pub use poly::{poly_g, poly_j, PolyGMethod};

use crate::error::{Error, Result};
use crate::numerics::{brent_root, debye1, lchoose, log1mexp, lssum, LogValue};

/// One-parameter Archimedean family tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    AliMikhailHaq,
    Clayton,
    Frank,
    Gumbel,
    Joe,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::AliMikhailHaq,
        Family::Clayton,
        Family::Frank,
        Family::Gumbel,
        Family::Joe,
    ];

    /// Single-letter tag as used on the command line.
    pub fn code(self) -> char {
        match self {
            Family::AliMikhailHaq => 'A',
            Family::Clayton => 'C',
            Family::Frank => 'F',
            Family::Gumbel => 'G',
            Family::Joe => 'J',
        }
    }

    pub fn from_code(c: char) -> Result<Self> {
        match c.to_ascii_uppercase() {
            'A' => Ok(Family::AliMikhailHaq),
            'C' => Ok(Family::Clayton),
            'F' => Ok(Family::Frank),
            'G' => Ok(Family::Gumbel),
            'J' => Ok(Family::Joe),
            other => Err(Error::InvalidArgument(format!(
                "unknown family '{other}', expected one of A, C, F, G, J"
            ))),
        }
    }

    /// Admissible parameter range, endpoints inclusive where the family
    /// degenerates to independence (A at 0, G and J at 1).
    pub fn theta_range(self) -> (f64, f64) {
        match self {
            Family::AliMikhailHaq => (0.0, 1.0),
            Family::Clayton | Family::Frank => (0.0, f64::INFINITY),
            Family::Gumbel | Family::Joe => (1.0, f64::INFINITY),
        }
    }

    fn theta_admissible(self, theta: f64) -> bool {
        if !theta.is_finite() {
            return false;
        }
        match self {
            Family::AliMikhailHaq => (0.0..1.0).contains(&theta),
            Family::Clayton | Family::Frank => theta > 0.0,
            Family::Gumbel | Family::Joe => theta >= 1.0,
        }
    }

    /// Range of attainable Kendall's tau: (0,1/3) for A, (0,1) for C and F,
    /// [0,1) for G and J.
    pub fn tau_range(self) -> (f64, f64) {
        match self {
            Family::AliMikhailHaq => (0.0, 1.0 / 3.0),
            _ => (0.0, 1.0),
        }
    }

    /// Whether tau = 0 is attained exactly, by the degenerate endpoint.
    pub fn tau_zero_attainable(self) -> bool {
        matches!(
            self,
            Family::AliMikhailHaq | Family::Gumbel | Family::Joe
        )
    }

    /// Parameter of the independence copula, where the family contains it.
    pub fn independence_theta(self) -> Option<f64> {
        match self {
            Family::AliMikhailHaq => Some(0.0),
            Family::Gumbel | Family::Joe => Some(1.0),
            _ => None,
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.code())
    }
}

/// A family together with an admissible parameter value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FamilySpec {
    family: Family,
    theta: f64,
}

impl FamilySpec {
    pub fn new(family: Family, theta: f64) -> Result<Self> {
        if !family.theta_admissible(theta) {
            let (lo, hi) = family.theta_range();
            return Err(Error::Range {
                what: "theta",
                value: theta,
                lo,
                hi,
            });
        }
        Ok(FamilySpec { family, theta })
    }

    #[inline]
    pub fn family(&self) -> Family {
        self.family
    }

    #[inline]
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// True at the degenerate endpoints that yield the independence copula.
    pub fn is_independence(&self) -> bool {
        match self.family {
            Family::AliMikhailHaq => self.theta == 0.0,
            Family::Gumbel | Family::Joe => self.theta == 1.0,
            _ => false,
        }
    }
}

/// log(e^x - 1), stable across magnitudes of x > 0.
pub(crate) fn log_expm1(x: f64) -> f64 {
    if x > core::f64::consts::LN_2 {
        // e^x - 1 = e^x (1 - e^{-x})
        x + log1mexp(x).expect("x > log 2")
    } else {
        x.exp_m1().ln()
    }
}

/// log(-log(1 - e^{-a})) for a > 0; switches to the asymptotic expansion
/// where -log1mexp underflows.
pub(crate) fn log_neg_log1mexp(a: f64) -> f64 {
    if a > 30.0 {
        // -log(1 - e^{-a}) = e^{-a} (1 + e^{-a}/2 + ...)
        let z = (-a).exp();
        -a + z / 2.0
    } else {
        (-log1mexp(a).expect("a > 0")).ln()
    }
}

/// Generator ψ(t) for t ≥ 0. Decreasing with ψ(0) = 1, ψ(∞) = 0.
pub fn psi(spec: &FamilySpec, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("psi needs t >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    let th = spec.theta;
    Ok(match spec.family {
        Family::AliMikhailHaq => {
            if th == 0.0 {
                (-t).exp()
            } else {
                // (1-θ) e^{-t} / (1 - θ e^{-t})
                let z = (-t).exp();
                (1.0 - th) * z / (1.0 - th * z)
            }
        }
        Family::Clayton => (-t.ln_1p() / th).exp(),
        Family::Frank => {
            // -log(1 - (1-e^{-θ}) e^{-t}) / θ, via the log1mexp path;
            // for huge θ the correction log1mexp(θ) rounds to -0 and ψ is 1
            let w = t - log1mexp(th).expect("theta > 0");
            if w <= 0.0 {
                1.0
            } else {
                -log1mexp(w).expect("w > 0") / th
            }
        }
        Family::Gumbel => {
            if t == 0.0 {
                1.0
            } else {
                (-(t.ln() / th).exp()).exp()
            }
        }
        Family::Joe => {
            if t == 0.0 {
                1.0
            } else {
                -(log1mexp(t).expect("t > 0") / th).exp_m1()
            }
        }
    })
}

/// Inverse generator ψ⁻¹(u) for u ∈ [0,1].
pub fn psi_inv(spec: &FamilySpec, u: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::Domain(format!("psi_inv needs u in [0,1], got {u}")));
    }
    let th = spec.theta;
    Ok(match spec.family {
        Family::AliMikhailHaq => {
            if th == 0.0 {
                -u.ln()
            } else {
                ((1.0 - th) * (1.0 - u) / u).ln_1p()
            }
        }
        Family::Clayton => (-th * u.ln()).exp_m1(),
        Family::Frank => {
            if u > 0.5 {
                // -log1p((e^{-uθ} - e^{-θ}) / expm1(-θ)), with the numerator
                // difference written e^{-θ} expm1((1-u)θ) so no digits are
                // lost as u approaches 1
                let num = (-th).exp() * ((1.0 - u) * th).exp_m1();
                -(num / (-th).exp_m1()).ln_1p()
            } else if u == 0.0 {
                f64::INFINITY
            } else {
                log1mexp(th).expect("theta > 0") - log1mexp(u * th).expect("u θ > 0")
            }
        }
        Family::Gumbel => {
            if u == 1.0 {
                0.0
            } else {
                (th * (-u.ln()).ln()).exp()
            }
        }
        Family::Joe => {
            if u == 1.0 {
                0.0
            } else {
                -log1mexp(-th * (-u).ln_1p()).expect("positive argument")
            }
        }
    })
}

/// log ψ⁻¹(u) for u ∈ (0,1), computed without underflow of ψ⁻¹ itself.
pub(crate) fn log_psi_inv(spec: &FamilySpec, u: f64) -> f64 {
    let th = spec.theta;
    match spec.family {
        Family::AliMikhailHaq => {
            if th == 0.0 {
                (-u.ln()).ln()
            } else {
                ((1.0 - th) * (1.0 - u) / u).ln_1p().ln()
            }
        }
        Family::Clayton => log_expm1(-th * u.ln()),
        Family::Frank => {
            if u * th > 700.0 {
                // ψ⁻¹ underflows linearly; -log(1+z) ≈ -z with
                // log(-z) = -uθ + log(1-e^{-(1-u)θ}) - log(1-e^{-θ})
                -u * th + log1mexp((1.0 - u) * th).expect("u < 1")
                    - log1mexp(th).expect("theta > 0")
            } else {
                psi_inv(spec, u).expect("u in (0,1)").ln()
            }
        }
        Family::Gumbel => th * (-u.ln()).ln(),
        Family::Joe => log_neg_log1mexp(-th * (-u).ln_1p()),
    }
}

/// log(−(ψ⁻¹)′(u)) for u ∈ (0,1); the building block shared by the density,
/// the diagonal density and the simulated likelihood.
pub fn log_neg_dpsi_inv(spec: &FamilySpec, u: f64) -> f64 {
    let th = spec.theta;
    match spec.family {
        Family::AliMikhailHaq => {
            if th == 0.0 {
                -u.ln()
            } else {
                (1.0 - th).ln() - u.ln() - (1.0 - th * (1.0 - u)).ln()
            }
        }
        Family::Clayton => th.ln() - (th + 1.0) * u.ln(),
        Family::Frank => th.ln() - th * u - log1mexp(th * u).expect("positive"),
        Family::Gumbel => th.ln() + (th - 1.0) * (-u.ln()).ln() - u.ln(),
        Family::Joe => {
            let l1mu = (-u).ln_1p();
            th.ln() + (th - 1.0) * l1mu - log1mexp(-th * l1mu).expect("positive")
        }
    }
}

/// Population Kendall's tau as a function of the parameter.
pub fn tau(spec: &FamilySpec) -> Result<f64> {
    if spec.is_independence() {
        return Ok(0.0);
    }
    let th = spec.theta;
    Ok(match spec.family {
        Family::AliMikhailHaq => tau_amh(th),
        Family::Clayton => th / (th + 2.0),
        Family::Frank => 1.0 + 4.0 * (debye1(th)? - 1.0) / th,
        Family::Gumbel => (th - 1.0) / th,
        Family::Joe => tau_joe(th),
    })
}

/// Hybrid evaluation of tau for the A family: the closed form loses all
/// accuracy as θ → 0, so below 1e-2 the degree-5 Taylor polynomial is used.
fn tau_amh(theta: f64) -> f64 {
    if theta <= 1e-2 {
        2.0 / 9.0
            * theta
            * (1.0
                + theta
                    * (0.25 + theta / 10.0 * (1.0 + theta * (0.5 + theta * 2.0 / 7.0))))
    } else {
        1.0 - 2.0 * (theta + (1.0 - theta) * (1.0 - theta) * (-theta).ln_1p())
            / (3.0 * theta * theta)
    }
}

/// tau for Joe's family: 1 − 4 Σ 1/(k (θk+2) (θ(k−1)+2)), summed until the
/// term falls below 1e-14 (terms decay like k⁻³).
fn tau_joe(theta: f64) -> f64 {
    const CAP: usize = 10_000_000;
    let mut sum = 0.0;
    for k in 1..=CAP {
        let k = k as f64;
        let term = 1.0 / (k * (theta * k + 2.0) * (theta * (k - 1.0) + 2.0));
        sum += term;
        if term < 1e-14 {
            break;
        }
    }
    1.0 - 4.0 * sum
}

/// Inverse of tau: closed form for C and G, numerical root finding otherwise.
pub fn tau_inv(family: Family, tau_target: f64) -> Result<f64> {
    let (lo, hi) = family.tau_range();
    let in_range = if family.tau_zero_attainable() {
        tau_target >= lo && tau_target < hi
    } else {
        tau_target > lo && tau_target < hi
    };
    if !in_range {
        return Err(Error::Range {
            what: "tau",
            value: tau_target,
            lo,
            hi,
        });
    }
    match family {
        Family::Clayton => Ok(2.0 * tau_target / (1.0 - tau_target)),
        Family::Gumbel => Ok(1.0 / (1.0 - tau_target)),
        Family::AliMikhailHaq => {
            if tau_target == 0.0 {
                return Ok(0.0);
            }
            brent_root(
                |th| Ok(tau_amh(th) - tau_target),
                1e-12,
                1.0 - 1e-12,
                1e-12,
            )
        }
        Family::Frank => {
            if tau_target == 0.0 {
                return Err(Error::Range {
                    what: "tau",
                    value: 0.0,
                    lo,
                    hi,
                });
            }
            let mut hi_th = 1.0;
            while 1.0 + 4.0 * (debye1(hi_th)? - 1.0) / hi_th < tau_target && hi_th < 1e9 {
                hi_th *= 2.0;
            }
            brent_root(
                |th| Ok(1.0 + 4.0 * (debye1(th)? - 1.0) / th - tau_target),
                1e-10,
                hi_th,
                1e-10,
            )
        }
        Family::Joe => {
            if tau_target == 0.0 {
                return Ok(1.0);
            }
            let mut hi_th = 2.0;
            while tau_joe(hi_th) < tau_target && hi_th < 1e9 {
                hi_th *= 2.0;
            }
            brent_root(|th| Ok(tau_joe(th) - tau_target), 1.0, hi_th, 1e-10)
        }
    }
}

/// Multivariate Blomqvist's beta: the copula and survival copula evaluated at
/// the componentwise median, with the alternating survival sum run through
/// the signed log-sum (terms sorted by magnitude).
///
/// For large d the cancellation in the survival sum can defeat double
/// precision; the resulting failure is surfaced, not masked.
pub fn beta(spec: &FamilySpec, d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("beta needs d >= 2, got {d}")));
    }
    if spec.is_independence() {
        return Ok(0.0);
    }
    let y = psi_inv(spec, 0.5)?;
    let c_half = psi(spec, d as f64 * y)?;
    // survival copula at (1/2,...,1/2): Σ_j C(d,j) (-1)^j ψ(j y)
    let mut b = Vec::with_capacity(d + 1);
    let mut s = Vec::with_capacity(d + 1);
    for j in 0..=d {
        let t = if j == 0 { 0.0 } else { j as f64 * y };
        let v = psi(spec, t)?;
        b.push(LogValue::from_log(lchoose(d, j) + v.ln()));
        s.push(if j % 2 == 0 { 1i8 } else { -1i8 });
    }
    let surv = lssum(&b, &s, false)?.log().exp();
    let half_pow = 2f64.powi(1 - d as i32);
    Ok((c_half + surv - half_pow) / (1.0 - half_pow))
}

/// Result of inverting beta, carrying a clamp flag.
#[derive(Clone, Copy, Debug)]
pub struct BetaInversion {
    pub theta: f64,
    pub clamped: bool,
}

/// Inverse of beta over a given parameter interval.
///
/// Out-of-range values of beta-hat are clamped to the nearest attainable
/// boundary and flagged. For families containing independence, beta-hat <= 0
/// inverts to the degenerate parameter (flagged only when strictly
/// negative, as happens in samples where both quadrant products vanish).
pub fn beta_inv(
    family: Family,
    beta_hat: f64,
    d: usize,
    interval: (f64, f64),
) -> Result<BetaInversion> {
    let (lo, hi) = interval;
    if beta_hat <= 0.0 {
        if let Some(indep) = family.independence_theta() {
            return Ok(BetaInversion {
                theta: indep,
                clamped: beta_hat < 0.0,
            });
        }
        return Ok(BetaInversion {
            theta: lo,
            clamped: true,
        });
    }
    let beta_lo = beta(&FamilySpec::new(family, lo)?, d)?;
    if beta_hat <= beta_lo {
        return Ok(BetaInversion {
            theta: lo,
            clamped: beta_hat < beta_lo,
        });
    }
    let beta_hi = beta(&FamilySpec::new(family, hi)?, d)?;
    if beta_hat >= beta_hi {
        return Ok(BetaInversion {
            theta: hi,
            clamped: beta_hat > beta_hi,
        });
    }
    let theta = brent_root(
        |th| Ok(beta(&FamilySpec::new(family, th)?, d)? - beta_hat),
        lo,
        hi,
        1e-9,
    )?;
    Ok(BetaInversion {
        theta,
        clamped: false,
    })
}

/// Optimizer reparameterization: a bijection from θ to a bounded α.
///
/// G, J: α = 1 − 1/θ; C, F: α = 2 arctan(θ)/π; A: identity.
#[derive(Clone, Copy, Debug)]
pub struct Reparam {
    family: Family,
}

impl Reparam {
    pub fn new(family: Family) -> Self {
        Reparam { family }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn to_alpha(&self, theta: f64) -> f64 {
        match self.family {
            Family::AliMikhailHaq => theta,
            Family::Clayton | Family::Frank => {
                2.0 * theta.atan() / core::f64::consts::PI
            }
            Family::Gumbel | Family::Joe => 1.0 - 1.0 / theta,
        }
    }

    pub fn from_alpha(&self, alpha: f64) -> f64 {
        match self.family {
            Family::AliMikhailHaq => alpha,
            Family::Clayton | Family::Frank => {
                (core::f64::consts::PI * alpha / 2.0).tan()
            }
            Family::Gumbel | Family::Joe => 1.0 / (1.0 - alpha),
        }
    }

    /// Image of the admissible θ range.
    pub fn alpha_range(&self) -> (f64, f64) {
        match self.family {
            Family::AliMikhailHaq => (0.0, 1.0),
            Family::Clayton | Family::Frank => (0.0, 1.0),
            Family::Gumbel | Family::Joe => (0.0, 1.0),
        }
    }
}
