//! Exact sampling of the five families through the frailty construction
//! U_j = ψ(E_j/V), with V ~ F = LS⁻¹[ψ] and E_j i.i.d. unit exponentials.

pub mod latent;
pub mod rng;

pub use rng::{Purpose, RngStream};

use crate::data::DataMatrix;
use crate::error::Result;
use crate::families::{psi, Family, FamilySpec};

/// One draw of the latent frailty V.
#[derive(Clone, Copy, Debug)]
pub struct LatentSample {
    pub v: f64,
    pub family: Family,
    pub theta: f64,
}

/// Largest double strictly below 1.
const ONE_MINUS_EPS: f64 = 1.0 - f64::EPSILON / 2.0;

#[inline]
fn clamp_open_unit(u: f64) -> f64 {
    u.max(f64::MIN_POSITIVE).min(ONE_MINUS_EPS)
}

fn draw_v(spec: &FamilySpec, rng: &mut RngStream) -> f64 {
    let th = spec.theta();
    match spec.family() {
        Family::AliMikhailHaq => latent::geometric_draw(rng, th),
        Family::Clayton => latent::gamma_draw(rng, 1.0 / th),
        Family::Frank => latent::logarithmic_draw(rng, th),
        Family::Gumbel => {
            if th == 1.0 {
                1.0
            } else {
                latent::stable_draw(rng, 1.0 / th)
            }
        }
        Family::Joe => latent::sibuya_draw(rng, 1.0 / th),
    }
}

/// One draw from F = LS⁻¹[ψ]: Geometric for A, Gamma for C, Logarithmic for
/// F, positive stable for G, Sibuya for J. Degenerate parameters give the
/// point mass at 1.
pub fn sample_v(spec: &FamilySpec, rng: &mut RngStream) -> LatentSample {
    LatentSample {
        v: draw_v(spec, rng),
        family: spec.family(),
        theta: spec.theta(),
    }
}

/// m i.i.d. draws of V; the block the simulated likelihood averages over.
pub fn sample_v_block(spec: &FamilySpec, m: usize, rng: &mut RngStream) -> Vec<f64> {
    (0..m).map(|_| draw_v(spec, rng)).collect()
}

/// n exact samples of the d-dimensional copula. Entries lie strictly inside
/// (0,1); rows are i.i.d. At the degenerate endpoints (A: θ=0, G/J: θ=1) the
/// latent variable is bypassed and independent uniforms are emitted.
pub fn sample_copula(
    spec: &FamilySpec,
    n: usize,
    d: usize,
    rng: &mut RngStream,
) -> Result<DataMatrix> {
    let mut values = Vec::with_capacity(n * d);
    if spec.is_independence() {
        for _ in 0..n * d {
            values.push(rng.next_open01());
        }
        return DataMatrix::from_vec(n, d, values);
    }
    for _ in 0..n {
        let v = draw_v(spec, rng);
        for _ in 0..d {
            let e = rng.next_exp();
            values.push(clamp_open_unit(psi(spec, e / v)?));
        }
    }
    DataMatrix::from_vec(n, d, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::tau;

    fn spec(f: Family, th: f64) -> FamilySpec {
        FamilySpec::new(f, th).unwrap()
    }

    #[test]
    fn clayton_latent_mean() {
        // V ~ Gamma(1/θ): mean 1/θ
        let s = spec(Family::Clayton, 2.0);
        let mut rng = RngStream::new(11, 0, Purpose::Data);
        let m = 100_000;
        let block = sample_v_block(&s, m, &mut rng);
        let mean: f64 = block.iter().sum::<f64>() / m as f64;
        let se = (0.5 / m as f64).sqrt();
        assert!((mean - 0.5).abs() < 4.0 * se, "mean {mean}");
    }

    #[test]
    fn degenerate_latents_are_unit() {
        let mut rng = RngStream::new(3, 0, Purpose::Data);
        assert_eq!(sample_v(&spec(Family::Gumbel, 1.0), &mut rng).v, 1.0);
        assert_eq!(sample_v(&spec(Family::Joe, 1.0), &mut rng).v, 1.0);
    }

    #[test]
    fn empty_block() {
        let mut rng = RngStream::new(3, 0, Purpose::Data);
        assert!(sample_v_block(&spec(Family::Clayton, 1.0), 0, &mut rng).is_empty());
    }

    #[test]
    fn block_determinism() {
        let s = spec(Family::Gumbel, 2.0);
        let mut a = RngStream::new(77, 5, Purpose::Smle);
        let mut b = RngStream::new(77, 5, Purpose::Smle);
        assert_eq!(sample_v_block(&s, 1000, &mut a), sample_v_block(&s, 1000, &mut b));
    }

    #[test]
    fn copula_sample_shape_and_interior() {
        for f in Family::ALL {
            let th = match f {
                Family::AliMikhailHaq => 0.7,
                Family::Gumbel | Family::Joe => 3.0,
                _ => 2.0,
            };
            let s = spec(f, th);
            let mut rng = RngStream::new(42, 0, Purpose::Data);
            let m = sample_copula(&s, 500, 4, &mut rng).unwrap();
            assert_eq!((m.nrows(), m.ncols()), (500, 4));
            m.validate_open_unit().unwrap();
        }
    }

    #[test]
    fn sample_determinism() {
        let s = spec(Family::Frank, 3.0);
        let mut a = RngStream::new(9, 2, Purpose::Data);
        let mut b = RngStream::new(9, 2, Purpose::Data);
        let ma = sample_copula(&s, 50, 3, &mut a).unwrap();
        let mb = sample_copula(&s, 50, 3, &mut b).unwrap();
        assert_eq!(ma, mb);
    }

    #[test]
    fn pairwise_tau_consistency() {
        // sample Kendall's tau of a bivariate margin near the population value
        for f in Family::ALL {
            let tau0 = 0.25;
            let th = crate::families::tau_inv(f, tau0).unwrap();
            let s = spec(f, th);
            assert!((tau(&s).unwrap() - tau0).abs() < 1e-8);
            let mut rng = RngStream::new(2024, 1, Purpose::Data);
            let n = 4000;
            let m = sample_copula(&s, n, 2, &mut rng).unwrap();
            let x = m.column(0);
            let y = m.column(1);
            // O(n log n) sample tau lives in the estimators module; use the
            // plain quadratic count here as an independent check
            let mut conc = 0i64;
            for i in 0..n {
                for j in (i + 1)..n {
                    let s1 = (x[i] - x[j]).signum() * (y[i] - y[j]).signum();
                    conc += s1 as i64;
                }
            }
            let tau_hat = conc as f64 / (n as f64 * (n as f64 - 1.0) / 2.0);
            // asymptotic SE of tau-hat is about sqrt(2(2n+5)/(9n(n-1)))
            let se = (2.0 * (2.0 * n as f64 + 5.0) / (9.0 * n as f64 * (n as f64 - 1.0))).sqrt();
            assert!(
                (tau_hat - tau0).abs() < 5.0 * se,
                "{f}: tau_hat {tau_hat} vs {tau0}"
            );
        }
    }
}
