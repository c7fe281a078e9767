//! Samplers for the latent frailty laws V ~ F = LS⁻¹[ψ].
//!
//! Normal and exponential draws use inverse transforms so a stream's output
//! is a pure function of its address. Every law here must pass the
//! marginal-uniformity property of the copula sampler before acceptance.

use super::rng::RngStream;
use crate::numerics::{lgamma, norm_quantile};

/// Standard normal by inverse transform.
#[inline]
fn next_normal(rng: &mut RngStream) -> f64 {
    norm_quantile(rng.next_open01()).expect("u in (0,1)")
}

/// Gamma(shape, 1) via Marsaglia–Tsang rejection, with the power boost for
/// shape < 1.
pub fn gamma_draw(rng: &mut RngStream, shape: f64) -> f64 {
    debug_assert!(shape > 0.0);
    if shape < 1.0 {
        let boost = rng.next_open01().powf(1.0 / shape);
        return gamma_draw_ge1(rng, shape + 1.0) * boost;
    }
    gamma_draw_ge1(rng, shape)
}

fn gamma_draw_ge1(rng: &mut RngStream, shape: f64) -> f64 {
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x = next_normal(rng);
        let v = (1.0 + c * x).powi(3);
        if v <= 0.0 {
            continue;
        }
        let u = rng.next_open01();
        if u < 1.0 - 0.0331 * x.powi(4) {
            return d * v;
        }
        if u.ln() < 0.5 * x * x + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

/// Geometric on {1,2,...} with success probability 1-θ, as the floor of an
/// exponential: P(V = k) = (1-θ) θ^{k-1}.
pub fn geometric_draw(rng: &mut RngStream, theta: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&theta));
    if theta == 0.0 {
        return 1.0;
    }
    (rng.next_open01().ln() / theta.ln()).floor() + 1.0
}

/// Logarithmic(p) on {1,2,...}, P(V = k) = -p^k/(k log(1-p)), by Kemp's
/// second accelerated method. Here p = 1 - e^{-θ}, so log(1-p) = -θ exactly.
pub fn logarithmic_draw(rng: &mut RngStream, theta: f64) -> f64 {
    debug_assert!(theta > 0.0);
    let p = -(-theta).exp_m1();
    let u2 = rng.next_open01();
    if u2 > p {
        return 1.0;
    }
    let u1 = rng.next_open01();
    let q = -(u1 * -theta).exp_m1(); // 1 - (1-p)^{u1}
    if u2 < q * q {
        let k = 1.0 + u2.ln() / q.ln();
        return k.floor().max(1.0);
    }
    if u2 > q {
        1.0
    } else {
        2.0
    }
}

/// One-sided positive stable with Laplace transform exp(-t^α), 0 < α < 1:
/// the Chambers–Mallows–Stuck transform specialized to β = 1 (Kanter's
/// representation), V = (A(Θ)/W)^{(1-α)/α} with Θ ~ U(0,π), W ~ Exp(1).
pub fn stable_draw(rng: &mut RngStream, alpha: f64) -> f64 {
    debug_assert!(alpha > 0.0 && alpha < 1.0);
    let theta = core::f64::consts::PI * rng.next_open01();
    let w = rng.next_exp();
    let log_a = ((1.0 - alpha) * theta).sin().ln() + alpha / (1.0 - alpha) * (alpha * theta).sin().ln()
        - 1.0 / (1.0 - alpha) * theta.sin().ln();
    ((1.0 - alpha) / alpha * (log_a - w.ln())).exp()
}

/// Sibuya(α) on {1,2,...}, whose Laplace transform is Joe's generator:
/// the corrected inversion through the Gamma/Beta representation.
pub fn sibuya_draw(rng: &mut RngStream, alpha: f64) -> f64 {
    debug_assert!(alpha > 0.0 && alpha <= 1.0);
    if alpha >= 1.0 - 1e-12 {
        return 1.0; // point mass
    }
    let u = rng.next_open01();
    if u <= alpha {
        return 1.0;
    }
    let g_inv = ((1.0 - u) * lgamma(1.0 - alpha).exp()).powf(-1.0 / alpha);
    let f_g_inv = g_inv.floor();
    if g_inv > 1e16 {
        return f_g_inv;
    }
    // correction: compare against 1/(n B(n, 1-α)) at n = floor
    let log_b = lgamma(f_g_inv) + lgamma(1.0 - alpha) - lgamma(f_g_inv + 1.0 - alpha);
    if (1.0 - u) < (-(f_g_inv.ln() + log_b)).exp() {
        g_inv.ceil()
    } else {
        f_g_inv
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::rng::Purpose;

    fn stream(k: u64) -> RngStream {
        RngStream::new(1234, k, Purpose::Data)
    }

    #[test]
    fn gamma_moments() {
        // mean = shape, variance = shape
        for &shape in &[0.5f64, 1.5, 4.0] {
            let mut r = stream(shape.to_bits());
            let n = 200_000;
            let mut sum = 0.0;
            let mut sum2 = 0.0;
            for _ in 0..n {
                let v = gamma_draw(&mut r, shape);
                assert!(v > 0.0);
                sum += v;
                sum2 += v * v;
            }
            let mean = sum / n as f64;
            let var = sum2 / n as f64 - mean * mean;
            let se_mean = (shape / n as f64).sqrt();
            assert!((mean - shape).abs() < 5.0 * se_mean, "shape {shape}: mean {mean}");
            assert!((var - shape) / shape < 0.1, "shape {shape}: var {var}");
        }
    }

    #[test]
    fn geometric_pmf() {
        let theta = 0.6;
        let mut r = stream(7);
        let n = 200_000usize;
        let mut counts = [0usize; 8];
        for _ in 0..n {
            let v = geometric_draw(&mut r, theta) as usize;
            assert!(v >= 1);
            if v <= 8 {
                counts[v - 1] += 1;
            }
        }
        for k in 1..=5usize {
            let expect = (1.0 - theta) * theta.powi(k as i32 - 1);
            let got = counts[k - 1] as f64 / n as f64;
            let se = (expect * (1.0 - expect) / n as f64).sqrt();
            assert!((got - expect).abs() < 5.0 * se, "k={k}: {got} vs {expect}");
        }
    }

    #[test]
    fn logarithmic_pmf() {
        let theta = 1.5;
        let p = -(-theta as f64).exp_m1();
        let mut r = stream(8);
        let n = 200_000usize;
        let mut counts = [0usize; 8];
        for _ in 0..n {
            let v = logarithmic_draw(&mut r, theta) as usize;
            assert!(v >= 1);
            if v <= 8 {
                counts[v - 1] += 1;
            }
        }
        for k in 1..=5usize {
            let expect = p.powi(k as i32) / (k as f64 * theta);
            let got = counts[k - 1] as f64 / n as f64;
            let se = (expect * (1.0 - expect) / n as f64).sqrt();
            assert!((got - expect).abs() < 5.0 * se, "k={k}: {got} vs {expect}");
        }
    }

    #[test]
    fn stable_laplace_transform() {
        // E[exp(-t V)] = exp(-t^α), checked by Monte Carlo at a few t
        for &alpha in &[0.25, 0.5, 0.75] {
            let mut r = stream((alpha * 100.0) as u64);
            let n = 200_000;
            let draws: Vec<f64> = (0..n).map(|_| stable_draw(&mut r, alpha)).collect();
            for &t in &[0.3, 1.0, 3.0] {
                let mean: f64 =
                    draws.iter().map(|&v| (-t * v).exp()).sum::<f64>() / n as f64;
                let expect = (-t.powf(alpha) as f64).exp();
                let se = (expect * (1.0 - expect) / n as f64).sqrt().max(1e-6);
                assert!(
                    (mean - expect).abs() < 6.0 * se,
                    "alpha={alpha} t={t}: {mean} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn sibuya_laplace_transform() {
        // E[exp(-t V)] = 1 - (1-e^{-t})^α
        for &alpha in &[0.3, 0.5, 0.8] {
            let mut r = stream((alpha * 1000.0) as u64);
            let n = 200_000;
            let draws: Vec<f64> = (0..n).map(|_| sibuya_draw(&mut r, alpha)).collect();
            assert!(draws.iter().all(|&v| v >= 1.0 && v.fract() == 0.0));
            for &t in &[0.5, 1.0, 2.0] {
                let mean: f64 =
                    draws.iter().map(|&v| (-t * v).exp()).sum::<f64>() / n as f64;
                let expect = 1.0 - (-(-t as f64).exp_m1()).powf(alpha);
                let se = 6.0 / (n as f64).sqrt();
                assert!(
                    (mean - expect).abs() < se,
                    "alpha={alpha} t={t}: {mean} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn sibuya_point_mass_at_one() {
        let mut r = stream(3);
        for _ in 0..100 {
            assert_eq!(sibuya_draw(&mut r, 1.0), 1.0);
        }
    }
}
