//! Adaptive Gauss–Legendre quadrature.
//!
//! 15-point panels, bisected until the two-half refinement agrees with the
//! parent panel to the requested relative tolerance. Nodes are generated once
//! by Newton iteration on P₁₅, so no tabulated constants are needed.

use std::sync::OnceLock;

use crate::error::{Error, Result};

const N: usize = 15;
const MAX_DEPTH: usize = 60;

static NODES: OnceLock<([f64; N], [f64; N])> = OnceLock::new();

/// Legendre P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn gauss_legendre_nodes() -> &'static ([f64; N], [f64; N]) {
    NODES.get_or_init(|| {
        let mut xs = [0.0; N];
        let mut ws = [0.0; N];
        for i in 0..N {
            // Chebyshev-like initial guess, then Newton
            let mut x = (core::f64::consts::PI * (i as f64 + 0.75) / (N as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre(N, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(N, x);
            xs[i] = x;
            ws[i] = 2.0 / ((1.0 - x * x) * d * d);
        }
        (xs, ws)
    })
}

fn panel<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> f64 {
    let (xs, ws) = gauss_legendre_nodes();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut s = 0.0;
    for i in 0..N {
        s += ws[i] * f(mid + half * xs[i]);
    }
    s * half
}

fn refine<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> Result<f64> {
    let mid = 0.5 * (a + b);
    let left = panel(f, a, mid);
    let right = panel(f, mid, b);
    let sum = left + right;
    if !sum.is_finite() {
        return Err(Error::Evaluation { at: mid });
    }
    if (sum - whole).abs() <= tol * sum.abs().max(1e-300) || depth >= MAX_DEPTH {
        if depth >= MAX_DEPTH && (sum - whole).abs() > 1e6 * tol * sum.abs().max(1e-300) {
            return Err(Error::Convergence {
                iterations: MAX_DEPTH,
            });
        }
        return Ok(sum);
    }
    Ok(refine(f, a, mid, left, tol, depth + 1)? + refine(f, mid, b, right, tol, depth + 1)?)
}

/// ∫ₐᵇ f(t) dt to relative tolerance `rel_tol`.
pub fn adaptive_quad<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(Error::InvalidArgument(format!(
            "invalid integration range [{a}, {b}]"
        )));
    }
    let whole = panel(&mut f, a, b);
    refine(&mut f, a, b, whole, rel_tol, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = adaptive_quad(|t| t * t * t - 2.0 * t + 1.0, 0.0, 2.0, 1e-13).unwrap();
        assert!((r - 2.0).abs() < 1e-13); // t^4/4 - t^2 + t over [0,2]
    }

    #[test]
    fn exponential() {
        let r = adaptive_quad(|t| t.exp(), 0.0, 1.0, 1e-13).unwrap();
        assert!((r - (core::f64::consts::E - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn needs_refinement() {
        // sharp peak at 0.5
        let r = adaptive_quad(|t| 1.0 / (1e-4 + (t - 0.5) * (t - 0.5)), 0.0, 1.0, 1e-12).unwrap();
        let exact = 2.0 * (0.5 / 1e-2_f64).atan() / 1e-2;
        assert!(((r - exact) / exact).abs() < 1e-11);
    }
}
