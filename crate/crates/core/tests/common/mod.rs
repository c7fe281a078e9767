#![allow(dead_code)]

pub mod dd;

/// Critical value of the one-sample Kolmogorov–Smirnov statistic at level α:
/// the asymptotic formula sqrt(-ln(α/2)/(2n)).
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / (2.0 * n as f64)).sqrt()
}

/// One-sample KS statistic of `xs` against the uniform distribution.
pub fn ks_uniform(xs: &mut [f64]) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n = xs.len() as f64;
    let mut d = 0f64;
    for (i, &x) in xs.iter().enumerate() {
        let i = i as f64;
        d = d.max(x - i / n).max((i + 1.0) / n - x);
    }
    d
}
