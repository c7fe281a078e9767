//! Double-double arithmetic: ~31 significant digits from pairs of doubles.
//!
//! Test-only oracle. Used to evaluate reference formulas (the naive Frank
//! inverse generator, log(1 - e^{-a}), the diagonal density) at precision
//! far beyond f64, independently of every stable path in the library.

#[derive(Clone, Copy, Debug)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

pub const LN2: Dd = Dd {
    hi: 0.693_147_180_559_945_3,
    lo: 2.319_046_813_846_299_6e-17,
};

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (hi, lo) = quick_two_sum(s, e + self.lo + o.lo);
        Dd { hi, lo }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let (hi, lo) = quick_two_sum(p, e + self.hi * o.lo + self.lo * o.hi);
        Dd { hi, lo }
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Dd::from(q1)));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul(Dd::from(q2)));
        let q3 = r.hi / o.hi;
        let (s, e) = quick_two_sum(q1, q2);
        let (hi, lo) = quick_two_sum(s, e + q3);
        Dd { hi, lo }
    }

    pub fn scale2(self, k: i32) -> Dd {
        let f = 2f64.powi(k);
        Dd {
            hi: self.hi * f,
            lo: self.lo * f,
        }
    }

    /// exp by argument reduction against log 2 and a Taylor tail.
    pub fn exp(self) -> Dd {
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::ONE;
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        let k = (self.hi / LN2.hi).round();
        let r = self.sub(LN2.mul(Dd::from(k)));
        // Taylor on |r| <= ln2/2
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        for i in 1..40 {
            term = term.mul(r).div(Dd::from(i as f64));
            sum = sum.add(term);
            if term.hi.abs() < 1e-36 * sum.hi.abs() {
                break;
            }
        }
        sum.scale2(k as i32)
    }

    /// ln by Newton iteration on exp, seeded with the double-precision log.
    pub fn ln(self) -> Dd {
        assert!(self.hi > 0.0, "ln of non-positive Dd");
        let mut y = Dd::from(self.hi.ln());
        for _ in 0..3 {
            // y += x exp(-y) - 1
            let corr = self.mul(y.neg().exp()).sub(Dd::ONE);
            y = y.add(corr);
        }
        y
    }

    /// exp(x) - 1, accurate near zero.
    pub fn expm1(self) -> Dd {
        if self.hi.abs() < 0.3 {
            let mut term = Dd::ONE;
            let mut sum = Dd::ZERO;
            for i in 1..40 {
                term = term.mul(self).div(Dd::from(i as f64));
                sum = sum.add(term);
                if term.hi.abs() < 1e-36 * sum.hi.abs().max(1e-300) {
                    break;
                }
            }
            sum
        } else {
            self.exp().sub(Dd::ONE)
        }
    }

    /// ln(1 + x), accurate near zero via the atanh series.
    pub fn ln1p(self) -> Dd {
        if self.hi.abs() < 0.4 {
            // ln(1+x) = 2 atanh(x/(2+x))
            let t = self.div(Dd::from(2.0).add(self));
            let t2 = t.mul(t);
            let mut term = t;
            let mut sum = t;
            for i in 1..60 {
                term = term.mul(t2);
                let contrib = term.div(Dd::from((2 * i + 1) as f64));
                sum = sum.add(contrib);
                if contrib.hi.abs() < 1e-36 * sum.hi.abs().max(1e-300) {
                    break;
                }
            }
            sum.scale2(1)
        } else {
            Dd::ONE.add(self).ln()
        }
    }
}

#[cfg(test)]
mod self_checks {
    use super::*;

    #[test]
    fn dd_known_constants() {
        // e to 30 digits: 2.718281828459045235360287471353
        let e = Dd::ONE.exp();
        assert!((e.hi - 2.718281828459045).abs() < 1e-15);
        assert!((e.lo - 1.4456468917292502e-16).abs() < 1e-30);
        // ln 2
        let l2 = Dd::from(2.0).ln();
        assert!((l2.hi - LN2.hi).abs() < 1e-16);
        assert!((l2.lo - LN2.lo).abs() < 1e-30);
    }

    #[test]
    fn dd_round_trips() {
        for &x in &[0.1, 1.0, 3.5, -2.0, 20.0, -30.0] {
            let y = Dd::from(x).exp().ln();
            assert!((y.hi - x).abs() < 1e-15 * x.abs().max(1.0));
            assert!((y.hi - x + y.lo).abs() < 1e-28 * x.abs().max(1.0));
        }
    }
}
