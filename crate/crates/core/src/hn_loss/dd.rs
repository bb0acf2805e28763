//! Double-double arithmetic (about 106 significand bits). The gradient accumulates in it so
//! that partials which cancel to near zero stay accurate, and the finite-difference verifier
//! needs it to resolve loss differences many orders of magnitude below the loss value.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

const LN2: Dd = Dd {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    fn norm(hi: f64, lo: f64) -> Dd {
        let (hi, lo) = quick_two_sum(hi, lo);
        Dd { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn ldexp(self, k: i32) -> Dd {
        let scale = 2f64.powi(k);
        Dd {
            hi: self.hi * scale,
            lo: self.lo * scale,
        }
    }

    pub fn exp(self) -> Dd {
        if self.hi > 709.8 {
            return Dd {
                hi: f64::INFINITY,
                lo: 0.0,
            };
        }
        if self.hi < -745.2 {
            return Dd::ZERO;
        }
        let k = (self.hi / LN2.hi).round();
        // |r| <= ln2/2, then scaled down by 2^10 so the series converges quickly
        let r = (self - LN2 * k).ldexp(-10);
        let mut term = r;
        let mut s = r;
        for n in 2..30 {
            term = term * r / (n as f64);
            s = s + term;
            if term.hi.abs() < 1e-36 * s.hi.abs().max(1e-300) {
                break;
            }
        }
        // expm1(2x) = expm1(x) * (expm1(x) + 2)
        for _ in 0..10 {
            s = s * (s + 2.0);
        }
        (s + 1.0).ldexp(k as i32)
    }

    /// Natural logarithm of a positive value, by Newton refinement of the f64 estimate.
    pub fn ln(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd {
                hi: f64::NAN,
                lo: 0.0,
            };
        }
        let mut y = Dd::from(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - 1.0;
        }
        y
    }

    pub fn max_hi(a: Dd, b: Dd) -> Dd {
        if a.hi >= b.hi {
            a
        } else {
            b
        }
    }
}

impl From<f64> for Dd {
    fn from(hi: f64) -> Self {
        Dd { hi, lo: 0.0 }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, o.hi);
        let (t1, t2) = two_sum(self.lo, o.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        Dd::norm(s1, s2 + t2)
    }
}

impl Add<f64> for Dd {
    type Output = Dd;
    fn add(self, o: f64) -> Dd {
        let (s1, s2) = two_sum(self.hi, o);
        Dd::norm(s1, s2 + self.lo)
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Sub<f64> for Dd {
    type Output = Dd;
    fn sub(self, o: f64) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        Dd::norm(p, e + (self.hi * o.lo + self.lo * o.hi))
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;
    fn mul(self, o: f64) -> Dd {
        let (p, e) = two_prod(self.hi, o);
        Dd::norm(p, e + self.lo * o)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o * q1;
        let q2 = r.hi / o.hi;
        let r = r - o * q2;
        let q3 = r.hi / o.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        Dd { hi: q1, lo: q2 } + q3
    }
}

impl Div<f64> for Dd {
    type Output = Dd;
    fn div(self, o: f64) -> Dd {
        self / Dd::from(o)
    }
}

/// Exact-product dot product accumulated in double-double.
pub(crate) fn dot_dd(a: &[f64], b: &[f64]) -> Dd {
    a.iter().zip(b).fold(Dd::ZERO, |acc, (&x, &y)| {
        let (p, e) = two_prod(x, y);
        acc + Dd { hi: p, lo: e }
    })
}
