//! Minimal double-double arithmetic for evaluating exponential polynomials
//! where the expanded sum cancels far below the size of its terms.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let r = self - Dd::from_f64(b).mul_f64(q1);
        let q2 = r.hi / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let (hi, lo) = quick_two_sum(p, e + (self.hi * b.lo + self.lo * b.hi));
        Dd { hi, lo }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct DdComplex {
    pub re: Dd,
    pub im: Dd,
}

impl DdComplex {
    pub const ONE: DdComplex = DdComplex { re: Dd::ONE, im: Dd::ZERO };

    pub fn mul(self, b: DdComplex) -> DdComplex {
        DdComplex {
            re: self.re * b.re - self.im * b.im,
            im: self.re * b.im + self.im * b.re,
        }
    }

    pub fn add(self, b: DdComplex) -> DdComplex {
        DdComplex { re: self.re + b.re, im: self.im + b.im }
    }

    pub fn conj(self) -> DdComplex {
        DdComplex { re: self.re, im: -self.im }
    }

    /// Product with an `f64` complex scalar.
    pub fn scale(self, re: f64, im: f64) -> DdComplex {
        DdComplex {
            re: self.re.mul_f64(re) - self.im.mul_f64(im),
            im: self.re.mul_f64(im) + self.im.mul_f64(re),
        }
    }

    /// `self^k` for a unit-modulus value.
    pub fn powi_unit(self, k: i64) -> DdComplex {
        let mut base = if k < 0 { self.conj() } else { self };
        let mut e = k.unsigned_abs();
        let mut acc = DdComplex::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            e >>= 1;
        }
        acc
    }

    pub fn norm(self) -> f64 {
        self.re.to_f64().hypot(self.im.to_f64())
    }
}

/// `e^{ix}` to double-double accuracy for the exactly represented `x`.
pub(crate) fn cis(x: f64) -> DdComplex {
    // halve until |y| ≤ 1/2 (exact), sum the series, square back up
    let mut s = 0;
    let mut y = x;
    while y.abs() > 0.5 {
        y *= 0.5;
        s += 1;
    }
    let mut c = Dd::ONE;
    let mut sn = Dd::ZERO;
    let mut term = Dd::ONE;
    for n in 1..=24u32 {
        term = term.mul_f64(y).div_f64(f64::from(n));
        match n % 4 {
            1 => sn = sn + term,
            2 => c = c - term,
            3 => sn = sn - term,
            _ => c = c + term,
        }
    }
    let mut z = DdComplex { re: c, im: sn };
    for _ in 0..s {
        z = z.mul(z);
    }
    z
}
