//! Order-two forward-mode dual numbers.
//!
//! A [`Jet2`] carries a value with its first and second derivatives with
//! respect to a single seed variable. Arithmetic propagates both
//! derivatives exactly (to rounding), which is what the curvature code
//! needs: second derivatives of closed-form metric components without the
//! accuracy ceiling of finite differences.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    /// Value.
    pub v: f64,
    /// First derivative.
    pub d1: f64,
    /// Second derivative.
    pub d2: f64,
}

impl Jet2 {
    /// Seed variable: value `x`, unit first derivative.
    pub fn variable(x: f64) -> Self {
        Self { v: x, d1: 1.0, d2: 0.0 }
    }

    /// Constant: both derivatives vanish.
    pub fn constant(c: f64) -> Self {
        Self { v: c, d1: 0.0, d2: 0.0 }
    }

    pub fn recip(self) -> Self {
        let inv = 1.0 / self.v;
        let inv2 = inv * inv;
        Self {
            v: inv,
            d1: -self.d1 * inv2,
            d2: (2.0 * self.d1 * self.d1 * inv - self.d2) * inv2,
        }
    }

    pub fn powi(self, n: i32) -> Self {
        let nf = f64::from(n);
        let p = self.v.powi(n - 2);
        Self {
            v: p * self.v * self.v,
            d1: nf * p * self.v * self.d1,
            d2: nf * (nf - 1.0) * p * self.d1 * self.d1 + nf * p * self.v * self.d2,
        }
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        Self {
            v: e,
            d1: self.d1 * e,
            d2: (self.d2 + self.d1 * self.d1) * e,
        }
    }

    pub fn ln(self) -> Self {
        Self {
            v: self.v.ln(),
            d1: self.d1 / self.v,
            d2: (self.d2 * self.v - self.d1 * self.d1) / (self.v * self.v),
        }
    }

    pub fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        Self {
            v: s,
            d1: self.d1 / (2.0 * s),
            d2: self.d2 / (2.0 * s) - self.d1 * self.d1 / (4.0 * s * self.v),
        }
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        Jet2 { v: self.v + rhs.v, d1: self.d1 + rhs.d1, d2: self.d2 + rhs.d2 }
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        Jet2 { v: self.v - rhs.v, d1: self.d1 - rhs.d1, d2: self.d2 - rhs.d2 }
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        Jet2 {
            v: self.v * rhs.v,
            d1: self.d1 * rhs.v + self.v * rhs.d1,
            d2: self.d2 * rhs.v + 2.0 * self.d1 * rhs.d1 + self.v * rhs.d2,
        }
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    #[allow(clippy::suspicious_arithmetic_impl)] // a/b as a * (1/b)
    fn div(self, rhs: Jet2) -> Jet2 {
        self * rhs.recip()
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        Jet2 { v: -self.v, d1: -self.d1, d2: -self.d2 }
    }
}

impl Mul<Jet2> for f64 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        Jet2 { v: self * rhs.v, d1: self * rhs.d1, d2: self * rhs.d2 }
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: f64) -> Jet2 {
        Jet2 { v: self.v + rhs, ..self }
    }
}
