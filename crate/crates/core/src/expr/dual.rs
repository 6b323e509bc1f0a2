//! Forward-mode dual numbers.
//!
//! [`Dual`] is generic over its component type so duals can be nested:
//! `Dual<Dual<f64>>` seeded in two directions yields the mixed second
//! derivative in `eps.eps`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Scalar arithmetic shared by `f64` and dual numbers of any nesting depth.
pub trait Scalar:
    Copy
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn constant(v: f64) -> Self;
    /// The innermost real part.
    fn re(self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn tanh(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    fn powf(self, exponent: f64) -> Self;
    fn powi(self, exponent: i32) -> Self;

    fn scale(self, k: f64) -> Self {
        self * Self::constant(k)
    }
}

impl Scalar for f64 {
    fn constant(v: f64) -> Self {
        v
    }
    fn re(self) -> f64 {
        self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn powf(self, exponent: f64) -> Self {
        f64::powf(self, exponent)
    }
    fn powi(self, exponent: i32) -> Self {
        f64::powi(self, exponent)
    }
}

/// A value together with one directional derivative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<S = f64> {
    pub re: S,
    pub eps: S,
}

impl<S: Scalar> Dual<S> {
    pub fn new(re: S, eps: S) -> Self {
        Self { re, eps }
    }

    /// A variable seeded with derivative `1`.
    pub fn variable(re: S) -> Self {
        Self {
            re,
            eps: S::constant(1.0),
        }
    }

    fn chain(self, value: S, slope: S) -> Self {
        Self {
            re: value,
            eps: slope * self.eps,
        }
    }
}

impl Dual<f64> {
    pub fn value(&self) -> f64 {
        self.re
    }
    pub fn derivative(&self) -> f64 {
        self.eps
    }
}

impl<S: Scalar> Add for Dual<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.re + rhs.re, self.eps + rhs.eps)
    }
}

impl<S: Scalar> Sub for Dual<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.re - rhs.re, self.eps - rhs.eps)
    }
}

impl<S: Scalar> Mul for Dual<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(self.re * rhs.re, self.eps * rhs.re + self.re * rhs.eps)
    }
}

impl<S: Scalar> Div for Dual<S> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let q = self.re / rhs.re;
        Self::new(q, (self.eps - q * rhs.eps) / rhs.re)
    }
}

impl<S: Scalar> Neg for Dual<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.eps)
    }
}

impl<S: Scalar> Scalar for Dual<S> {
    fn constant(v: f64) -> Self {
        Self::new(S::constant(v), S::constant(0.0))
    }
    fn re(self) -> f64 {
        self.re.re()
    }
    fn sin(self) -> Self {
        self.chain(self.re.sin(), self.re.cos())
    }
    fn cos(self) -> Self {
        self.chain(self.re.cos(), -self.re.sin())
    }
    fn sinh(self) -> Self {
        self.chain(self.re.sinh(), self.re.cosh())
    }
    fn cosh(self) -> Self {
        self.chain(self.re.cosh(), self.re.sinh())
    }
    fn tanh(self) -> Self {
        let t = self.re.tanh();
        self.chain(t, S::constant(1.0) - t * t)
    }
    fn exp(self) -> Self {
        let e = self.re.exp();
        self.chain(e, e)
    }
    fn ln(self) -> Self {
        self.chain(self.re.ln(), S::constant(1.0) / self.re)
    }
    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        self.chain(s, S::constant(0.5) / s)
    }
    fn abs(self) -> Self {
        let r = self.re();
        if r > 0.0 {
            self
        } else if r < 0.0 {
            -self
        } else {
            Self::new(self.re.abs(), S::constant(0.0))
        }
    }
    fn powf(self, exponent: f64) -> Self {
        self.chain(
            self.re.powf(exponent),
            self.re.powf(exponent - 1.0).scale(exponent),
        )
    }
    fn powi(self, exponent: i32) -> Self {
        if exponent == 0 {
            return Self::constant(1.0);
        }
        self.chain(
            self.re.powi(exponent),
            self.re.powi(exponent - 1).scale(exponent as f64),
        )
    }
}

/// Value and first two derivatives of a scalar function of one variable.
#[derive(Clone, Copy, Debug, PartialEq, Default, serde::Serialize)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub fn new(value: f64, d1: f64, d2: f64) -> Self {
        Self { value, d1, d2 }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }
}

/// Evaluates `f` at `t` with a twice-nested dual seed and unpacks the jet.
pub fn jet_of<F>(f: F, t: f64) -> Jet
where
    F: Fn(Dual<Dual<f64>>) -> Dual<Dual<f64>>,
{
    let seed = Dual::new(Dual::new(t, 1.0), Dual::new(1.0, 0.0));
    let out = f(seed);
    Jet::new(out.re.re, out.re.eps, out.eps.eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule() {
        let x = Dual::variable(3.0);
        let y = x * x;
        assert_eq!(y.value(), 9.0);
        assert_eq!(y.derivative(), 6.0);
    }

    #[test]
    fn nested_second_derivative_of_exp_square() {
        // d²/dt² exp(t²) = (2 + 4t²) exp(t²)
        let j = jet_of(|t| (t * t).exp(), 0.7);
        let e = (0.49f64).exp();
        assert!((j.value - e).abs() < 1e-15);
        assert!((j.d1 - 1.4 * e).abs() < 1e-14);
        assert!((j.d2 - (2.0 + 4.0 * 0.49) * e).abs() < 1e-13);
    }

    #[test]
    fn powi_zero_is_constant() {
        let x = Dual::variable(2.0).powi(0);
        assert_eq!(x, Dual::new(1.0, 0.0));
    }
}
