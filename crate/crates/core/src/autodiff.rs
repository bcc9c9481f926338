//! Forward-mode automatic differentiation with multi-channel dual numbers.
//!
//! The loss pipeline is written against the [`Real`] trait so the same code
//! evaluates plain `f64` values and [`Dual`] numbers carrying a full gradient
//! in one pass. Branch decisions (clips, hue cases, min/max) always compare
//! real parts, which matches the piecewise-smooth losses used here.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Scalar abstraction over `f64` and dual numbers.
pub trait Real:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn constant(v: f64) -> Self;
    /// The real (value) part.
    fn value(self) -> f64;

    fn scale(self, f: f64) -> Self;
    fn sqrt(self) -> Self;
    fn cbrt(self) -> Self;
    fn abs(self) -> Self;
    fn exp(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn atan2(self, x: Self) -> Self;

    fn min(self, other: Self) -> Self {
        if self.value() <= other.value() {
            self
        } else {
            other
        }
    }

    fn max(self, other: Self) -> Self {
        if self.value() >= other.value() {
            self
        } else {
            other
        }
    }

    /// max(self, 0), with zero tangent in the dead zone.
    fn relu(self) -> Self {
        if self.value() > 0.0 {
            self
        } else {
            Self::constant(0.0)
        }
    }
}

impl Real for f64 {
    fn constant(v: f64) -> Self {
        v
    }
    fn value(self) -> f64 {
        self
    }
    fn scale(self, f: f64) -> Self {
        self * f
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn cbrt(self) -> Self {
        f64::cbrt(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn atan2(self, x: Self) -> Self {
        f64::atan2(self, x)
    }
}

/// Dual number with `N` tangent channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual<const N: usize> {
    pub re: f64,
    pub eps: [f64; N],
}

impl<const N: usize> Dual<N> {
    pub fn new(re: f64) -> Self {
        Self { re, eps: [0.0; N] }
    }

    /// An input variable: unit tangent in channel `i`.
    pub fn variable(re: f64, i: usize) -> Self {
        let mut eps = [0.0; N];
        eps[i] = 1.0;
        Self { re, eps }
    }

    pub fn gradient(&self) -> &[f64; N] {
        &self.eps
    }

    fn map(self, re: f64, dfactor: f64) -> Self {
        let mut eps = self.eps;
        for e in eps.iter_mut() {
            *e *= dfactor;
        }
        Self { re, eps }
    }
}

impl<const N: usize> Add for Dual<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut eps = self.eps;
        for (e, r) in eps.iter_mut().zip(rhs.eps.iter()) {
            *e += r;
        }
        Self {
            re: self.re + rhs.re,
            eps,
        }
    }
}

impl<const N: usize> Sub for Dual<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut eps = self.eps;
        for (e, r) in eps.iter_mut().zip(rhs.eps.iter()) {
            *e -= r;
        }
        Self {
            re: self.re - rhs.re,
            eps,
        }
    }
}

impl<const N: usize> Mul for Dual<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut eps = [0.0; N];
        for i in 0..N {
            eps[i] = self.eps[i] * rhs.re + self.re * rhs.eps[i];
        }
        Self {
            re: self.re * rhs.re,
            eps,
        }
    }
}

impl<const N: usize> Div for Dual<N> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let inv = 1.0 / rhs.re;
        let re = self.re * inv;
        let mut eps = [0.0; N];
        for i in 0..N {
            eps[i] = (self.eps[i] - re * rhs.eps[i]) * inv;
        }
        Self { re, eps }
    }
}

impl<const N: usize> Neg for Dual<N> {
    type Output = Self;
    fn neg(self) -> Self {
        let mut eps = self.eps;
        for e in eps.iter_mut() {
            *e = -*e;
        }
        Self { re: -self.re, eps }
    }
}

impl<const N: usize> Real for Dual<N> {
    fn constant(v: f64) -> Self {
        Self::new(v)
    }

    fn value(self) -> f64 {
        self.re
    }

    fn scale(self, f: f64) -> Self {
        self.map(self.re * f, f)
    }

    fn sqrt(self) -> Self {
        let r = self.re.sqrt();
        // Subgradient 0 at the origin keeps distance-like terms from
        // poisoning the gradient with NaN when two colors coincide.
        if r == 0.0 {
            return Self::new(0.0);
        }
        self.map(r, 0.5 / r)
    }

    fn cbrt(self) -> Self {
        let c = self.re.cbrt();
        if c == 0.0 {
            return Self::new(0.0);
        }
        self.map(c, 1.0 / (3.0 * c * c))
    }

    fn abs(self) -> Self {
        if self.re > 0.0 {
            self
        } else if self.re < 0.0 {
            -self
        } else {
            Self::new(0.0)
        }
    }

    fn exp(self) -> Self {
        let e = self.re.exp();
        self.map(e, e)
    }

    fn sin(self) -> Self {
        self.map(self.re.sin(), self.re.cos())
    }

    fn cos(self) -> Self {
        self.map(self.re.cos(), -self.re.sin())
    }

    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::new(1.0);
        }
        self.map(self.re.powi(n), n as f64 * self.re.powi(n - 1))
    }

    fn atan2(self, x: Self) -> Self {
        let y = self;
        let denom = x.re * x.re + y.re * y.re;
        let re = y.re.atan2(x.re);
        if denom == 0.0 {
            return Self::new(re);
        }
        let mut eps = [0.0; N];
        for i in 0..N {
            eps[i] = (y.eps[i] * x.re - x.eps[i] * y.re) / denom;
        }
        Self { re, eps }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    type D = Dual<2>;

    fn fd<F: Fn(f64, f64) -> f64>(f: F, x: f64, y: f64) -> (f64, f64) {
        let h = 1e-6;
        (
            (f(x + h, y) - f(x - h, y)) / (2.0 * h),
            (f(x, y + h) - f(x, y - h)) / (2.0 * h),
        )
    }

    #[test]
    fn dual_matches_finite_differences_on_composite() {
        let f = |x: f64, y: f64| ((x * y).sin() + (x / y).sqrt()).exp() * x.atan2(y);
        let (x, y) = (0.7, 1.3);
        let dx = D::variable(x, 0);
        let dy = D::variable(y, 1);
        let out = ((dx * dy).sin() + (dx / dy).sqrt()).exp() * dx.atan2(dy);
        let (gx, gy) = fd(f, x, y);
        assert_relative_eq!(out.re, f(x, y), max_relative = 1e-12);
        assert_relative_eq!(out.eps[0], gx, max_relative = 1e-6);
        assert_relative_eq!(out.eps[1], gy, max_relative = 1e-6);
    }

    #[test]
    fn sqrt_at_zero_takes_zero_subgradient() {
        let x = D::variable(0.0, 0);
        let r = (x * x).sqrt();
        assert_eq!(r.re, 0.0);
        assert_eq!(r.eps, [0.0; 2]);
    }

    #[test]
    fn abs_and_relu_kinks_use_value_sign() {
        let x = D::variable(-2.0, 0);
        assert_eq!(x.abs().re, 2.0);
        assert_eq!(x.abs().eps[0], -1.0);
        assert_eq!(x.relu().re, 0.0);
        assert_eq!(x.relu().eps[0], 0.0);
        let y = D::variable(3.0, 1);
        assert_eq!(y.relu().eps[1], 1.0);
    }

    #[test]
    fn min_max_select_by_value() {
        let a = D::variable(1.0, 0);
        let b = D::variable(2.0, 1);
        assert_eq!(Real::min(a, b).eps[0], 1.0);
        assert_eq!(Real::max(a, b).eps[1], 1.0);
    }

    #[test]
    fn powi_seventh_power_derivative() {
        let x = D::variable(1.5, 0);
        let p = x.powi(7);
        assert_relative_eq!(p.re, 1.5f64.powi(7));
        assert_relative_eq!(p.eps[0], 7.0 * 1.5f64.powi(6));
    }
}
