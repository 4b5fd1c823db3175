//! Second-order forward-mode jets.
//!
//! Metric and projection formulas are written once, generically over [`Real`],
//! and evaluated either on plain `f64` or on [`Jet`]s, which carry the value,
//! gradient and Hessian with respect to the coordinates. That gives exact
//! first and second partial derivatives for Christoffel symbols and curvature.

use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Largest number of coordinates a [`Jet`] can differentiate against.
pub const MAX_VARS: usize = 6;

/// Scalar arithmetic needed by metric and projection formulas.
pub trait Real:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    fn cst(x: f64) -> Self;
    fn value(&self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn tan(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn tanh(self) -> Self;
    fn powi(self, k: i32) -> Self;
    fn powf(self, p: f64) -> Self;
    fn abs(self) -> Self;

    fn powr(self, p: Self) -> Self {
        (p * self.ln()).exp()
    }
}

impl Real for f64 {
    fn cst(x: f64) -> Self {
        x
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn tan(self) -> Self {
        f64::tan(self)
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
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
    fn powi(self, k: i32) -> Self {
        f64::powi(self, k)
    }
    fn powf(self, p: f64) -> Self {
        f64::powf(self, p)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
}

/// Value, gradient and Hessian of a scalar function of up to [`MAX_VARS`] variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d: [f64; MAX_VARS],
    pub h: [[f64; MAX_VARS]; MAX_VARS],
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        Jet {
            v,
            d: [0.0; MAX_VARS],
            h: [[0.0; MAX_VARS]; MAX_VARS],
        }
    }

    /// The coordinate function `x_i` evaluated at `v`.
    pub fn variable(v: f64, i: usize) -> Self {
        let mut j = Jet::constant(v);
        j.d[i] = 1.0;
        j
    }

    /// Seeds one jet per coordinate of `x`.
    pub fn seed(x: &[f64]) -> Vec<Jet> {
        assert!(x.len() <= MAX_VARS, "jets support at most {MAX_VARS} variables");
        x.iter().enumerate().map(|(i, &v)| Jet::variable(v, i)).collect()
    }

    /// Applies a scalar function given its value and first two derivatives at `self.v`.
    fn chain(self, f: f64, f1: f64, f2: f64) -> Jet {
        let mut out = Jet::constant(f);
        for i in 0..MAX_VARS {
            out.d[i] = f1 * self.d[i];
        }
        for i in 0..MAX_VARS {
            for k in 0..MAX_VARS {
                out.h[i][k] = f1 * self.h[i][k] + f2 * self.d[i] * self.d[k];
            }
        }
        out
    }

    fn recip(self) -> Jet {
        let r = 1.0 / self.v;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, o: Jet) -> Jet {
        self += o;
        self
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, o: Jet) {
        self.v += o.v;
        for i in 0..MAX_VARS {
            self.d[i] += o.d[i];
            for k in 0..MAX_VARS {
                self.h[i][k] += o.h[i][k];
            }
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(mut self, o: Jet) -> Jet {
        self -= o;
        self
    }
}

impl SubAssign for Jet {
    fn sub_assign(&mut self, o: Jet) {
        self.v -= o.v;
        for i in 0..MAX_VARS {
            self.d[i] -= o.d[i];
            for k in 0..MAX_VARS {
                self.h[i][k] -= o.h[i][k];
            }
        }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        let mut out = self;
        out.v = -out.v;
        for i in 0..MAX_VARS {
            out.d[i] = -out.d[i];
            for k in 0..MAX_VARS {
                out.h[i][k] = -out.h[i][k];
            }
        }
        out
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut out = Jet::constant(self.v * o.v);
        for i in 0..MAX_VARS {
            out.d[i] = self.d[i] * o.v + self.v * o.d[i];
        }
        for i in 0..MAX_VARS {
            for k in 0..MAX_VARS {
                out.h[i][k] = self.h[i][k] * o.v
                    + self.v * o.h[i][k]
                    + self.d[i] * o.d[k]
                    + o.d[i] * self.d[k];
            }
        }
        out
    }
}

impl MulAssign for Jet {
    fn mul_assign(&mut self, o: Jet) {
        *self = *self * o;
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Real for Jet {
    fn cst(x: f64) -> Self {
        Jet::constant(x)
    }
    fn value(&self) -> f64 {
        self.v
    }
    fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }
    fn tan(self) -> Self {
        let t = self.v.tan();
        let s2 = 1.0 + t * t;
        self.chain(t, s2, 2.0 * t * s2)
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }
    fn ln(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(self.v.ln(), r, -r * r)
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.v))
    }
    fn sinh(self) -> Self {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.chain(s, c, s)
    }
    fn cosh(self) -> Self {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.chain(c, s, c)
    }
    fn tanh(self) -> Self {
        let t = self.v.tanh();
        let s = 1.0 - t * t;
        self.chain(t, s, -2.0 * t * s)
    }
    fn powi(self, k: i32) -> Self {
        match k {
            0 => Jet::constant(1.0),
            1 => self,
            2 => self * self,
            _ => {
                let kf = k as f64;
                self.chain(
                    self.v.powi(k),
                    kf * self.v.powi(k - 1),
                    kf * (kf - 1.0) * self.v.powi(k - 2),
                )
            }
        }
    }
    fn powf(self, p: f64) -> Self {
        self.chain(
            self.v.powf(p),
            p * self.v.powf(p - 1.0),
            p * (p - 1.0) * self.v.powf(p - 2.0),
        )
    }
    fn abs(self) -> Self {
        if self.v < 0.0 {
            -self
        } else {
            self
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f<R: Real>(x: R, y: R) -> R {
        x.sin() * y.powi(3) + (x * y).exp() / (R::cst(2.0) + y.cos())
    }

    #[test]
    fn jet_matches_central_differences() {
        let (x0, y0) = (0.3, -0.7);
        let vars = Jet::seed(&[x0, y0]);
        let j = f(vars[0], vars[1]);
        let h = 1e-4;
        let fx = |x: f64, y: f64| f(x, y);
        let dx = (fx(x0 + h, y0) - fx(x0 - h, y0)) / (2.0 * h);
        let dy = (fx(x0, y0 + h) - fx(x0, y0 - h)) / (2.0 * h);
        let dxy = (fx(x0 + h, y0 + h) - fx(x0 + h, y0 - h) - fx(x0 - h, y0 + h)
            + fx(x0 - h, y0 - h))
            / (4.0 * h * h);
        let dxx = (fx(x0 + h, y0) - 2.0 * fx(x0, y0) + fx(x0 - h, y0)) / (h * h);
        assert!((j.v - fx(x0, y0)).abs() < 1e-15);
        assert!((j.d[0] - dx).abs() < 1e-7);
        assert!((j.d[1] - dy).abs() < 1e-7);
        assert!((j.h[0][1] - dxy).abs() < 1e-5);
        assert!((j.h[1][0] - j.h[0][1]).abs() < 1e-14);
        assert!((j.h[0][0] - dxx).abs() < 1e-5);
    }

    #[test]
    fn power_rules_agree() {
        let x = Jet::variable(1.7, 0);
        let a = x.powi(5);
        let b = x.powf(5.0);
        let c = x.powr(Jet::constant(5.0));
        for j in [b, c] {
            assert!((a.v - j.v).abs() < 1e-12);
            assert!((a.d[0] - j.d[0]).abs() < 1e-11);
            assert!((a.h[0][0] - j.h[0][0]).abs() < 1e-10);
        }
    }
}
