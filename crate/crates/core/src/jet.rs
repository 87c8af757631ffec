//! Second-order forward-mode differentiation.
//!
//! A [`Jet`] carries the value, gradient and Hessian of a scalar expression
//! with respect to the chart coordinates. Every closed-form field in the crate
//! (metric components, static potentials, bumps, radial profiles) is written
//! once over `Jet` arithmetic, which yields exact first and second partial
//! derivatives without finite differences.

use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Largest chart dimension supported by the fixed-size jet storage.
pub const MAX_DIM: usize = 6;

const H: usize = MAX_DIM * MAX_DIM;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    dim: usize,
    v: f64,
    g: [f64; MAX_DIM],
    h: [f64; H],
}

impl Jet {
    pub fn constant(dim: usize, v: f64) -> Self {
        debug_assert!(dim <= MAX_DIM);
        Jet {
            dim,
            v,
            g: [0.0; MAX_DIM],
            h: [0.0; H],
        }
    }

    /// The `i`-th coordinate function evaluated at `value`.
    pub fn variable(dim: usize, i: usize, value: f64) -> Self {
        let mut j = Jet::constant(dim, value);
        j.g[i] = 1.0;
        j
    }

    /// All coordinate functions at the point `x`.
    pub fn coordinates(x: &[f64]) -> Vec<Jet> {
        let n = x.len();
        x.iter()
            .enumerate()
            .map(|(i, &xi)| Jet::variable(n, i, xi))
            .collect()
    }

    /// Builds a jet from explicit value, gradient and (row-major, `dim*dim`) Hessian.
    pub fn from_parts(v: f64, grad: &[f64], hess: &[f64]) -> Self {
        let dim = grad.len();
        assert!(dim <= MAX_DIM && hess.len() == dim * dim);
        let mut j = Jet::constant(dim, v);
        j.g[..dim].copy_from_slice(grad);
        for a in 0..dim {
            for b in 0..dim {
                j.h[a * MAX_DIM + b] = hess[a * dim + b];
            }
        }
        j
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }
    #[inline]
    pub fn value(&self) -> f64 {
        self.v
    }
    #[inline]
    pub fn d(&self, i: usize) -> f64 {
        self.g[i]
    }
    #[inline]
    pub fn dd(&self, i: usize, j: usize) -> f64 {
        self.h[i * MAX_DIM + j]
    }
    pub fn gradient(&self) -> Vec<f64> {
        self.g[..self.dim].to_vec()
    }

    /// Drops all derivative information, keeping only the value.
    pub fn value_only(&self) -> Self {
        Jet::constant(self.dim, self.v)
    }

    /// Applies a univariate function given its value and first two derivatives at `self.v`.
    #[inline]
    pub fn chain(&self, f: f64, df: f64, d2f: f64) -> Self {
        let n = self.dim;
        let mut out = Jet::constant(n, f);
        for a in 0..n {
            out.g[a] = df * self.g[a];
        }
        for a in 0..n {
            for b in 0..n {
                let k = a * MAX_DIM + b;
                out.h[k] = df * self.h[k] + d2f * self.g[a] * self.g[b];
            }
        }
        out
    }

    pub fn sqrt(&self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.v))
    }
    pub fn powf(&self, p: f64) -> Self {
        let x = self.v;
        self.chain(x.powf(p), p * x.powf(p - 1.0), p * (p - 1.0) * x.powf(p - 2.0))
    }
    pub fn powi(&self, p: i32) -> Self {
        let x = self.v;
        let pf = f64::from(p);
        let d1 = if p == 0 { 0.0 } else { pf * x.powi(p - 1) };
        let d2 = if p == 0 || p == 1 {
            0.0
        } else {
            pf * (pf - 1.0) * x.powi(p - 2)
        };
        self.chain(x.powi(p), d1, d2)
    }
    pub fn recip(&self) -> Self {
        let r = 1.0 / self.v;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }
    pub fn exp(&self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }
    pub fn ln(&self) -> Self {
        let r = 1.0 / self.v;
        self.chain(self.v.ln(), r, -r * r)
    }
    pub fn sin(&self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }
    pub fn cos(&self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }
    pub fn sinh(&self) -> Self {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.chain(s, c, s)
    }
    pub fn cosh(&self) -> Self {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.chain(c, s, c)
    }
    pub fn tanh(&self) -> Self {
        let t = self.v.tanh();
        let s2 = 1.0 - t * t;
        self.chain(t, s2, -2.0 * t * s2)
    }
    pub fn square(&self) -> Self {
        *self * *self
    }
}

#[inline]
fn dim2(a: &Jet, b: &Jet) -> usize {
    a.dim.max(b.dim)
}

impl Add for Jet {
    type Output = Jet;
    #[inline]
    fn add(mut self, rhs: Jet) -> Jet {
        self += rhs;
        self
    }
}

impl AddAssign for Jet {
    #[inline]
    fn add_assign(&mut self, rhs: Jet) {
        let n = dim2(self, &rhs);
        self.dim = n;
        self.v += rhs.v;
        for a in 0..n {
            self.g[a] += rhs.g[a];
            for b in 0..n {
                self.h[a * MAX_DIM + b] += rhs.h[a * MAX_DIM + b];
            }
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    #[inline]
    fn sub(mut self, rhs: Jet) -> Jet {
        self -= rhs;
        self
    }
}

impl SubAssign for Jet {
    #[inline]
    fn sub_assign(&mut self, rhs: Jet) {
        let n = dim2(self, &rhs);
        self.dim = n;
        self.v -= rhs.v;
        for a in 0..n {
            self.g[a] -= rhs.g[a];
            for b in 0..n {
                self.h[a * MAX_DIM + b] -= rhs.h[a * MAX_DIM + b];
            }
        }
    }
}

impl Neg for Jet {
    type Output = Jet;
    #[inline]
    fn neg(mut self) -> Jet {
        self.v = -self.v;
        for a in 0..self.dim {
            self.g[a] = -self.g[a];
            for b in 0..self.dim {
                self.h[a * MAX_DIM + b] = -self.h[a * MAX_DIM + b];
            }
        }
        self
    }
}

impl Mul for Jet {
    type Output = Jet;
    #[inline]
    fn mul(self, rhs: Jet) -> Jet {
        let n = dim2(&self, &rhs);
        let mut out = Jet::constant(n, self.v * rhs.v);
        for a in 0..n {
            out.g[a] = self.g[a] * rhs.v + self.v * rhs.g[a];
        }
        for a in 0..n {
            for b in 0..n {
                let k = a * MAX_DIM + b;
                out.h[k] = self.h[k] * rhs.v
                    + self.v * rhs.h[k]
                    + self.g[a] * rhs.g[b]
                    + self.g[b] * rhs.g[a];
            }
        }
        out
    }
}

impl MulAssign for Jet {
    #[inline]
    fn mul_assign(&mut self, rhs: Jet) {
        *self = *self * rhs;
    }
}

impl Div for Jet {
    type Output = Jet;
    #[inline]
    fn div(self, rhs: Jet) -> Jet {
        self * rhs.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    #[inline]
    fn add(mut self, rhs: f64) -> Jet {
        self.v += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    #[inline]
    fn sub(mut self, rhs: f64) -> Jet {
        self.v -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    #[inline]
    fn mul(mut self, rhs: f64) -> Jet {
        self.v *= rhs;
        for a in 0..self.dim {
            self.g[a] *= rhs;
            for b in 0..self.dim {
                self.h[a * MAX_DIM + b] *= rhs;
            }
        }
        self
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    #[inline]
    fn div(self, rhs: f64) -> Jet {
        self * (1.0 / rhs)
    }
}

impl Add<Jet> for f64 {
    type Output = Jet;
    #[inline]
    fn add(self, rhs: Jet) -> Jet {
        rhs + self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    #[inline]
    fn sub(self, rhs: Jet) -> Jet {
        -rhs + self
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    #[inline]
    fn mul(self, rhs: Jet) -> Jet {
        rhs * self
    }
}

impl Div<Jet> for f64 {
    type Output = Jet;
    #[inline]
    fn div(self, rhs: Jet) -> Jet {
        rhs.recip() * self
    }
}

/// Sum of squares of the coordinate jets, i.e. `|x|^2`.
pub fn norm_squared(x: &[Jet]) -> Jet {
    let n = x.first().map_or(0, |j| j.dim());
    x.iter().fold(Jet::constant(n, 0.0), |acc, xi| acc + *xi * *xi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(f: impl Fn(&[Jet]) -> Jet, x: &[f64]) {
        let n = x.len();
        let j = f(&Jet::coordinates(x));
        let eval = |y: &[f64]| f(&Jet::coordinates(y)).value();
        let h = 1e-4;
        for a in 0..n {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[a] += h;
            xm[a] -= h;
            let fd = (eval(&xp) - eval(&xm)) / (2.0 * h);
            assert!((fd - j.d(a)).abs() < 1e-7 * (1.0 + fd.abs()), "grad {a}");
            for b in 0..n {
                let jp = f(&Jet::coordinates(&xp)).d(b);
                let jm = f(&Jet::coordinates(&xm)).d(b);
                let fd2 = (jp - jm) / (2.0 * h);
                assert!((fd2 - j.dd(a, b)).abs() < 1e-6 * (1.0 + fd2.abs()), "hess {a}{b}");
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let x = [0.7, -1.3, 0.4];
        fd_check(
            |x| (x[0] * x[1]).sin() + x[2].exp() / (1.0 + norm_squared(x)).sqrt(),
            &x,
        );
        fd_check(|x| x[0].cosh() * x[1].tanh() - x[2].powf(2.0).ln(), &x);
        fd_check(|x| (2.0 + x[0]).powi(-3) * x[1].cos() + x[2].sinh(), &x);
    }

    #[test]
    fn product_rule_symmetric_hessian() {
        let x = Jet::coordinates(&[1.0, 2.0, 3.0]);
        let f = x[0] * x[1] * x[2];
        assert_eq!(f.dd(0, 1), 3.0);
        assert_eq!(f.dd(1, 0), 3.0);
        assert_eq!(f.dd(0, 0), 0.0);
    }
}
