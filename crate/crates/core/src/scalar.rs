//! Scalar abstraction shared by plain `f64` evaluation and second-order
//! forward-mode differentiation ([`Jet`]).
//!
//! Exact solutions and level sets are written once, generically over
//! [`Scalar`], and evaluated either as plain values (fast path used by
//! quadrature and sampling) or as jets carrying the gradient and Hessian
//! (used for fluxes, source terms and `PH^2` norms).

use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
{
    fn cst(v: f64) -> Self;
    fn value(&self) -> f64;
    fn sqrt(self) -> Self;
    fn powi(self, n: i32) -> Self;
}

impl Scalar for f64 {
    #[inline]
    fn cst(v: f64) -> Self {
        v
    }
    #[inline]
    fn value(&self) -> f64 {
        *self
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
}

/// Value, gradient and Hessian of a scalar function of three variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub g: [f64; 3],
    pub h: [[f64; 3]; 3],
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        Jet { v, g: [0.0; 3], h: [[0.0; 3]; 3] }
    }

    /// The coordinate function `x_axis` evaluated at `v`.
    pub fn variable(v: f64, axis: usize) -> Self {
        let mut j = Jet::constant(v);
        j.g[axis] = 1.0;
        j
    }

    pub fn variables(x: [f64; 3]) -> [Jet; 3] {
        [Jet::variable(x[0], 0), Jet::variable(x[1], 1), Jet::variable(x[2], 2)]
    }

    pub fn laplacian(&self) -> f64 {
        self.h[0][0] + self.h[1][1] + self.h[2][2]
    }

    pub fn hessian_frobenius_sq(&self) -> f64 {
        self.h.iter().flatten().map(|v| v * v).sum()
    }

    /// `phi(self)` for a univariate `phi` with derivatives `d1`, `d2` at `self.v`.
    fn compose(self, v: f64, d1: f64, d2: f64) -> Jet {
        let mut out = Jet::constant(v);
        for i in 0..3 {
            out.g[i] = d1 * self.g[i];
            for j in 0..3 {
                out.h[i][j] = d1 * self.h[i][j] + d2 * self.g[i] * self.g[j];
            }
        }
        out
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, o: Jet) -> Jet {
        self.v += o.v;
        for i in 0..3 {
            self.g[i] += o.g[i];
            for j in 0..3 {
                self.h[i][j] += o.h[i][j];
            }
        }
        self
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self * -1.0
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut out = Jet::constant(self.v * o.v);
        for i in 0..3 {
            out.g[i] = self.g[i] * o.v + self.v * o.g[i];
            for j in 0..3 {
                out.h[i][j] = self.h[i][j] * o.v
                    + self.v * o.h[i][j]
                    + self.g[i] * o.g[j]
                    + self.g[j] * o.g[i];
            }
        }
        out
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        let inv = o.compose(1.0 / o.v, -1.0 / (o.v * o.v), 2.0 / (o.v * o.v * o.v));
        self * inv
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, c: f64) -> Jet {
        self.v += c;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, c: f64) -> Jet {
        self.v -= c;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, c: f64) -> Jet {
        self.v *= c;
        for i in 0..3 {
            self.g[i] *= c;
            for j in 0..3 {
                self.h[i][j] *= c;
            }
        }
        self
    }
}

impl Scalar for Jet {
    fn cst(v: f64) -> Self {
        Jet::constant(v)
    }
    fn value(&self) -> f64 {
        self.v
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.compose(s, 0.5 / s, -0.25 / (s * self.v))
    }
    fn powi(self, n: i32) -> Self {
        let nf = n as f64;
        let v = self.v.powi(n);
        let d1 = if n == 0 { 0.0 } else { nf * self.v.powi(n - 1) };
        let d2 = if (0..=1).contains(&n) { 0.0 } else { nf * (nf - 1.0) * self.v.powi(n - 2) };
        self.compose(v, d1, d2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample<S: Scalar>(x: [S; 3]) -> S {
        // x^2 y + sqrt(1 + z^2) * y^3
        x[0] * x[0] * x[1] + (x[2] * x[2] + 1.0).sqrt() * x[1].powi(3)
    }

    #[test]
    fn jet_matches_finite_differences() {
        let p = [0.3, -0.7, 1.1];
        let j = sample(Jet::variables(p));
        assert!((j.v - sample(p)).abs() < 1e-15);
        let step = 1e-5;
        for a in 0..3 {
            let mut xp = p;
            let mut xm = p;
            xp[a] += step;
            xm[a] -= step;
            let fd = (sample(xp) - sample(xm)) / (2.0 * step);
            assert!((fd - j.g[a]).abs() < 1e-8, "grad {a}");
            for b in 0..3 {
                let jp = sample(Jet::variables(xp));
                let jm = sample(Jet::variables(xm));
                let fd2 = (jp.g[b] - jm.g[b]) / (2.0 * step);
                assert!((fd2 - j.h[a][b]).abs() < 1e-7, "hess {a}{b}");
            }
        }
    }

    #[test]
    fn division_and_powers() {
        let p = [0.5, 2.0, -1.5];
        let x = Jet::variables(p);
        let q = x[0] / x[1];
        assert!((q.v - 0.25).abs() < 1e-15);
        assert!((q.g[0] - 0.5).abs() < 1e-15);
        assert!((q.g[1] + 0.125).abs() < 1e-15);
        assert!((q.h[1][1] - 2.0 * 0.5 / 8.0).abs() < 1e-15);
        let c = x[2].powi(3);
        assert!((c.h[2][2] - 6.0 * -1.5).abs() < 1e-14);
    }
}
