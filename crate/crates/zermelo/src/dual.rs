//! Nested forward-mode automatic differentiation.
//!
//! Every geometric quantity in this crate is written against the [`Real`]
//! scalar trait. Instantiating at [`Dual<f64>`] yields first derivatives,
//! at [`Dual<Dual<f64>>`] second derivatives, and so on. Dimensions here
//! are small (charts up to ~8 coordinates), so a multivariate dual with a
//! plain `Vec` of partials is fast enough and keeps the tower uniform.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Scalar type that supports the arithmetic and elementary functions used
/// by the chart metrics, navigation algebra and expression evaluator.
pub trait Real:
    Clone
    + Debug
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn constant(c: f64) -> Self;

    /// Principal value with all derivative information stripped.
    fn value(&self) -> f64;

    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;

    fn zero() -> Self {
        Self::constant(0.0)
    }

    fn one() -> Self {
        Self::constant(1.0)
    }

    /// Integer power, including negative exponents.
    fn powi(&self, k: i32) -> Self {
        if k < 0 {
            return Self::one() / self.powi(-k);
        }
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = k as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }
}

impl Real for f64 {
    fn constant(c: f64) -> Self {
        c
    }

    fn value(&self) -> f64 {
        *self
    }

    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }

    fn exp(&self) -> Self {
        f64::exp(*self)
    }

    fn ln(&self) -> Self {
        f64::ln(*self)
    }

    fn sin(&self) -> Self {
        f64::sin(*self)
    }

    fn cos(&self) -> Self {
        f64::cos(*self)
    }
}

/// Multivariate dual number: value plus partial derivatives with respect
/// to the seeded variables. Constants carry an empty partials vector and
/// broadcast against seeded operands, so `Real::constant` needs no
/// knowledge of the variable count.
#[derive(Clone, Debug)]
pub struct Dual<S> {
    pub re: S,
    pub eps: Vec<S>,
}

/// First-, second- and third-derivative towers over `f64`.
pub type D1 = Dual<f64>;
pub type D2 = Dual<D1>;
pub type D3 = Dual<D2>;

impl<S: Real> Dual<S> {
    pub fn new(re: S, eps: Vec<S>) -> Self {
        Dual { re, eps }
    }

    /// Variable `index` out of `nvars`: unit derivative seed.
    pub fn variable(re: S, index: usize, nvars: usize) -> Self {
        let mut eps = vec![S::zero(); nvars];
        eps[index] = S::one();
        Dual { re, eps }
    }

    /// Partial derivative with respect to seeded variable `i` (zero for
    /// constants that never saw that variable).
    pub fn d(&self, i: usize) -> S {
        self.eps.get(i).cloned().unwrap_or_else(S::zero)
    }

    fn zip_eps(a: &[S], b: &[S], mut f: impl FnMut(S, S) -> S) -> Vec<S> {
        let n = a.len().max(b.len());
        (0..n)
            .map(|i| {
                let ai = a.get(i).cloned().unwrap_or_else(S::zero);
                let bi = b.get(i).cloned().unwrap_or_else(S::zero);
                f(ai, bi)
            })
            .collect()
    }

    fn map_eps(&self, mut f: impl FnMut(&S) -> S) -> Vec<S> {
        self.eps.iter().map(|e| f(e)).collect()
    }
}

impl<S: Real> Add for Dual<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Dual {
            re: self.re + rhs.re,
            eps: Self::zip_eps(&self.eps, &rhs.eps, |a, b| a + b),
        }
    }
}

impl<S: Real> Sub for Dual<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Dual {
            re: self.re - rhs.re,
            eps: Self::zip_eps(&self.eps, &rhs.eps, |a, b| a - b),
        }
    }
}

impl<S: Real> Mul for Dual<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let eps = Self::zip_eps(&self.eps, &rhs.eps, |a, b| {
            a * rhs.re.clone() + self.re.clone() * b
        });
        Dual {
            re: self.re * rhs.re,
            eps,
        }
    }
}

impl<S: Real> Div for Dual<S> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        // (f/g)' = (f'g - fg')/g^2
        let inv = S::one() / rhs.re.clone();
        let inv2 = inv.clone() * inv.clone();
        let eps = Self::zip_eps(&self.eps, &rhs.eps, |a, b| {
            (a * rhs.re.clone() - self.re.clone() * b) * inv2.clone()
        });
        Dual {
            re: self.re * inv,
            eps,
        }
    }
}

impl<S: Real> Neg for Dual<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual {
            re: -self.re,
            eps: self.eps.into_iter().map(|e| -e).collect(),
        }
    }
}

impl<S: Real> Real for Dual<S> {
    fn constant(c: f64) -> Self {
        Dual {
            re: S::constant(c),
            eps: Vec::new(),
        }
    }

    fn value(&self) -> f64 {
        self.re.value()
    }

    fn sqrt(&self) -> Self {
        let r = self.re.sqrt();
        let half_inv = S::constant(0.5) / r.clone();
        Dual {
            re: r,
            eps: self.map_eps(|e| e.clone() * half_inv.clone()),
        }
    }

    fn exp(&self) -> Self {
        let v = self.re.exp();
        Dual {
            re: v.clone(),
            eps: self.map_eps(|e| e.clone() * v.clone()),
        }
    }

    fn ln(&self) -> Self {
        let inv = S::one() / self.re.clone();
        Dual {
            re: self.re.ln(),
            eps: self.map_eps(|e| e.clone() * inv.clone()),
        }
    }

    fn sin(&self) -> Self {
        let c = self.re.cos();
        Dual {
            re: self.re.sin(),
            eps: self.map_eps(|e| e.clone() * c.clone()),
        }
    }

    fn cos(&self) -> Self {
        let ms = -self.re.sin();
        Dual {
            re: self.re.cos(),
            eps: self.map_eps(|e| e.clone() * ms.clone()),
        }
    }
}

/// Seed all coordinates of `x` as independent variables of one dual level.
pub fn seed<S: Real>(x: &[S]) -> Vec<Dual<S>> {
    let n = x.len();
    x.iter()
        .enumerate()
        .map(|(i, xi)| Dual::variable(xi.clone(), i, n))
        .collect()
}

/// Lift values into the dual level without seeding (zero derivative).
pub fn lift<S: Real>(x: &[S]) -> Vec<Dual<S>> {
    x.iter().map(|xi| Dual::new(xi.clone(), Vec::new())).collect()
}

/// Value and gradient of a scalar map at `x`, one dual level deep.
pub fn gradient<S: Real>(f: impl FnOnce(&[Dual<S>]) -> Dual<S>, x: &[S]) -> (S, Vec<S>) {
    let out = f(&seed(x));
    let g = (0..x.len()).map(|i| out.d(i)).collect();
    (out.re, g)
}

/// Value and Jacobian (rows = outputs, cols = inputs) of a vector map.
pub fn jacobian<S: Real>(
    f: impl FnOnce(&[Dual<S>]) -> Vec<Dual<S>>,
    x: &[S],
) -> (Vec<S>, Vec<Vec<S>>) {
    let out = f(&seed(x));
    let vals = out.iter().map(|o| o.re.clone()).collect();
    let jac = out
        .iter()
        .map(|o| (0..x.len()).map(|j| o.d(j)).collect())
        .collect();
    (vals, jac)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly<S: Real>(x: &[S]) -> S {
        // x0^2 * x1 + sin(x0)
        x[0].clone() * x[0].clone() * x[1].clone() + x[0].sin()
    }

    #[test]
    fn first_derivatives() {
        let (v, g) = gradient(poly, &[1.0f64, 2.0]);
        assert!((v - (2.0 + 1.0f64.sin())).abs() < 1e-15);
        assert!((g[0] - (4.0 + 1.0f64.cos())).abs() < 1e-15);
        assert!((g[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn second_derivatives_symmetric() {
        let x = [1.3f64, -0.7];
        let outer = seed(&x);
        let inner: Vec<D2> = outer
            .iter()
            .enumerate()
            .map(|(i, xi)| Dual::variable(xi.clone(), i, x.len()))
            .collect();
        let out = poly(&inner);
        let h01 = out.d(0).d(1);
        let h10 = out.d(1).d(0);
        assert!((h01 - h10).abs() < 1e-14);
        // d2/dx0dx1 (x0^2 x1) = 2 x0
        assert!((h01 - 2.0 * 1.3).abs() < 1e-13);
    }

    #[test]
    fn quotient_and_sqrt_rules() {
        let f = |x: &[D1]| (x[0].sqrt() + Real::constant(1.0)) / x[0].clone();
        let (v, g) = gradient(f, &[4.0f64]);
        assert!((v - 0.75).abs() < 1e-15);
        // d/dx (x^{-1/2} + x^{-1}) = -1/2 x^{-3/2} - x^{-2}
        let expect = -0.5 * 4.0f64.powf(-1.5) - 4.0f64.powf(-2.0);
        assert!((g[0] - expect).abs() < 1e-15);
    }

    #[test]
    fn powi_handles_negative_exponents() {
        let x = 2.0f64;
        assert!((x.powi(-3) - 0.125).abs() < 1e-15);
        let d = Dual::<f64>::variable(2.0, 0, 1);
        let y = d.powi(-2);
        assert!((y.re - 0.25).abs() < 1e-15);
        assert!((y.d(0) + 2.0 * 2.0f64.powi(-3)).abs() < 1e-15);
    }
}
