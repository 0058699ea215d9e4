//! Twice-differentiable scalar fields on a chart or on the extrinsic
//! unit sphere. A field is data (a parsed expression, a named builtin,
//! or a homogeneous ambient function), so it can be evaluated inside any
//! dual-number tower.

use crate::dual::Real;
use crate::error::{GeomError, Result};
use crate::expr::{parse_expr, ExprAst};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug, PartialEq)]
pub enum Builtin {
    /// x_i (0-based).
    Coordinate(usize),
    /// |x|^2
    NormSq,
    /// |x|^2 / 2
    HalfNormSq,
    /// |x| (away from the origin)
    Norm,
    /// c . x
    Linear(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum ScalarField {
    Expr(ExprAst),
    Builtin(Builtin),
    /// Homogeneous function of the ambient coordinates, used extrinsically
    /// on the unit sphere S^n in R^{n+1}.
    Homogeneous { phi: ExprAst, degree: i32 },
    /// Chart-side restriction of an ambient function: the chart point is
    /// mapped onto the unit sphere by inverse stereographic projection
    /// before `phi` is evaluated.
    SpherePullback { phi: ExprAst },
}

impl ScalarField {
    pub fn expr(text: &str) -> Result<Self> {
        Ok(ScalarField::Expr(parse_expr(text)?))
    }

    pub fn coordinate(i: usize) -> Self {
        ScalarField::Builtin(Builtin::Coordinate(i))
    }

    pub fn norm_sq() -> Self {
        ScalarField::Builtin(Builtin::NormSq)
    }

    pub fn homogeneous(text: &str, degree: i32) -> Result<Self> {
        Ok(ScalarField::Homogeneous {
            phi: parse_expr(text)?,
            degree,
        })
    }

    pub fn eval<S: Real>(&self, x: &[S]) -> S {
        match self {
            ScalarField::Expr(ast) => ast.eval(x),
            ScalarField::Builtin(b) => match b {
                Builtin::Coordinate(i) => x[*i].clone(),
                Builtin::NormSq => crate::linalg::dot(x, x),
                Builtin::HalfNormSq => crate::linalg::dot(x, x) * S::constant(0.5),
                Builtin::Norm => crate::linalg::dot(x, x).sqrt(),
                Builtin::Linear(c) => {
                    let mut acc = S::zero();
                    for (ci, xi) in c.iter().zip(x) {
                        acc = acc + S::constant(*ci) * xi.clone();
                    }
                    acc
                }
            },
            ScalarField::Homogeneous { phi, .. } => phi.eval(x),
            ScalarField::SpherePullback { phi } => {
                let eta = inverse_stereographic(x);
                phi.eval(&eta)
            }
        }
    }

    /// Minimum chart (or ambient) dimension the field makes sense on.
    pub fn min_dim(&self) -> usize {
        match self {
            ScalarField::Expr(ast) => ast.min_dim(),
            ScalarField::Builtin(b) => match b {
                Builtin::Coordinate(i) => i + 1,
                Builtin::Linear(c) => c.len(),
                _ => 1,
            },
            ScalarField::Homogeneous { phi, .. } => phi.min_dim(),
            ScalarField::SpherePullback { phi } => phi.min_dim().saturating_sub(1).max(1),
        }
    }

    pub fn degree(&self) -> Option<i32> {
        match self {
            ScalarField::Homogeneous { degree, .. } => Some(*degree),
            _ => None,
        }
    }

    /// Checks Phi(t x) = t^k Phi(x) at seeded random samples.
    pub fn verify_homogeneous(&self, ambient_dim: usize, seed: u64) -> Result<()> {
        let (phi, k) = match self {
            ScalarField::Homogeneous { phi, degree } => (phi, *degree),
            _ => {
                return Err(GeomError::UnsupportedHypothesis(
                    "homogeneity check on a non-homogeneous field".into(),
                ))
            }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..32 {
            let x: Vec<f64> = (0..ambient_dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let t: f64 = rng.gen_range(0.2..2.0);
            let tx: Vec<f64> = x.iter().map(|v| v * t).collect();
            let lhs = phi.eval(&tx);
            let rhs = t.powi(k) * phi.eval(&x);
            let scale = 1.0f64.max(rhs.abs());
            if (lhs - rhs).abs() > 1e-9 * scale {
                return Err(GeomError::ConsistencyCheck(format!(
                    "field is not {}-homogeneous: |{} - {}| at t = {}",
                    k, lhs, rhs, t
                )));
            }
        }
        Ok(())
    }
}

/// Chart point -> unit-sphere point via inverse stereographic projection
/// (projection pole at the last ambient axis).
pub fn inverse_stereographic<S: Real>(x: &[S]) -> Vec<S> {
    let norm2 = crate::linalg::dot(x, x);
    let denom = S::one() / (norm2.clone() + S::one());
    let mut eta: Vec<S> = x
        .iter()
        .map(|xi| S::constant(2.0) * xi.clone() * denom.clone())
        .collect();
    eta.push((norm2 - S::one()) * denom);
    eta
}

/// Unit-sphere point (away from the projection pole) -> chart point.
pub fn stereographic<S: Real>(eta: &[S]) -> Vec<S> {
    let n = eta.len() - 1;
    let denom = S::one() / (S::one() - eta[n].clone());
    eta[..n]
        .iter()
        .map(|e| e.clone() * denom.clone())
        .collect()
}
