//! Nonlinear gradient and Laplacian of scalar functions.
//!
//! The gradient is the inverse Legendre image of df. The Laplacian is the
//! divergence of the gradient with respect to the Busemann-Hausdorff
//! volume; it is computed both as the divergence form
//! (1/sigma) d_i (sigma (grad f)^i) and as the Chern trace form
//! tr(D grad f) - S(grad f), and the two must agree before the value is
//! released. The divergence form is the returned one.

use super::RandersMetric;
use crate::config::Tolerances;
use crate::dual::{seed, Real, D1};
use crate::error::{GeomError, Result};
use crate::field::ScalarField;

/// Gradient of a function at a point, with the scalar invariants that
/// come along for free.
#[derive(Clone, Debug)]
pub struct GradientData {
    /// (grad f)^i = F*(df) (h^{ij} f_j / h*(df) + w^i).
    pub vector: Vec<f64>,
    /// Differential df.
    pub df: Vec<f64>,
    /// |df|_h.
    pub df_norm_h: f64,
    /// F(grad f) = F*(df).
    pub f_of_grad: f64,
    /// df(W), the drift derivative of f.
    pub df_of_w: f64,
}

impl RandersMetric {
    /// Gradient as a generic map of the base point; `f` is differentiated
    /// one dual level deeper than `x`.
    pub fn gradient_generic<S: Real>(&self, f: &ScalarField, x: &[S]) -> Result<Vec<S>> {
        let n = self.dim();
        let fd = f.eval(&seed(x));
        let df: Vec<S> = (0..n).map(|i| fd.d(i)).collect();
        let cache = self.cache(x)?;
        Ok(cache.legendre_inverse(&df))
    }

    /// Gradient, dual norm and drift derivative of `f` at `x`. Errors on
    /// critical points of f.
    pub fn finsler_gradient(&self, f: &ScalarField, x: &[f64]) -> Result<GradientData> {
        let n = self.dim();
        let fd = f.eval(&seed(x));
        let df: Vec<f64> = (0..n).map(|i| fd.d(i)).collect();
        let cache = self.cache(x)?;
        let df_norm_h = cache.h_inv.bilinear(&df, &df).max(0.0).sqrt();
        if df_norm_h < Tolerances::default().critical_gradient {
            return Err(GeomError::CriticalPoint(df_norm_h));
        }
        let f_star = cache.f_dual(&df);
        if f_star <= 0.0 {
            return Err(GeomError::OutsideDualCone(f_star));
        }
        let vector = cache.legendre_inverse(&df);
        let df_of_w = crate::linalg::dot(&df, &cache.w_up);
        Ok(GradientData {
            vector,
            df,
            df_norm_h,
            f_of_grad: f_star,
            df_of_w,
        })
    }

    /// Laplacian of `f` at `x`. Both routes are evaluated on every call;
    /// disagreement is an internal bug and surfaces as `ConsistencyCheck`.
    pub fn finsler_laplacian(&self, f: &ScalarField, x: &[f64], tol: &Tolerances) -> Result<f64> {
        let n = self.dim();
        let grad = self.finsler_gradient(f, x)?;

        // Divergence form: seed the base point and differentiate the
        // closed-form gradient field together with ln sigma.
        let xd: Vec<D1> = seed(x);
        let grad_d: Vec<D1> = self.gradient_generic(f, &xd)?;
        let sigma_d: D1 = self.space().volume_density(&xd);
        let ln_sigma = sigma_d.ln();
        let mut div = 0.0;
        for i in 0..n {
            div += grad_d[i].d(i) + grad_d[i].value() * ln_sigma.d(i);
        }
        // The divergence form uses sigma = sqrt(det h); pin the identity
        // with the Busemann-Hausdorff closed form at this point.
        self.bh_density(x)?;

        // Trace form: tr of X |-> D^{grad f}_X grad f minus the
        // S-curvature at the gradient.
        let y = &grad.vector;
        let spray = self.spray(x, y)?;
        let s = self.s_curvature(x, y)?;
        let mut trace = 0.0;
        for i in 0..n {
            trace += grad_d[i].d(i);
            for k in 0..n {
                trace += spray.gamma[i][(i, k)] * y[k];
            }
        }
        trace -= s;

        if (div - trace).abs() > tol.laplacian_cross * div.abs().max(1.0) {
            return Err(GeomError::ConsistencyCheck(format!(
                "divergence-form Laplacian {} deviates from trace form {} at {:?}",
                div, trace, x
            )));
        }
        Ok(div)
    }
}
