//! The Randers metric generated by navigation data (h, W).
//!
//! With b = ||W||_h < 1 and lambda = 1 - b^2, the metric solving the
//! unit-time drift problem is
//!
//! ```text
//! F(x, y) = (sqrt(lambda h(y)^2 + w0^2) - w0) / lambda,     w0 = <W, y>_h,
//! ```
//!
//! which is also F = alpha + beta for
//!
//! ```text
//! a_ij = (lambda h_ij + w_i w_j) / lambda^2,     b_i = -w_i / lambda.
//! ```
//!
//! Every public evaluation computes both routes and insists they agree;
//! the determinant identity det a = det h / lambda^{n+1} and the volume
//! identity sigma_BH = sqrt(det h) are asserted the same way. A failed
//! assertion here means the navigation algebra is wrong, not that the
//! input is bad, so those paths return `ConsistencyCheck`.

mod calculus;
mod spray;

pub use calculus::GradientData;
pub use spray::SprayData;

use crate::dual::{seed, Dual, Real};
use crate::error::{GeomError, Result};
use crate::linalg::{SMat, SymMatrix};
use crate::space_form::SpaceForm;
use crate::vector_field::VectorFieldSpec;
use nalgebra::DMatrix;

/// Navigation data: a space form and a drift field with ||W||_h < 1.
#[derive(Clone, Debug)]
pub struct NavigationSpec {
    space: SpaceForm,
    w: VectorFieldSpec,
}

impl NavigationSpec {
    pub fn new(space: SpaceForm, w: VectorFieldSpec) -> Result<Self> {
        w.validate_dims(&space)?;
        Ok(NavigationSpec { space, w })
    }

    pub fn space(&self) -> &SpaceForm {
        &self.space
    }

    pub fn field(&self) -> &VectorFieldSpec {
        &self.w
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }
}

/// Per-point navigation quantities, generic over the scalar tower.
#[derive(Clone, Debug)]
pub struct NavCache<S> {
    pub h: SMat<S>,
    pub h_inv: SMat<S>,
    pub w_up: Vec<S>,
    pub w_dn: Vec<S>,
    pub b2: S,
    pub lambda: S,
    /// Randers data a_ij and b_i.
    pub a: SMat<S>,
    pub b_form: Vec<S>,
}

impl<S: Real> NavCache<S> {
    /// h-norm of y.
    pub fn h_norm(&self, y: &[S]) -> S {
        self.h.bilinear(y, y).sqrt()
    }

    /// alpha(y) = sqrt(a_ij y^i y^j).
    pub fn alpha(&self, y: &[S]) -> S {
        self.a.bilinear(y, y).sqrt()
    }

    /// beta(y) = b_i y^i.
    pub fn beta(&self, y: &[S]) -> S {
        crate::linalg::dot(&self.b_form, y)
    }

    /// Navigation form of F.
    pub fn f_nav(&self, y: &[S]) -> S {
        let h2 = self.h.bilinear(y, y);
        let w0 = crate::linalg::dot(&self.w_dn, y);
        ((self.lambda.clone() * h2 + w0.clone() * w0.clone()).sqrt() - w0)
            / self.lambda.clone()
    }

    /// dF/dy^i = alpha_{y^i} + b_i, from the Randers form.
    pub fn f_y(&self, y: &[S]) -> Vec<S> {
        let ay = self.a.mul_vec(y);
        let alpha = self.alpha(y);
        ay.iter()
            .zip(&self.b_form)
            .map(|(ayi, bi)| ayi.clone() / alpha.clone() + bi.clone())
            .collect()
    }

    /// Fundamental tensor g_ij(x, y) in closed form:
    /// g = (F/alpha)(a - alpha_y alpha_y^T) + F_y F_y^T.
    pub fn fundamental(&self, y: &[S]) -> SMat<S> {
        let n = self.b_form.len();
        let ay = self.a.mul_vec(y);
        let alpha = self.alpha(y);
        let alpha_y: Vec<S> = ay.iter().map(|v| v.clone() / alpha.clone()).collect();
        let f = self.f_nav(y);
        let f_y: Vec<S> = alpha_y
            .iter()
            .zip(&self.b_form)
            .map(|(ai, bi)| ai.clone() + bi.clone())
            .collect();
        let scale = f / alpha;
        SMat::from_fn(n, n, |i, j| {
            scale.clone() * (self.a[(i, j)].clone() - alpha_y[i].clone() * alpha_y[j].clone())
                + f_y[i].clone() * f_y[j].clone()
        })
    }

    /// Dual norm F*(xi) = sqrt(h^{ij} xi_i xi_j) + w^i xi_i.
    pub fn f_dual(&self, xi: &[S]) -> S {
        self.h_inv.bilinear(xi, xi).sqrt() + crate::linalg::dot(&self.w_up, xi)
    }

    /// Inverse Legendre map in closed form:
    /// y^i = F*(xi) (h^{ij} xi_j / h*(xi) + w^i).
    pub fn legendre_inverse(&self, xi: &[S]) -> Vec<S> {
        let h_up = self.h_inv.mul_vec(xi);
        let h_star = self.h_inv.bilinear(xi, xi).sqrt();
        let f_star = h_star.clone() + crate::linalg::dot(&self.w_up, xi);
        h_up.iter()
            .zip(&self.w_up)
            .map(|(hi, wi)| f_star.clone() * (hi.clone() / h_star.clone() + wi.clone()))
            .collect()
    }
}

/// Forward Randers metric from navigation data. Immutable; every
/// operation is a pure function of (x, y). Backward quantities are
/// obtained by evaluating at -y.
#[derive(Clone, Debug)]
pub struct RandersMetric {
    nav: NavigationSpec,
}

impl RandersMetric {
    pub fn new(nav: NavigationSpec) -> Self {
        RandersMetric { nav }
    }

    pub fn from_parts(space: SpaceForm, w: VectorFieldSpec) -> Result<Self> {
        Ok(Self::new(NavigationSpec::new(space, w)?))
    }

    /// Riemannian comparison metric (same space, zero drift).
    pub fn riemannian(space: SpaceForm) -> Self {
        let w = VectorFieldSpec::zero(space.dim());
        RandersMetric {
            nav: NavigationSpec { space, w },
        }
    }

    pub fn nav(&self) -> &NavigationSpec {
        &self.nav
    }

    pub fn space(&self) -> &SpaceForm {
        &self.nav.space
    }

    pub fn field(&self) -> &VectorFieldSpec {
        &self.nav.w
    }

    pub fn dim(&self) -> usize {
        self.nav.dim()
    }

    /// Navigation cache at a generic point. Rejects points outside the
    /// chart or where the drift reaches unit speed.
    pub fn cache<S: Real>(&self, x: &[S]) -> Result<NavCache<S>> {
        let xv: Vec<f64> = x.iter().map(|v| v.value()).collect();
        if !self.nav.space.contains(&xv) {
            return Err(GeomError::OutsideDomain(xv));
        }
        let n = self.dim();
        let h = self.nav.space.metric(x);
        let h_inv = self.nav.space.metric_inv(x);
        let w_up = self.nav.w.eval(&self.nav.space, x);
        let w_dn = h.mul_vec(&w_up);
        let b2 = crate::linalg::dot(&w_dn, &w_up);
        let lambda = S::one() - b2.clone();
        if lambda.value() <= 0.0 {
            return Err(GeomError::NavigationDomain {
                speed: b2.value().max(0.0).sqrt(),
                point: xv,
            });
        }
        let inv_l2 = S::one() / (lambda.clone() * lambda.clone());
        let a = SMat::from_fn(n, n, |i, j| {
            (lambda.clone() * h[(i, j)].clone() + w_dn[i].clone() * w_dn[j].clone())
                * inv_l2.clone()
        });
        let b_form: Vec<S> = w_dn
            .iter()
            .map(|wi| -(wi.clone() / lambda.clone()))
            .collect();
        Ok(NavCache {
            h,
            h_inv,
            w_up,
            w_dn,
            b2,
            lambda,
            a,
            b_form,
        })
    }

    fn require_nonzero(y: &[f64]) -> Result<()> {
        if y.iter().map(|v| v * v).sum::<f64>() == 0.0 {
            Err(GeomError::ZeroDirection)
        } else {
            Ok(())
        }
    }

    /// F(x, y), evaluated through the navigation form and through
    /// alpha + beta; the two must agree to 1e-12 relative.
    pub fn f_value(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        Self::require_nonzero(y)?;
        let cache = self.cache(x)?;
        let f_nav = cache.f_nav(y);
        let f_ab = cache.alpha(y) + cache.beta(y);
        if (f_nav - f_ab).abs() > 1e-12 * f_nav.abs().max(1e-300) {
            return Err(GeomError::ConsistencyCheck(format!(
                "navigation form {} and alpha+beta {} disagree at x={:?}, y={:?}",
                f_nav, f_ab, x, y
            )));
        }
        Ok(f_nav)
    }

    /// g_ij(x, y) in closed form, cross-checked against the autodiff
    /// Hessian (1/2) d^2(F^2)/dy dy.
    pub fn fundamental_tensor(&self, x: &[f64], y: &[f64]) -> Result<SymMatrix> {
        Self::require_nonzero(y)?;
        let cache = self.cache(x)?;
        let g = cache.fundamental(y);

        let cache_d2 = self.cache(&crate::dual::lift(&crate::dual::lift(x)))?;
        let n = self.dim();
        let yd: Vec<Dual<Dual<f64>>> = seed(&seed(y))
            .into_iter()
            .enumerate()
            .map(|(i, v)| Dual::variable(v.re, i, n))
            .collect();
        let f = cache_d2.f_nav(&yd);
        let f2 = f.clone() * f;
        let mut scale: f64 = 1.0;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let hess = 0.5 * f2.d(i).d(j);
                scale = scale.max(g[(i, j)].abs());
                worst = worst.max((g[(i, j)] - hess).abs());
            }
        }
        if worst > 1e-9 * scale {
            return Err(GeomError::ConsistencyCheck(format!(
                "fundamental tensor closed form deviates from the F^2 Hessian by {:.3e}",
                worst
            )));
        }
        Ok(SymMatrix::from_smat(&g))
    }

    /// Cartan tensor C_ijk = (1/2) dg_ij/dy^k, indexed `[k][(i, j)]`.
    pub fn cartan_tensor(&self, x: &[f64], y: &[f64]) -> Result<Vec<DMatrix<f64>>> {
        Self::require_nonzero(y)?;
        let cache = self.cache(&crate::dual::lift(x))?;
        let yd = seed(y);
        let g = cache.fundamental(&yd);
        let n = self.dim();
        Ok((0..n)
            .map(|k| DMatrix::from_fn(n, n, |i, j| 0.5 * g[(i, j)].d(k)))
            .collect())
    }

    /// Dual norm F*(xi); errors if xi lies outside the forward cone.
    pub fn dual_norm(&self, x: &[f64], xi: &[f64]) -> Result<f64> {
        Self::require_nonzero(xi)?;
        let cache = self.cache(x)?;
        let f = cache.f_dual(xi);
        if f <= 0.0 {
            return Err(GeomError::OutsideDualCone(f));
        }
        Ok(f)
    }

    /// Legendre transform L(y)_i = F(y) dF/dy^i.
    pub fn legendre(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        Self::require_nonzero(y)?;
        let cache = self.cache(x)?;
        let f = cache.f_nav(y);
        Ok(cache.f_y(y).into_iter().map(|fy| f * fy).collect())
    }

    /// Inverse Legendre transform L^{-1}(xi)^i = F*(xi) dF*/dxi_i.
    pub fn legendre_inverse(&self, x: &[f64], xi: &[f64]) -> Result<Vec<f64>> {
        Self::require_nonzero(xi)?;
        let cache = self.cache(x)?;
        let f_star = cache.f_dual(xi);
        if f_star <= 0.0 {
            return Err(GeomError::OutsideDualCone(f_star));
        }
        Ok(cache.legendre_inverse(xi))
    }

    /// Busemann-Hausdorff density sigma(x) = (1 - ||b||_a^2)^{(n+1)/2}
    /// sqrt(det a), asserted equal to sqrt(det h).
    pub fn bh_density(&self, x: &[f64]) -> Result<f64> {
        let cache = self.cache(x)?;
        let n = self.dim() as i32;
        let det_a = cache.a.det();
        let a_inv = cache.a.inverse()?;
        let b_norm2 = a_inv.bilinear(&cache.b_form, &cache.b_form);
        let sigma = (1.0 - b_norm2).sqrt().powi(n + 1) * det_a.sqrt();
        let sqrt_det_h = self.nav.space.volume_density(x);
        if (sigma - sqrt_det_h).abs() > 1e-10 * sqrt_det_h.max(1.0) {
            return Err(GeomError::ConsistencyCheck(format!(
                "volume density {} deviates from sqrt(det h) = {}",
                sigma, sqrt_det_h
            )));
        }
        Ok(sigma)
    }

    /// det(a) * lambda^{n+1} / det(h) - 1; an algebraic regression guard
    /// that must vanish to round-off.
    pub fn det_identity_residual(&self, x: &[f64]) -> Result<f64> {
        let cache = self.cache(x)?;
        let n = self.dim() as i32;
        let det_a = cache.a.det();
        let det_h = cache.h.det();
        Ok((det_a * cache.lambda.powi(n + 1) / det_h - 1.0).abs())
    }
}
