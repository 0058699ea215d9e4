//! Chart-based Riemannian space forms of constant sectional curvature.
//!
//! All three charts are conformal, h = rho^2 * delta:
//!
//! * `Cartesian` (curvature 0): rho = 1 on all of R^n.
//! * `PoincareBall` (curvature c < 0): rho = 2 / (sqrt(-c) (1 - |x|^2))
//!   on the open unit ball.
//! * `Stereographic` (curvature c > 0): rho = 2 / (sqrt(c) (1 + |x|^2))
//!   on all of R^n (the sphere minus the projection pole).
//!
//! Christoffel symbols come from autodiff of h rather than the conformal
//! closed form, and a sampled Riemann-tensor check pins each chart's
//! curvature to its declared value.

use crate::dual::{seed, Real};
use crate::error::{GeomError, Result};
use crate::field::ScalarField;
use crate::jet::eval_jet2;
use crate::linalg::{SMat, SymMatrix};
use nalgebra::DMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chart {
    Cartesian,
    PoincareBall,
    Stereographic,
}

#[derive(Clone, Debug)]
pub struct SpaceForm {
    dim: usize,
    curvature: f64,
    chart: Chart,
}

impl SpaceForm {
    /// Chart is chosen by the sign of the curvature.
    pub fn new(dim: usize, curvature: f64) -> Self {
        assert!(dim >= 1, "space form needs at least one dimension");
        let chart = if curvature > 0.0 {
            Chart::Stereographic
        } else if curvature < 0.0 {
            Chart::PoincareBall
        } else {
            Chart::Cartesian
        };
        SpaceForm {
            dim,
            curvature,
            chart,
        }
    }

    pub fn euclidean(dim: usize) -> Self {
        Self::new(dim, 0.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn curvature(&self) -> f64 {
        self.curvature
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim {
            return false;
        }
        match self.chart {
            Chart::Cartesian | Chart::Stereographic => true,
            Chart::PoincareBall => x.iter().map(|v| v * v).sum::<f64>() < 1.0,
        }
    }

    fn check_domain(&self, x: &[f64]) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(GeomError::OutsideDomain(x.to_vec()))
        }
    }

    /// Conformal factor rho with h = rho^2 delta.
    pub fn conformal_factor<S: Real>(&self, x: &[S]) -> S {
        match self.chart {
            Chart::Cartesian => S::one(),
            Chart::PoincareBall => {
                let r2 = crate::linalg::dot(x, x);
                S::constant(2.0 / (-self.curvature).sqrt()) / (S::one() - r2)
            }
            Chart::Stereographic => {
                let r2 = crate::linalg::dot(x, x);
                S::constant(2.0 / self.curvature.sqrt()) / (S::one() + r2)
            }
        }
    }

    pub fn metric<S: Real>(&self, x: &[S]) -> SMat<S> {
        let rho = self.conformal_factor(x);
        let rho2 = rho.clone() * rho;
        let mut m = SMat::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            m[(i, i)] = rho2.clone();
        }
        m
    }

    pub fn metric_inv<S: Real>(&self, x: &[S]) -> SMat<S> {
        let rho = self.conformal_factor(x);
        let inv = S::one() / (rho.clone() * rho);
        let mut m = SMat::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            m[(i, i)] = inv.clone();
        }
        m
    }

    /// sqrt(det h) = rho^n; this is also the Busemann-Hausdorff density of
    /// every Randers metric navigated on this space.
    pub fn volume_density<S: Real>(&self, x: &[S]) -> S {
        self.conformal_factor(x).powi(self.dim as i32)
    }

    /// h_ij at x as a checked public value.
    pub fn metric_at(&self, x: &[f64]) -> Result<SymMatrix> {
        self.check_domain(x)?;
        Ok(SymMatrix::from_smat(&self.metric(x)))
    }

    /// Levi-Civita symbols Gamma^i_{jk} from autodiff of h_ij; the result
    /// is indexed `[i][(j, k)]` and symmetric in (j, k).
    pub fn christoffel<S: Real>(&self, x: &[S]) -> Vec<SMat<S>> {
        let n = self.dim;
        let xd = seed(x);
        let hd = self.metric(&xd);
        let h_inv = self.metric_inv(x);
        let dh = |i: usize, j: usize, k: usize| hd[(i, j)].d(k);
        (0..n)
            .map(|i| {
                SMat::from_fn(n, n, |j, k| {
                    let mut acc = S::zero();
                    for l in 0..n {
                        let term = dh(l, k, j) + dh(l, j, k) - dh(j, k, l);
                        acc = acc + h_inv[(i, l)].clone() * term;
                    }
                    acc * S::constant(0.5)
                })
            })
            .collect()
    }

    pub fn christoffel_at(&self, x: &[f64]) -> Result<Vec<DMatrix<f64>>> {
        self.check_domain(x)?;
        Ok(self
            .christoffel(x)
            .iter()
            .map(|g| g.to_f64())
            .collect())
    }

    /// Residual of metric compatibility h_{ij|k} = 0 (max entry).
    pub fn metric_compat_residual(&self, x: &[f64]) -> Result<f64> {
        self.check_domain(x)?;
        let n = self.dim;
        let xd = seed(x);
        let hd = self.metric(&xd);
        let h = self.metric(x);
        let gamma = self.christoffel(x);
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut cov = hd[(i, j)].d(k);
                    for l in 0..n {
                        cov -= gamma[l][(k, i)] * h[(l, j)] + gamma[l][(k, j)] * h[(i, l)];
                    }
                    worst = worst.max(cov.abs());
                }
            }
        }
        Ok(worst)
    }

    /// Riemannian gradient, Hessian and Laplacian of a scalar field.
    pub fn grad_hess_lap(
        &self,
        f: &ScalarField,
        x: &[f64],
    ) -> Result<(Vec<f64>, DMatrix<f64>, f64)> {
        self.check_domain(x)?;
        let n = self.dim;
        let jet = eval_jet2(f, x)?;
        let h_inv = self.metric_inv(x);
        let gamma = self.christoffel(x);
        let grad = h_inv.mul_vec(&jet.grad);
        let mut hess = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut v = jet.hess[(i, j)];
                for k in 0..n {
                    v -= gamma[k][(i, j)] * jet.grad[k];
                }
                hess[(i, j)] = v;
            }
        }
        let mut lap = 0.0;
        for i in 0..n {
            for j in 0..n {
                lap += h_inv[(i, j)] * hess[(i, j)];
            }
        }
        Ok((grad, hess, lap))
    }

    /// |df|_h at x.
    pub fn grad_norm(&self, f: &ScalarField, x: &[f64]) -> Result<f64> {
        let jet = eval_jet2(f, x)?;
        let h_inv = self.metric_inv(x);
        Ok(h_inv.bilinear(&jet.grad, &jet.grad).max(0.0).sqrt())
    }

    /// Sampled sectional curvature of the plane spanned by u, v at x,
    /// computed from the Riemann tensor of h (autodiff of the symbols).
    pub fn sectional_curvature(&self, x: &[f64], u: &[f64], v: &[f64]) -> Result<f64> {
        self.check_domain(x)?;
        let n = self.dim;
        let xd = seed(x);
        let gd = self.christoffel(&xd);
        let g = self.christoffel(x);
        // R^i_{jkl} = d_k Gamma^i_{lj} - d_l Gamma^i_{kj}
        //           + Gamma^i_{km} Gamma^m_{lj} - Gamma^i_{lm} Gamma^m_{kj}
        let riem = |i: usize, j: usize, k: usize, l: usize| -> f64 {
            let mut r = gd[i][(l, j)].d(k) - gd[i][(k, j)].d(l);
            for m in 0..n {
                r += g[i][(k, m)] * g[m][(l, j)] - g[i][(l, m)] * g[m][(k, j)];
            }
            r
        };
        let h = self.metric(x);
        // R(u,v)v paired with u.
        let mut num = 0.0;
        for i in 0..n {
            let mut ruvv = 0.0;
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        ruvv += riem(i, j, k, l) * v[j] * u[k] * v[l];
                    }
                }
            }
            let mut hu = 0.0;
            for j in 0..n {
                hu += h[(i, j)] * u[j];
            }
            num += ruvv * hu;
        }
        let uu = h.bilinear(u, u);
        let vv = h.bilinear(v, v);
        let uv = h.bilinear(u, v);
        let denom = uu * vv - uv * uv;
        if denom.abs() < 1e-14 {
            return Err(GeomError::DegenerateFlag);
        }
        Ok(num / denom)
    }
}
