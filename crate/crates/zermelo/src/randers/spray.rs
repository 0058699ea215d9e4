//! Spray geometry of the navigation metric: geodesic coefficients G^i,
//! the nonlinear connection N^i_j, Chern connection coefficients, the
//! S-curvature and the flag curvature.
//!
//! G^i has a closed form in the covariant data of the drift field,
//!
//! ```text
//! G^i = Gbar^i - F s^i_0 - (1/2) F^2 (r^i + s^i)
//!       + (1/2) (y^i/F - w^i) (2 F r_0 - r_00 - F^2 r),
//! ```
//!
//! and N^i_j has the matching closed form obtained by differentiating in
//! y. Both are implemented literally, and `spray` insists that the
//! closed-form N equals the autodiff derivative of the closed-form G
//! before anything downstream may use either.

use super::{NavCache, RandersMetric};
use crate::dual::{lift, seed, Dual, Real, D1, D2};
use crate::error::{GeomError, Result};
use crate::field::ScalarField;
use crate::linalg::SMat;
use crate::vector_field::{covariant_data_generic, CovData};
use nalgebra::DMatrix;

/// Spray data at one (x, y): geodesic coefficients, nonlinear connection
/// and Chern coefficients (indexed `gamma[i][(j, k)]`, symmetric in j,k).
#[derive(Clone, Debug)]
pub struct SprayData {
    pub g: Vec<f64>,
    pub n_mat: DMatrix<f64>,
    pub gamma: Vec<DMatrix<f64>>,
    /// Max deviation between the closed-form N and the autodiff dG/dy.
    pub n_consistency: f64,
}

impl RandersMetric {
    /// Geodesic coefficients G^i(x, y), generic over the scalar tower.
    pub fn spray_generic<S: Real>(&self, x: &[S], y: &[S]) -> Result<Vec<S>> {
        let n = self.dim();
        let cache = self.cache(x)?;
        let cov = covariant_data_generic(self.space(), self.field(), x);
        let gamma = self.space().christoffel(x);
        let f = cache.f_nav(y);
        let half = S::constant(0.5);

        let g_riem: Vec<S> = (0..n)
            .map(|i| gamma[i].bilinear(y, y) * half.clone())
            .collect();
        let r0 = crate::linalg::dot(&cov.r_vec, y);
        let r00 = cov.r.bilinear(y, y);
        let s_up_0 = cov.s_mix.mul_vec(y);
        let p = S::constant(2.0) * f.clone() * r0 - r00 - f.clone() * f.clone() * cov.r_scalar.clone();

        Ok((0..n)
            .map(|i| {
                let rs = cov.r_up[i].clone() + cov.s_up[i].clone();
                g_riem[i].clone()
                    - f.clone() * s_up_0[i].clone()
                    - half.clone() * f.clone() * f.clone() * rs
                    + half.clone() * (y[i].clone() / f.clone() - cov.w_up[i].clone()) * p.clone()
            })
            .collect())
    }

    /// Closed form of N^i_j = dG^i/dy^j in the covariant data.
    fn nonlinear_connection_closed(
        &self,
        cache: &NavCache<f64>,
        cov: &CovData<f64>,
        gamma_riem: &[SMat<f64>],
        y: &[f64],
    ) -> DMatrix<f64> {
        let n = self.dim();
        let f = cache.f_nav(y);
        let f_y = cache.f_y(y);
        let r0: f64 = crate::linalg::dot(&cov.r_vec, y);
        let r00 = cov.r.bilinear(y, y);
        let s_up_0 = cov.s_mix.mul_vec(y);
        let r_dn_0 = cov.r.mul_vec(y); // r_{j0}
        let p = 2.0 * f * r0 - r00 - f * f * cov.r_scalar;

        DMatrix::from_fn(n, n, |i, j| {
            let n_riem: f64 = (0..n).map(|k| gamma_riem[i][(j, k)] * y[k]).sum();
            let rs = cov.r_up[i] + cov.s_up[i];
            let delta = if i == j { 1.0 } else { 0.0 };
            n_riem - f_y[j] * s_up_0[i] - f * cov.s_mix[(i, j)] - f * f_y[j] * rs
                + 0.5 * (delta / f - y[i] * f_y[j] / (f * f)) * p
                + 0.5
                    * (y[i] / f - cov.w_up[i])
                    * (2.0 * f_y[j] * r0 + 2.0 * f * cov.r_vec[j]
                        - 2.0 * r_dn_0[j]
                        - 2.0 * f * f_y[j] * cov.r_scalar)
        })
    }

    /// Spray, nonlinear connection and Chern coefficients at (x, y).
    pub fn spray(&self, x: &[f64], y: &[f64]) -> Result<SprayData> {
        if y.iter().map(|v| v * v).sum::<f64>() == 0.0 {
            return Err(GeomError::ZeroDirection);
        }
        let n = self.dim();
        let cache = self.cache(x)?;
        let cov = covariant_data_generic(self.space(), self.field(), x);
        let gamma_riem = self.space().christoffel(x);

        let g = self.spray_generic(x, y)?;
        let n_closed = self.nonlinear_connection_closed(&cache, &cov, &gamma_riem, y);

        // Independent route: differentiate G in y.
        let xl: Vec<D1> = lift(x);
        let g_dual = self.spray_generic(&xl, &seed(y))?;
        let mut n_ad = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                n_ad[(i, j)] = g_dual[i].d(j).value();
            }
        }
        let scale = 1.0f64.max(n_ad.amax());
        let n_consistency = (&n_closed - &n_ad).amax();
        if n_consistency > 1e-8 * scale {
            return Err(GeomError::ConsistencyCheck(format!(
                "closed-form nonlinear connection deviates from dG/dy by {:.3e}",
                n_consistency
            )));
        }

        let gamma = self.chern_from_g_derivatives(x, y, &n_closed)?;
        Ok(SprayData {
            g,
            n_mat: n_closed,
            gamma,
            n_consistency,
        })
    }

    /// Chern coefficients from horizontal derivatives of the fundamental
    /// tensor: with delta_k = d_{x^k} - N^m_k d_{y^m},
    /// Gamma^i_{jk} = (1/2) g^{il} (delta_k g_{lj} + delta_j g_{lk} - delta_l g_{jk}).
    fn chern_from_g_derivatives(
        &self,
        x: &[f64],
        y: &[f64],
        n_mat: &DMatrix<f64>,
    ) -> Result<Vec<DMatrix<f64>>> {
        let n = self.dim();
        let vars = 2 * n;
        let xd: Vec<D1> = x
            .iter()
            .enumerate()
            .map(|(i, &v)| Dual::variable(v, i, vars))
            .collect();
        let yd: Vec<D1> = y
            .iter()
            .enumerate()
            .map(|(j, &v)| Dual::variable(v, n + j, vars))
            .collect();
        let cache_d = self.cache(&xd)?;
        let g_d = cache_d.fundamental(&yd);

        let g0 = SMat::from_fn(n, n, |i, j| g_d[(i, j)].value());
        let g_inv = g0.inverse()?;
        // Horizontal derivative of g, indexed [k][(i, j)].
        let horiz: Vec<DMatrix<f64>> = (0..n)
            .map(|k| {
                DMatrix::from_fn(n, n, |i, j| {
                    let mut v = g_d[(i, j)].d(k);
                    for m in 0..n {
                        v -= n_mat[(m, k)] * g_d[(i, j)].d(n + m);
                    }
                    v
                })
            })
            .collect();
        Ok((0..n)
            .map(|i| {
                DMatrix::from_fn(n, n, |j, k| {
                    let mut acc = 0.0;
                    for l in 0..n {
                        acc += g_inv[(i, l)]
                            * (horiz[k][(l, j)] + horiz[j][(l, k)] - horiz[l][(j, k)]);
                    }
                    0.5 * acc
                })
            })
            .collect())
    }

    /// First-principles spray
    /// G^i = (1/4) g^{il} ( [F^2]_{x^k y^l} y^k - [F^2]_{x^l} ),
    /// computed purely by autodiff of F. Used as an independent oracle
    /// against the covariant-data closed form.
    pub fn spray_from_first_principles(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        let vars = 2 * n;
        let x2: Vec<D2> = x
            .iter()
            .enumerate()
            .map(|(i, &v)| Dual::variable(Dual::variable(v, i, vars), i, vars))
            .collect();
        let y2: Vec<D2> = y
            .iter()
            .enumerate()
            .map(|(j, &v)| Dual::variable(Dual::variable(v, n + j, vars), n + j, vars))
            .collect();
        let cache2 = self.cache(&x2)?;
        let f = cache2.f_nav(&y2);
        let f2 = f.clone() * f;

        let g = self.cache(x)?.fundamental(y);
        let g_inv = g.inverse()?;
        Ok((0..n)
            .map(|i| {
                let mut acc = 0.0;
                for l in 0..n {
                    let mut mixed = 0.0;
                    for k in 0..n {
                        mixed += f2.d(k).d(n + l) * y[k];
                    }
                    acc += g_inv[(i, l)] * (mixed - f2.d(l).re);
                }
                0.25 * acc
            })
            .collect())
    }

    /// S-curvature S(x, y) = dG^i/dy^i - y^i d_i ln sigma, both terms by
    /// autodiff, with sigma the Busemann-Hausdorff density.
    pub fn s_curvature(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if y.iter().map(|v| v * v).sum::<f64>() == 0.0 {
            return Err(GeomError::ZeroDirection);
        }
        let n = self.dim();
        let xl: Vec<D1> = lift(x);
        let g_dual = self.spray_generic(&xl, &seed(y))?;
        let trace: f64 = (0..n).map(|i| g_dual[i].d(i).value()).sum();

        let xd: Vec<D1> = seed(x);
        let cache_d = self.cache(&xd)?;
        let det_a = cache_d.a.det();
        let a_inv = cache_d.a.inverse()?;
        let b2 = a_inv.bilinear(&cache_d.b_form, &cache_d.b_form);
        let sigma = (D1::constant(1.0) - b2).sqrt().powi(n as i32 + 1) * det_a.sqrt();
        let ln_sigma = sigma.ln();
        let drift: f64 = (0..n).map(|i| y[i] * ln_sigma.d(i).value()).sum();
        Ok(trace - drift)
    }

    /// Chern covariant derivative with reference vector `w_ref`:
    /// (D^w_v X)^i = v^j d_j X^i + Gamma^i_{jk}(w) v^j X^k, with the field
    /// value and Jacobian supplied directly.
    pub fn covariant_derivative_data(
        gamma: &[DMatrix<f64>],
        v: &[f64],
        x_val: &[f64],
        x_jac: &DMatrix<f64>,
    ) -> Vec<f64> {
        let n = v.len();
        (0..n)
            .map(|i| {
                let mut acc = 0.0;
                for j in 0..n {
                    acc += v[j] * x_jac[(i, j)];
                    for k in 0..n {
                        acc += gamma[i][(j, k)] * v[j] * x_val[k];
                    }
                }
                acc
            })
            .collect()
    }

    /// Chern covariant derivative of a vector field given componentwise.
    pub fn covariant_derivative(
        &self,
        x: &[f64],
        w_ref: &[f64],
        v: &[f64],
        components: &[ScalarField],
    ) -> Result<Vec<f64>> {
        if w_ref.iter().map(|u| u * u).sum::<f64>() == 0.0 {
            return Err(GeomError::ZeroDirection);
        }
        let n = self.dim();
        let spray = self.spray(x, w_ref)?;
        let xd = seed(x);
        let vals_d: Vec<D1> = components.iter().map(|c| c.eval(&xd)).collect();
        let x_val: Vec<f64> = vals_d.iter().map(|v| v.value()).collect();
        let x_jac = DMatrix::from_fn(n, n, |i, j| vals_d[i].d(j));
        Ok(Self::covariant_derivative_data(
            &spray.gamma,
            v,
            &x_val,
            &x_jac,
        ))
    }

    /// Flag curvature K(x, y, v) from the spray curvature
    /// R^i_k = 2 dG^i/dx^k - y^j d2G^i/dx^j dy^k + 2 G^j d2G^i/dy^j dy^k
    ///         - dG^i/dy^j dG^j/dy^k.
    pub fn flag_curvature(&self, x: &[f64], y: &[f64], v: &[f64]) -> Result<f64> {
        let n = self.dim();
        let vars = 2 * n;
        let x2: Vec<D2> = x
            .iter()
            .enumerate()
            .map(|(i, &u)| Dual::variable(Dual::variable(u, i, vars), i, vars))
            .collect();
        let y2: Vec<D2> = y
            .iter()
            .enumerate()
            .map(|(j, &u)| Dual::variable(Dual::variable(u, n + j, vars), n + j, vars))
            .collect();
        let g_spray = self.spray_generic(&x2, &y2)?;

        let g_val: Vec<f64> = g_spray.iter().map(|g| g.value()).collect();
        let dgx = |i: usize, k: usize| g_spray[i].d(k).re.value();
        let dgy = |i: usize, j: usize| g_spray[i].d(n + j).re.value();
        let d2xy = |i: usize, j: usize, k: usize| g_spray[i].d(j).d(n + k);
        let d2yy = |i: usize, j: usize, k: usize| g_spray[i].d(n + j).d(n + k);

        let mut riem = DMatrix::zeros(n, n);
        for i in 0..n {
            for k in 0..n {
                let mut r = 2.0 * dgx(i, k);
                for j in 0..n {
                    r -= y[j] * d2xy(i, j, k);
                    r += 2.0 * g_val[j] * d2yy(i, j, k);
                    r -= dgy(i, j) * dgy(j, k);
                }
                riem[(i, k)] = r;
            }
        }

        let cache = self.cache(x)?;
        let g_fund = cache.fundamental(y);
        let f = cache.f_nav(y);
        let rv: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|k| riem[(i, k)] * v[k]).sum())
            .collect();
        let num = g_fund.bilinear(&rv, &v.to_vec());
        let gyy = f * f;
        let gvv = g_fund.bilinear(&v.to_vec(), &v.to_vec());
        let gyv = g_fund.bilinear(&y.to_vec(), &v.to_vec());
        let den = gyy * gvv - gyv * gyv;
        if den <= 1e-10 * gyy * gvv {
            return Err(GeomError::DegenerateFlag);
        }
        Ok(num / den)
    }
}
