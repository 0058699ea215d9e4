//! Vector fields W on a space form and their covariant calculus: the
//! covariant differential w_{i|j}, its symmetric part r_ij and
//! antisymmetric part s_ij with all raised and contracted variants, and
//! the homothety classifier that decides whether a field generates
//! isotropic distortion (r_ij = -2 k0 h_ij with constant k0).

use crate::dual::{seed, Real};
use crate::error::{GeomError, Result};
use crate::field::{inverse_stereographic, ScalarField};
use crate::linalg::SMat;
use crate::sampling::sample_point;
use crate::space_form::{Chart, SpaceForm};
use nalgebra::DMatrix;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Antisymmetric matrix stored as its strict upper triangle (row-major),
/// so antisymmetry holds exactly by construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkewMatrix {
    dim: usize,
    upper: Vec<f64>,
}

impl SkewMatrix {
    pub fn zero(dim: usize) -> Self {
        SkewMatrix {
            dim,
            upper: vec![0.0; dim * (dim - 1) / 2],
        }
    }

    pub fn from_upper(dim: usize, upper: Vec<f64>) -> Result<Self> {
        let expect = dim * (dim.saturating_sub(1)) / 2;
        if upper.len() != expect {
            return Err(GeomError::Config(format!(
                "skew matrix of dimension {} needs {} strict upper entries, got {}",
                dim,
                expect,
                upper.len()
            )));
        }
        Ok(SkewMatrix { dim, upper })
    }

    /// Single rotation generator in the (i, j) coordinate plane.
    pub fn rotation(dim: usize, i: usize, j: usize, speed: f64) -> Self {
        let mut q = Self::zero(dim);
        assert!(i < j && j < dim);
        let idx = q.upper_index(i, j);
        q.upper[idx] = speed;
        q
    }

    fn upper_index(&self, i: usize, j: usize) -> usize {
        // row i, col j with i < j
        i * self.dim - i * (i + 1) / 2 + (j - i - 1)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        use std::cmp::Ordering;
        match i.cmp(&j) {
            Ordering::Equal => 0.0,
            Ordering::Less => self.upper[self.upper_index(i, j)],
            Ordering::Greater => -self.upper[self.upper_index(j, i)],
        }
    }

    /// Row-vector action (xQ)_i = sum_j x_j Q_{ji}.
    pub fn apply_row<S: Real>(&self, x: &[S]) -> Vec<S> {
        (0..self.dim)
            .map(|i| {
                let mut acc = S::zero();
                for (j, xj) in x.iter().enumerate() {
                    let q = self.entry(j, i);
                    if q != 0.0 {
                        acc = acc + xj.clone() * S::constant(q);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.upper.iter().all(|v| *v == 0.0)
    }
}

/// Navigation vector field on a chart.
#[derive(Clone, Debug)]
pub enum VectorFieldSpec {
    /// W = -2 k0 x + xQ + e in chart coordinates (flat-chart family of
    /// constant-flag-curvature drifts; Killing when the dilation is 0).
    Affine {
        dilation: f64,
        q: SkewMatrix,
        e: Vec<f64>,
    },
    /// W = xQ + e + c <e, x> x in chart coordinates. Exposed for curved
    /// charts but only usable after [`classify_field`] confirms it; see
    /// the constructor note on `validated`.
    Projective { q: SkewMatrix, e: Vec<f64> },
    /// Pushforward of the ambient rotation field eta |-> eta Q on the unit
    /// sphere through the stereographic chart; Killing by construction.
    SphereKilling { q: SkewMatrix },
    /// Components given as scalar fields on the chart.
    Custom { components: Vec<ScalarField> },
}

impl VectorFieldSpec {
    pub fn zero(dim: usize) -> Self {
        VectorFieldSpec::Affine {
            dilation: 0.0,
            q: SkewMatrix::zero(dim),
            e: vec![0.0; dim],
        }
    }

    pub fn constant(e: Vec<f64>) -> Self {
        let dim = e.len();
        VectorFieldSpec::Affine {
            dilation: 0.0,
            q: SkewMatrix::zero(dim),
            e,
        }
    }

    /// W = -2 k0 x.
    pub fn radial(dim: usize, dilation: f64) -> Self {
        VectorFieldSpec::Affine {
            dilation,
            q: SkewMatrix::zero(dim),
            e: vec![0.0; dim],
        }
    }

    pub fn is_identically_zero(&self) -> bool {
        match self {
            VectorFieldSpec::Affine { dilation, q, e } => {
                *dilation == 0.0 && q.is_zero() && e.iter().all(|v| *v == 0.0)
            }
            _ => false,
        }
    }

    /// Contravariant components W^i(x) in chart coordinates.
    pub fn eval<S: Real>(&self, space: &SpaceForm, x: &[S]) -> Vec<S> {
        match self {
            VectorFieldSpec::Affine { dilation, q, e } => {
                let rot = q.apply_row(x);
                x.iter()
                    .zip(rot)
                    .zip(e)
                    .map(|((xi, ri), ei)| {
                        xi.clone() * S::constant(-2.0 * dilation) + ri + S::constant(*ei)
                    })
                    .collect()
            }
            VectorFieldSpec::Projective { q, e } => {
                let rot = q.apply_row(x);
                let ex: S = x
                    .iter()
                    .zip(e)
                    .fold(S::zero(), |acc, (xi, ei)| acc + xi.clone() * S::constant(*ei));
                let c = S::constant(space.curvature());
                x.iter()
                    .zip(rot)
                    .zip(e)
                    .map(|((xi, ri), ei)| ri + S::constant(*ei) + c.clone() * ex.clone() * xi.clone())
                    .collect()
            }
            VectorFieldSpec::SphereKilling { q } => {
                // eta(x) on the unit sphere, v = eta Q tangent there, then
                // push v through the stereographic projection
                // pi(eta) = eta' / (1 - eta_{n+1}).
                let eta = inverse_stereographic(x);
                let v = q.apply_row(&eta);
                let n = x.len();
                let denom = S::one() / (S::one() - eta[n].clone());
                let denom2 = denom.clone() * denom.clone();
                (0..n)
                    .map(|i| {
                        v[i].clone() * denom.clone()
                            + eta[i].clone() * v[n].clone() * denom2.clone()
                    })
                    .collect()
            }
            VectorFieldSpec::Custom { components } => {
                components.iter().map(|c| c.eval(x)).collect()
            }
        }
    }

    pub fn validate_dims(&self, space: &SpaceForm) -> Result<()> {
        let n = space.dim();
        let ok = match self {
            VectorFieldSpec::Affine { q, e, .. } => q.dim() == n && e.len() == n,
            VectorFieldSpec::Projective { q, e } => q.dim() == n && e.len() == n,
            VectorFieldSpec::SphereKilling { q } => {
                q.dim() == n + 1 && space.chart() == Chart::Stereographic
            }
            VectorFieldSpec::Custom { components } => {
                components.len() == n && components.iter().all(|c| c.min_dim() <= n)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(GeomError::Config(format!(
                "vector field dimensions do not match a chart of dimension {}",
                n
            )))
        }
    }
}

/// Covariant differential of the lowered field together with every
/// contraction the navigation spray formula consumes. Index conventions:
/// `w_cov[(i, j)] = w_{i|j}`, `r`/`s` its symmetric/antisymmetric parts
/// (s_ij = (w_{i|j} - w_{j|i})/2), `r_vec[j] = w^i r_ij`,
/// `s_vec[j] = w^i s_ij`, `r_scalar = r_vec . w`, `r_up`/`s_up` the
/// h-raised vectors and `s_mix[(i, j)] = s^i_j`.
#[derive(Clone, Debug)]
pub struct CovData<S> {
    pub w_up: Vec<S>,
    pub w_dn: Vec<S>,
    pub w_cov: SMat<S>,
    pub r: SMat<S>,
    pub s: SMat<S>,
    pub r_vec: Vec<S>,
    pub s_vec: Vec<S>,
    pub r_scalar: S,
    pub r_up: Vec<S>,
    pub s_up: Vec<S>,
    pub s_mix: SMat<S>,
}

pub fn covariant_data_generic<S: Real>(
    space: &SpaceForm,
    w: &VectorFieldSpec,
    x: &[S],
) -> CovData<S> {
    let n = space.dim();
    // d_j w_i of the lowered field, one dual level deep.
    let xd = seed(x);
    let hd = space.metric(&xd);
    let wd_up = w.eval(space, &xd);
    let wd_dn = hd.mul_vec(&wd_up);
    let w_up: Vec<S> = wd_up.iter().map(|v| v.re.clone()).collect();
    let w_dn: Vec<S> = wd_dn.iter().map(|v| v.re.clone()).collect();

    let gamma = space.christoffel(x);
    let w_cov = SMat::from_fn(n, n, |i, j| {
        let mut v = wd_dn[i].d(j);
        for k in 0..n {
            v = v - gamma[k][(i, j)].clone() * w_dn[k].clone();
        }
        v
    });
    let half = S::constant(0.5);
    let r = SMat::from_fn(n, n, |i, j| {
        (w_cov[(i, j)].clone() + w_cov[(j, i)].clone()) * half.clone()
    });
    let s = SMat::from_fn(n, n, |i, j| {
        (w_cov[(i, j)].clone() - w_cov[(j, i)].clone()) * half.clone()
    });
    let r_vec = r.transpose().mul_vec(&w_up);
    let s_vec = s.transpose().mul_vec(&w_up);
    let r_scalar = crate::linalg::dot(&r_vec, &w_up);
    let h_inv = space.metric_inv(x);
    let r_up = h_inv.mul_vec(&r_vec);
    let s_up = h_inv.mul_vec(&s_vec);
    let s_mix = h_inv.mul_mat(&s);
    CovData {
        w_up,
        w_dn,
        w_cov,
        r,
        s,
        r_vec,
        s_vec,
        r_scalar,
        r_up,
        s_up,
        s_mix,
    }
}

/// f64-level covariant data with a chart-domain check.
pub fn covariant_data(
    space: &SpaceForm,
    w: &VectorFieldSpec,
    x: &[f64],
) -> Result<CovData<f64>> {
    if !space.contains(x) {
        return Err(GeomError::OutsideDomain(x.to_vec()));
    }
    Ok(covariant_data_generic(space, w, x))
}

/// Divergence of W with respect to the Riemannian volume,
/// div W = h^{ij} w_{i|j}; equals -2 n k0 for a homothetic field.
pub fn divergence(space: &SpaceForm, w: &VectorFieldSpec, x: &[f64]) -> Result<f64> {
    let data = covariant_data(space, w, x)?;
    let h_inv = space.metric_inv(x);
    let mut div = 0.0;
    for i in 0..space.dim() {
        for j in 0..space.dim() {
            div += h_inv[(i, j)] * data.w_cov[(i, j)];
        }
    }
    Ok(div)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FieldClass {
    Killing,
    Homothetic { dilation: f64 },
    Neither,
}

#[derive(Clone, Debug)]
pub struct ClassifyReport {
    pub class: FieldClass,
    /// Best-fit constant k in r_ij = -2 k h_ij over the sample.
    pub dilation: f64,
    /// Max entry of r_ij + 2 k h_ij over the sample.
    pub max_residual: f64,
    pub samples: usize,
}

impl ClassifyReport {
    /// Dilation under the isotropic-distortion hypothesis (0 for Killing).
    pub fn dilation_or_err(&self) -> Result<f64> {
        match self.class {
            FieldClass::Killing => Ok(0.0),
            FieldClass::Homothetic { dilation } => Ok(dilation),
            FieldClass::Neither => Err(GeomError::UnsupportedHypothesis(format!(
                "vector field is neither Killing nor homothetic (residual {:.3e})",
                self.max_residual
            ))),
        }
    }
}

/// Samples the chart and fits the best constant k in r_ij = -2 k h_ij.
/// `box_radius` bounds the sampled coordinates.
pub fn classify_field(
    space: &SpaceForm,
    w: &VectorFieldSpec,
    box_radius: f64,
    seed_val: u64,
) -> Result<ClassifyReport> {
    let n = space.dim();
    let count = 64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed_val);
    let mut cross = 0.0;
    let mut norm = 0.0;
    let mut samples = Vec::with_capacity(count);
    for _ in 0..count {
        let x = sample_point(space, &mut rng, box_radius);
        let data = covariant_data_generic(space, w, x.as_slice());
        let h = space.metric(&x);
        for i in 0..n {
            for j in 0..n {
                cross += data.r[(i, j)] * h[(i, j)];
                norm += h[(i, j)] * h[(i, j)];
            }
        }
        samples.push((x, data, h));
    }
    if samples.is_empty() || norm == 0.0 {
        return Err(GeomError::EmptySample("field classification".into()));
    }
    let k = -cross / (2.0 * norm);
    let mut max_residual: f64 = 0.0;
    let mut h_scale: f64 = 0.0;
    for (_, data, h) in &samples {
        for i in 0..n {
            for j in 0..n {
                max_residual = max_residual.max((data.r[(i, j)] + 2.0 * k * h[(i, j)]).abs());
                h_scale = h_scale.max(h[(i, j)].abs());
            }
        }
    }
    let tol = 1e-6 * h_scale.max(1.0);
    let class = if max_residual > tol {
        FieldClass::Neither
    } else if k.abs() <= 1e-8 {
        FieldClass::Killing
    } else {
        FieldClass::Homothetic { dilation: k }
    };
    Ok(ClassifyReport {
        class,
        dilation: k,
        max_residual,
        samples: samples.len(),
    })
}

/// Riemannian covariant derivative of a vector field along v at x:
/// (nabla_v X)^i = v^j d_j X^i + Gamma^i_{jk} v^j X^k, with dX supplied by
/// the caller (rows = component, cols = coordinate).
pub fn levi_civita_derivative(
    space: &SpaceForm,
    x: &[f64],
    v: &[f64],
    x_val: &[f64],
    x_jac: &DMatrix<f64>,
) -> Vec<f64> {
    let n = space.dim();
    let gamma = space.christoffel(x);
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


#[cfg(test)]
mod isotropic_identity_tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn isotropic_drift_contractions() {
        // For r_ij = -2 k h_ij the raised and contracted data collapse:
        // s^i_j = w^i_{|j} + 2 k delta^i_j, r_j = -2 k w_j,
        // r_00 = -2 k h(y, y), r = -2 k b^2.
        let k = 0.3;
        let space = SpaceForm::euclidean(3);
        let w = VectorFieldSpec::Affine {
            dilation: k,
            q: SkewMatrix::rotation(3, 1, 2, 0.4),
            e: vec![0.1, -0.2, 0.05],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        for _ in 0..20 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.8..0.8)).collect();
            let data = covariant_data(&space, &w, &x).unwrap();
            let h = space.metric(&x);
            let h_inv = space.metric_inv(&x);
            let w_cov_up = h_inv.mul_mat(&data.w_cov);
            for i in 0..3 {
                for j in 0..3 {
                    let delta = if i == j { 1.0 } else { 0.0 };
                    let expect = w_cov_up[(i, j)] + 2.0 * k * delta;
                    assert!((data.s_mix[(i, j)] - expect).abs() < 1e-12);
                }
                assert!((data.r_vec[i] + 2.0 * k * data.w_dn[i]).abs() < 1e-12);
            }
            let y: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let r00 = data.r.bilinear(&y, &y);
            assert!((r00 + 2.0 * k * h.bilinear(&y, &y)).abs() < 1e-12);
            let b2 = crate::linalg::dot(&data.w_dn, &data.w_up);
            assert!((data.r_scalar + 2.0 * k * b2).abs() < 1e-12);
        }
    }
}
