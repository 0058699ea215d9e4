//! Normals, induced metrics, shape operators and principal curvatures of
//! hypersurfaces, measured against both the navigation metric and its
//! Riemannian base, plus the structural comparisons between the two:
//! conformality of the induced metric, the pointwise normal-derivative
//! relation for isotropic drifts, and the principal-curvature shift
//! lambda = lambda_bar + k0.

use crate::config::Tolerances;
use crate::dual::{seed, Real};
use crate::error::{GeomError, Result};
use crate::immersion::Immersion;
use crate::linalg::{
    group_eigenvalues, principal_angles, solve_sym_geig, EigenGroup, SMat, SymMatrix,
};
use crate::randers::RandersMetric;
use crate::space_form::SpaceForm;
use crate::vector_field::classify_field;
use nalgebra::DMatrix;

/// Covector annihilating the column span of an n x (n-1) matrix, by
/// cofactor expansion (the generalized cross product of the columns).
fn annihilator<S: Real>(dphi: &SMat<S>) -> Vec<S> {
    let n = dphi.rows;
    let m = dphi.cols;
    assert_eq!(m + 1, n, "annihilator needs corank one");
    (0..n)
        .map(|skip| {
            let minor = SMat::from_fn(m, m, |i, j| {
                let row = if i < skip { i } else { i + 1 };
                dphi[(row, j)].clone()
            });
            let sign = if skip % 2 == 0 { 1.0 } else { -1.0 };
            minor.det() * S::constant(sign)
        })
        .collect()
}

/// Chart point, differential, h-unit normal and F-unit normal at u, all
/// generic so the normal field can be differentiated along the surface.
fn normal_field_generic<S: Real>(
    metric: &RandersMetric,
    imm: &Immersion,
    u: &[S],
    orientation: f64,
) -> Result<(Vec<S>, SMat<S>, Vec<S>, Vec<S>)> {
    let n = imm.chart_dim();
    let m = imm.param_dim();
    let ud = seed(u);
    let xd = imm.map(&ud);
    let x: Vec<S> = xd.iter().map(|v| v.re.clone()).collect();
    let dphi = SMat::from_fn(n, m, |i, a| xd[i].d(a));
    let nu: Vec<S> = annihilator(&dphi)
        .into_iter()
        .map(|v| v * S::constant(orientation))
        .collect();
    let cache = metric.cache(&x)?;
    let nu_up = cache.h_inv.mul_vec(&nu);
    let h_star = crate::linalg::dot(&nu, &nu_up).sqrt();
    let n_h: Vec<S> = nu_up
        .iter()
        .map(|v| v.clone() / h_star.clone())
        .collect();
    let n_f: Vec<S> = n_h
        .iter()
        .zip(&cache.w_up)
        .map(|(nh, w)| nh.clone() + w.clone())
        .collect();
    Ok((x, dphi, n_h, n_f))
}

/// The two unit normals at one parameter point, with the verification
/// residuals that pin them against each other.
#[derive(Clone, Debug)]
pub struct NormalPair {
    pub point: Vec<f64>,
    pub dphi: DMatrix<f64>,
    /// h-unit normal.
    pub n_h: Vec<f64>,
    /// F-unit normal, the drift translate of `n_h`.
    pub n_f: Vec<f64>,
    /// |F(n_f) - 1|.
    pub f_unit_residual: f64,
    /// max_a |L(n_f)(dphi e_a)|.
    pub annihilation_residual: f64,
    /// Deviation between the drift translate and the Legendre route.
    pub relation_residual: f64,
}

pub fn unit_normals(
    imm: &Immersion,
    metric: &RandersMetric,
    u: &[f64],
    orientation: f64,
    tol: &Tolerances,
) -> Result<NormalPair> {
    assert!(orientation == 1.0 || orientation == -1.0);
    let (point, dphi_s, n_h, n_f) = normal_field_generic(metric, imm, u, orientation)?;
    let dphi = dphi_s.to_f64();
    // Rank check on the differential.
    let smin = dphi
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(f64::INFINITY, |acc, &s| acc.min(s));
    if !smin.is_finite() || smin < 1e-8 {
        return Err(GeomError::RankDeficient(u.to_vec()));
    }

    let f_unit_residual = (metric.f_value(&point, &n_f)? - 1.0).abs();
    let xi = metric.legendre(&point, &n_f)?;
    let mut annihilation_residual: f64 = 0.0;
    for a in 0..imm.param_dim() {
        let pairing: f64 = (0..imm.chart_dim()).map(|i| xi[i] * dphi[(i, a)]).sum();
        annihilation_residual = annihilation_residual.max(pairing.abs());
    }
    // Independent route to the F-normal: normalize the annihilating
    // covector to the dual unit sphere and invert the Legendre map.
    let cache = metric.cache(&point)?;
    let h = cache.h.clone();
    let nu: Vec<f64> = h.mul_vec(&n_h);
    let y = cache.legendre_inverse(&nu);
    let f_star = cache.f_dual(&nu);
    let mut relation_residual: f64 = 0.0;
    for i in 0..imm.chart_dim() {
        relation_residual = relation_residual.max((y[i] / f_star - n_f[i]).abs());
    }

    if f_unit_residual > tol.exact_identity * 10.0
        || annihilation_residual > 1e-9
        || relation_residual > 1e-9
    {
        return Err(GeomError::ConsistencyCheck(format!(
            "normal verification failed at u = {:?}: F-unit {:.3e}, annihilation {:.3e}, relation {:.3e}",
            u, f_unit_residual, annihilation_residual, relation_residual
        )));
    }
    Ok(NormalPair {
        point,
        dphi,
        n_h,
        n_f,
        f_unit_residual,
        annihilation_residual,
        relation_residual,
    })
}

/// Induced metric of the F-normal together with the conformal comparison
/// against the induced Riemannian metric.
#[derive(Clone, Debug)]
pub struct InducedMetric {
    /// Pullback of the fundamental tensor at the F-normal.
    pub g_induced: SymMatrix,
    /// Pullback of h.
    pub h_induced: SymMatrix,
    /// Predicted conformal factor 1 / (1 + <n_h, W>_h).
    pub factor: f64,
    /// max |g_induced - factor * h_induced|.
    pub residual: f64,
}

pub fn induced_metric(
    imm: &Immersion,
    metric: &RandersMetric,
    u: &[f64],
    orientation: f64,
    tol: &Tolerances,
) -> Result<InducedMetric> {
    let pair = unit_normals(imm, metric, u, orientation, tol)?;
    let m = imm.param_dim();
    let n = imm.chart_dim();
    let cache = metric.cache(&pair.point)?;
    let g = cache.fundamental(&pair.n_f);
    let w_dn = &cache.w_dn;
    let pull = |t: &SMat<f64>| {
        DMatrix::from_fn(m, m, |a, b| {
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    acc += t[(i, j)] * pair.dphi[(i, a)] * pair.dphi[(j, b)];
                }
            }
            acc
        })
    };
    let g_ind = pull(&g);
    let h_ind = pull(&cache.h);
    let pairing: f64 = crate::linalg::dot(&pair.n_h, w_dn);
    let factor = 1.0 / (1.0 + pairing);
    let scale = h_ind.amax().max(1.0);
    let residual = (&g_ind - &h_ind * factor).amax();
    if residual > tol.identity * scale {
        return Err(GeomError::ConsistencyCheck(format!(
            "induced metric is not conformal to the Riemannian pullback: residual {:.3e}",
            residual
        )));
    }
    Ok(InducedMetric {
        g_induced: SymMatrix::new(g_ind),
        h_induced: SymMatrix::new(h_ind),
        factor,
        residual,
    })
}

/// Shape operator of one pipeline at one parameter point.
#[derive(Clone, Debug)]
pub struct ShapeData {
    /// Matrix of A in the parameter basis.
    pub a_matrix: DMatrix<f64>,
    /// Induced metric the eigenproblem was solved in.
    pub induced: SymMatrix,
    /// Induced Riemannian metric (used as the common inner product for
    /// principal-vector comparisons).
    pub h_induced: SymMatrix,
    /// Ascending principal curvatures.
    pub principal: Vec<f64>,
    /// Eigenvectors (columns, parameter coordinates), induced-metric
    /// orthonormal, ordered like `principal`.
    pub eigvecs: DMatrix<f64>,
    /// || g A - (g A)^T ||_max.
    pub self_adjoint_residual: f64,
    /// Columns are the covariant derivatives of the unit normal along the
    /// parameter directions (before tangential projection).
    pub normal_derivatives: DMatrix<f64>,
}

impl ShapeData {
    pub fn mean_curvature(&self) -> f64 {
        self.principal.iter().sum()
    }
}

fn shape_from_projection(
    dphi: &DMatrix<f64>,
    ambient_metric: &DMatrix<f64>,
    h_induced: DMatrix<f64>,
    normal_derivatives: DMatrix<f64>,
    tol: &Tolerances,
) -> Result<ShapeData> {
    let n = dphi.nrows();
    let m = dphi.ncols();
    let induced = DMatrix::from_fn(m, m, |a, b| {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += ambient_metric[(i, j)] * dphi[(i, a)] * dphi[(j, b)];
            }
        }
        acc
    });
    // Tangential projection in the ambient inner product: solve the
    // normal equations (dphi^T G dphi) c = dphi^T G d per column.
    let rhs = dphi.transpose() * ambient_metric * &normal_derivatives;
    let chol = induced
        .clone()
        .cholesky()
        .ok_or(GeomError::NotPositiveDefinite(f64::NAN))?;
    let coeffs = chol.solve(&rhs);
    let a_matrix = -coeffs;

    let sym = &induced * &a_matrix;
    let self_adjoint_residual = (&sym - sym.transpose()).amax();
    if self_adjoint_residual > tol.identity * sym.amax().max(1.0) {
        return Err(GeomError::ConsistencyCheck(format!(
            "shape operator is not self-adjoint: residual {:.3e}",
            self_adjoint_residual
        )));
    }
    let induced_sym = SymMatrix::new(induced);
    let sol = solve_sym_geig(&SymMatrix::new(sym), &induced_sym)?;
    Ok(ShapeData {
        a_matrix,
        induced: induced_sym,
        h_induced: SymMatrix::new(h_induced),
        principal: sol.values,
        eigvecs: sol.vectors,
        self_adjoint_residual,
        normal_derivatives,
    })
}

/// Anisotropic shape operator: the F-unit normal is extended along the
/// surface, differentiated tangentially, corrected by the Chern
/// coefficients at reference vector n, and projected with the
/// fundamental tensor at n.
pub fn shape_operator(
    imm: &Immersion,
    metric: &RandersMetric,
    u: &[f64],
    orientation: f64,
    tol: &Tolerances,
) -> Result<ShapeData> {
    let n = imm.chart_dim();
    let m = imm.param_dim();
    let (xd, dphi_d, _, nfd) = normal_field_generic(metric, imm, &seed(u), orientation)?;
    let x: Vec<f64> = xd.iter().map(|v| v.value()).collect();
    let dphi = DMatrix::from_fn(n, m, |i, a| dphi_d[(i, a)].value());
    let n_f: Vec<f64> = nfd.iter().map(|v| v.value()).collect();

    let spray = metric.spray(&x, &n_f)?;
    let mut deriv = DMatrix::zeros(n, m);
    for a in 0..m {
        for i in 0..n {
            let mut v = nfd[i].d(a);
            for j in 0..n {
                for k in 0..n {
                    v += spray.gamma[i][(j, k)] * dphi[(j, a)] * n_f[k];
                }
            }
            deriv[(i, a)] = v;
        }
    }

    let cache = metric.cache(&x)?;
    let g = cache.fundamental(&n_f).to_f64();
    let h_ind = {
        let h = cache.h.to_f64();
        dphi.transpose() * h * &dphi
    };
    shape_from_projection(&dphi, &g, h_ind, deriv, tol)
}

/// Riemannian shape operator of the base metric, built directly from the
/// Levi-Civita symbols and the h-orthogonal projection; shares no
/// connection machinery with the anisotropic pipeline.
pub fn riemannian_shape_operator(
    space: &SpaceForm,
    imm: &Immersion,
    u: &[f64],
    orientation: f64,
    tol: &Tolerances,
) -> Result<ShapeData> {
    let n = imm.chart_dim();
    let m = imm.param_dim();
    let riem = RandersMetric::riemannian(space.clone());
    let (xd, dphi_d, nhd, _) = normal_field_generic(&riem, imm, &seed(u), orientation)?;
    let x: Vec<f64> = xd.iter().map(|v| v.value()).collect();
    let dphi = DMatrix::from_fn(n, m, |i, a| dphi_d[(i, a)].value());
    let n_h: Vec<f64> = nhd.iter().map(|v| v.value()).collect();

    let gamma = space.christoffel(&x);
    let mut deriv = DMatrix::zeros(n, m);
    for a in 0..m {
        for i in 0..n {
            let mut v = nhd[i].d(a);
            for j in 0..n {
                for k in 0..n {
                    v += gamma[i][(j, k)] * dphi[(j, a)] * n_h[k];
                }
            }
            deriv[(i, a)] = v;
        }
    }
    let h = space.metric(&x).to_f64();
    let h_ind = dphi.transpose() * &h * &dphi;
    shape_from_projection(&dphi, &h, h_ind.clone(), deriv, tol)
}

/// Side-by-side curvature data of the two pipelines at one point.
#[derive(Clone, Debug)]
pub struct CurvatureReport {
    pub principal_f: Vec<f64>,
    pub principal_h: Vec<f64>,
    pub mean_f: f64,
    /// Multiplicity classes of the Riemannian spectrum.
    pub groups: Vec<EigenGroup>,
    /// max_a |lambda_a - lambda_bar_a - k0| over sorted spectra.
    pub shift_residual: f64,
    /// Largest principal angle between matched eigenspaces (radians).
    pub max_principal_angle: f64,
    /// max_a || D^n_a n - (nabla^h_a n_bar - k0 dphi_a) ||_h.
    pub normal_derivative_residual: f64,
    /// Dilation constant of the drift.
    pub dilation: f64,
}

/// Verifies the principal-curvature shift between the anisotropic and
/// Riemannian shape operators at one parameter point. The drift must be
/// Killing or homothetic; `classify_box` bounds the sampling region used
/// to certify that hypothesis.
pub fn verify_shift(
    imm: &Immersion,
    metric: &RandersMetric,
    u: &[f64],
    orientation: f64,
    classify_box: f64,
    tol: &Tolerances,
) -> Result<CurvatureReport> {
    let classify = classify_field(metric.space(), metric.field(), classify_box, 0x5EED)?;
    let k0 = classify.dilation_or_err()?;

    let fin = shape_operator(imm, metric, u, orientation, tol)?;
    let rie = riemannian_shape_operator(metric.space(), imm, u, orientation, tol)?;

    let m = imm.param_dim();
    let mut shift_residual: f64 = 0.0;
    for a in 0..m {
        shift_residual = shift_residual.max((fin.principal[a] - rie.principal[a] - k0).abs());
    }

    let groups = group_eigenvalues(&rie.principal, tol.eigen_group);
    let h_bar = rie.h_induced.matrix().clone();
    let mut max_angle: f64 = 0.0;
    for grp in &groups {
        let cols = grp.end - grp.start;
        let uf = fin.eigvecs.columns(grp.start, cols).clone_owned();
        let ur = rie.eigvecs.columns(grp.start, cols).clone_owned();
        let angles = principal_angles(&uf, &ur, &h_bar);
        if let Some(&worst) = angles.last() {
            max_angle = max_angle.max(worst);
        }
    }

    // Pointwise normal-derivative relation D^n_X n = nabla^h_X n_bar - k0 dphi X.
    let (x, dphi) = imm.differential(u)?;
    let h = metric.space().metric(&x);
    let mut nd_residual: f64 = 0.0;
    let n = imm.chart_dim();
    for a in 0..m {
        let diff: Vec<f64> = (0..n)
            .map(|i| {
                fin.normal_derivatives[(i, a)]
                    - (rie.normal_derivatives[(i, a)] - k0 * dphi[(i, a)])
            })
            .collect();
        nd_residual = nd_residual.max(h.bilinear(&diff, &diff).max(0.0).sqrt());
    }

    let mean_f = fin.mean_curvature();
    Ok(CurvatureReport {
        principal_f: fin.principal,
        principal_h: rie.principal,
        mean_f,
        groups,
        shift_residual,
        max_principal_angle: max_angle,
        normal_derivative_residual: nd_residual,
        dilation: k0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector_field::{SkewMatrix, VectorFieldSpec};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn hyperplane_normals_with_constant_drift() {
        let metric = RandersMetric::from_parts(
            SpaceForm::euclidean(2),
            VectorFieldSpec::constant(vec![0.5, 0.0]),
        )
        .unwrap();
        let imm = Immersion::hyperplane(2, 0.0).unwrap();
        let pair = unit_normals(&imm, &metric, &[0.7], 1.0, &tol()).unwrap();
        assert!((pair.n_h[0] - 1.0).abs() < 1e-14);
        assert!(pair.n_h[1].abs() < 1e-14);
        assert!((pair.n_f[0] - 1.5).abs() < 1e-14);
        assert!(pair.f_unit_residual < 1e-12);
        assert!(pair.annihilation_residual < 1e-12);

        // Orientation flip produces the other F-normal -n_h + W.
        let flipped = unit_normals(&imm, &metric, &[0.7], -1.0, &tol()).unwrap();
        assert!((flipped.n_h[0] + 1.0).abs() < 1e-14);
        assert!((flipped.n_f[0] + 0.5).abs() < 1e-14);
        assert!(flipped.f_unit_residual < 1e-12);
    }

    #[test]
    fn drift_free_normals_coincide() {
        let metric = RandersMetric::riemannian(SpaceForm::new(2, 1.0));
        let imm = Immersion::hypersphere(2, 0.8).unwrap();
        let pair = unit_normals(&imm, &metric, &[1.2], 1.0, &tol()).unwrap();
        for i in 0..2 {
            assert!((pair.n_f[i] - pair.n_h[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn sphere_outward_normal_with_radial_drift() {
        // Unit circle, W = -x/2: the F-normal is x/2.
        let metric =
            RandersMetric::from_parts(SpaceForm::euclidean(2), VectorFieldSpec::radial(2, 0.25))
                .unwrap();
        let imm = Immersion::hypersphere(2, 1.0).unwrap();
        let u = [0.9];
        let pair = unit_normals(&imm, &metric, &u, 1.0, &tol()).unwrap();
        for i in 0..2 {
            assert!((pair.n_h[i] - pair.point[i]).abs() < 1e-13);
            assert!((pair.n_f[i] - 0.5 * pair.point[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn induced_metric_conformal_factor() {
        let metric = RandersMetric::from_parts(
            SpaceForm::euclidean(2),
            VectorFieldSpec::constant(vec![0.5, 0.0]),
        )
        .unwrap();
        let imm = Immersion::hyperplane(2, 0.0).unwrap();
        let ind = induced_metric(&imm, &metric, &[0.3], 1.0, &tol()).unwrap();
        assert!((ind.factor - 2.0 / 3.0).abs() < 1e-12);
        assert!(ind.residual < 1e-12);

        // Drift tangent to the surface: factor 1.
        let tangent = RandersMetric::from_parts(
            SpaceForm::euclidean(2),
            VectorFieldSpec::constant(vec![0.0, 0.4]),
        )
        .unwrap();
        let ind = induced_metric(&imm, &tangent, &[0.3], 1.0, &tol()).unwrap();
        assert!((ind.factor - 1.0).abs() < 1e-13);
    }

    #[test]
    fn shape_operator_of_flat_plane_vanishes() {
        let metric = RandersMetric::from_parts(
            SpaceForm::euclidean(3),
            VectorFieldSpec::constant(vec![0.3, 0.1, -0.2]),
        )
        .unwrap();
        let imm = Immersion::hyperplane(3, 0.25).unwrap();
        let shape = shape_operator(&imm, &metric, &[0.4, -0.8], 1.0, &tol()).unwrap();
        assert!(shape.a_matrix.amax() < 1e-10, "{:?}", shape.a_matrix);
    }

    #[test]
    fn riemannian_sphere_curvatures() {
        // Outward-oriented sphere of radius r in the flat chart has
        // principal curvatures -1/r under the sign convention here.
        let space = SpaceForm::euclidean(3);
        let imm = Immersion::hypersphere(3, 0.5).unwrap();
        let shape = riemannian_shape_operator(&space, &imm, &[1.1, 0.7], 1.0, &tol()).unwrap();
        for l in &shape.principal {
            assert!((l + 2.0).abs() < 1e-10, "principal {:?}", shape.principal);
        }
        assert!((shape.mean_curvature() + 4.0).abs() < 1e-9);
    }

    #[test]
    fn riemannian_cylinder_curvatures() {
        let space = SpaceForm::euclidean(3);
        let imm = Immersion::cylinder(3, 1, 0.5).unwrap();
        let shape = riemannian_shape_operator(&space, &imm, &[0.8, 1.3], 1.0, &tol()).unwrap();
        assert!((shape.principal[0] + 2.0).abs() < 1e-10);
        assert!(shape.principal[1].abs() < 1e-10);
    }

    #[test]
    fn clifford_torus_is_minimal_in_the_round_sphere() {
        let space = SpaceForm::new(3, 1.0);
        let imm = Immersion::clifford_torus(3, 1, std::f64::consts::FRAC_1_SQRT_2).unwrap();
        let shape = riemannian_shape_operator(&space, &imm, &[0.8, 2.1], 1.0, &tol()).unwrap();
        let mags: Vec<f64> = shape.principal.iter().map(|l| l.abs()).collect();
        assert!((mags[0] - 1.0).abs() < 1e-9, "{:?}", shape.principal);
        assert!((mags[1] - 1.0).abs() < 1e-9);
        assert!(shape.principal[0] * shape.principal[1] < 0.0);
        assert!(shape.mean_curvature().abs() < 1e-9);
    }

    #[test]
    fn shift_on_unit_circle_with_radial_drift() {
        // lambda_bar = -1 outward; dilation 1/4 shifts it to -3/4.
        let metric =
            RandersMetric::from_parts(SpaceForm::euclidean(2), VectorFieldSpec::radial(2, 0.25))
                .unwrap();
        let imm = Immersion::hypersphere(2, 1.0).unwrap();
        let report = verify_shift(&imm, &metric, &[0.9], 1.0, 1.2, &tol()).unwrap();
        assert!((report.dilation - 0.25).abs() < 1e-9);
        assert!((report.principal_h[0] + 1.0).abs() < 1e-9);
        assert!((report.principal_f[0] + 0.75).abs() < 1e-7, "{:?}", report);
        assert!(report.shift_residual < 1e-7);
        assert!(report.normal_derivative_residual < 1e-7);
    }

    #[test]
    fn killing_drift_preserves_principal_curvatures() {
        let metric = RandersMetric::from_parts(
            SpaceForm::euclidean(3),
            VectorFieldSpec::Affine {
                dilation: 0.0,
                q: SkewMatrix::rotation(3, 0, 1, 0.4),
                e: vec![0.1, 0.0, 0.2],
            },
        )
        .unwrap();
        let imm = Immersion::hypersphere(3, 1.0).unwrap();
        let report = verify_shift(&imm, &metric, &[1.0, 0.8], 1.0, 0.9, &tol()).unwrap();
        assert_eq!(report.dilation, 0.0);
        assert!(report.shift_residual < 1e-6, "{:?}", report);
        assert!(report.max_principal_angle < 1e-4);
        assert!(report.normal_derivative_residual < 1e-6);
    }

    #[test]
    fn shift_hypothesis_requires_isotropic_drift() {
        let metric = RandersMetric::from_parts(
            SpaceForm::euclidean(2),
            VectorFieldSpec::Custom {
                components: vec![
                    crate::field::ScalarField::expr("x1^2").unwrap(),
                    crate::field::ScalarField::expr("0").unwrap(),
                ],
            },
        )
        .unwrap();
        let imm = Immersion::hypersphere(2, 0.5).unwrap();
        assert!(matches!(
            verify_shift(&imm, &metric, &[0.9], 1.0, 0.4, &tol()),
            Err(GeomError::UnsupportedHypothesis(_))
        ));
    }
}

#[cfg(test)]
mod second_fundamental_form_tests {
    use super::*;
    use crate::dual::{Dual, D2};
    use crate::vector_field::{SkewMatrix, VectorFieldSpec};

    /// Independent route to the shape operator: the second fundamental
    /// form evaluated from second derivatives of the immersion,
    /// h2(e_a, e_b) = g_n(n, D^n_{e_a} phi_b)
    ///              = g_n(n, d2phi/du^a du^b + Gamma(n)(phi_a, phi_b)),
    /// must equal (g_induced A)_{ab}, which the main pipeline builds from
    /// first derivatives of the normal field instead.
    fn second_fundamental_form(
        imm: &Immersion,
        metric: &RandersMetric,
        u: &[f64],
        orientation: f64,
        tol: &Tolerances,
    ) -> (DMatrix<f64>, DMatrix<f64>) {
        let n = imm.chart_dim();
        let m = imm.param_dim();
        let pair = unit_normals(imm, metric, u, orientation, tol).unwrap();

        // Second derivatives of the immersion map by two dual levels.
        let u2: Vec<D2> = u
            .iter()
            .enumerate()
            .map(|(a, &v)| Dual::variable(Dual::variable(v, a, m), a, m))
            .collect();
        let x2 = imm.map(&u2);
        let spray = metric.spray(&pair.point, &pair.n_f).unwrap();
        let cache = metric.cache(&pair.point).unwrap();
        let g = cache.fundamental(&pair.n_f);
        let g_n: Vec<f64> = g.mul_vec(&pair.n_f);

        let h2 = DMatrix::from_fn(m, m, |a, b| {
            let mut acc = 0.0;
            for i in 0..n {
                let mut deriv = x2[i].d(a).d(b);
                for j in 0..n {
                    for k in 0..n {
                        deriv += spray.gamma[i][(j, k)] * pair.dphi[(j, a)] * pair.dphi[(k, b)];
                    }
                }
                acc += g_n[i] * deriv;
            }
            acc
        });
        let shape = shape_operator(imm, metric, u, orientation, tol).unwrap();
        let ga = shape.induced.matrix() * &shape.a_matrix;
        (h2, ga)
    }

    #[test]
    fn second_fundamental_form_matches_shape_operator() {
        let tol = Tolerances::default();
        let cases: Vec<(Immersion, RandersMetric, Vec<f64>)> = vec![
            (
                Immersion::hypersphere(2, 1.0).unwrap(),
                RandersMetric::from_parts(
                    SpaceForm::euclidean(2),
                    VectorFieldSpec::radial(2, 0.25),
                )
                .unwrap(),
                vec![0.9],
            ),
            (
                Immersion::hypersphere(3, 0.8).unwrap(),
                RandersMetric::from_parts(
                    SpaceForm::euclidean(3),
                    VectorFieldSpec::Affine {
                        dilation: 0.1,
                        q: SkewMatrix::rotation(3, 0, 1, 0.3),
                        e: vec![0.1, 0.0, -0.05],
                    },
                )
                .unwrap(),
                vec![1.1, 0.7],
            ),
            (
                Immersion::clifford_torus(3, 1, std::f64::consts::FRAC_1_SQRT_2).unwrap(),
                RandersMetric::from_parts(
                    SpaceForm::new(3, 1.0),
                    VectorFieldSpec::SphereKilling {
                        q: SkewMatrix::rotation(4, 0, 1, 0.3),
                    },
                )
                .unwrap(),
                vec![0.8, 2.1],
            ),
            (
                Immersion::cylinder(3, 1, 0.5).unwrap(),
                RandersMetric::from_parts(
                    SpaceForm::euclidean(3),
                    VectorFieldSpec::constant(vec![0.4, 0.1, 0.0]),
                )
                .unwrap(),
                vec![0.8, 1.3],
            ),
        ];
        for (imm, metric, u) in cases {
            for orientation in [1.0, -1.0] {
                let (h2, ga) = second_fundamental_form(&imm, &metric, &u, orientation, &tol);
                let scale = ga.amax().max(1.0);
                assert!(
                    (&h2 - &ga).amax() < 1e-7 * scale,
                    "{:?}: {:.3e}",
                    imm.catalog_id(),
                    (&h2 - &ga).amax()
                );
            }
        }
    }
}
