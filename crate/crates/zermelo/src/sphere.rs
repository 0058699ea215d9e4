//! Extrinsic calculus of homogeneous functions on the unit sphere, and
//! the ambient form of the isoparametric test for rotational drifts.
//!
//! For a k-homogeneous Phi on R^{n+1} restricted to S^n:
//!
//! ```text
//! grad_h Phi = grad_E Phi - k Phi x
//! |grad_h Phi|^2 = |grad_E Phi|^2 - k^2 Phi^2
//! lap_h Phi = lap_E Phi - k (k + n - 1) Phi
//! ```
//!
//! so everything reduces to ambient jets; no chart is touched. With a
//! drift W = xQ the isoparametric test becomes per-level constancy of
//!
//! ```text
//! e1 = |grad_E Phi - k Phi x| + <grad_E Phi, xQ>
//! e2 = lap_h Phi / |grad_h Phi| + <grad_E rho, grad_E Phi> / |grad_h Phi|^2,
//! ```
//!
//! where rho = <grad_E Phi, xQ>.

use crate::config::Tolerances;
use crate::dual::{seed, Dual, Real, D1};
use crate::error::{GeomError, Result};
use crate::field::ScalarField;
use crate::jet::eval_jet2;
use crate::level_set::{auto_levels_sphere, sample_sphere_level_set};
use crate::vector_field::SkewMatrix;

/// Riemannian data of a homogeneous function at one unit-sphere point.
#[derive(Clone, Debug)]
pub struct SphereCalculus {
    pub value: f64,
    /// Tangential gradient grad_E Phi - k Phi x.
    pub grad_h: Vec<f64>,
    /// |grad_h|^2 by the homogeneity identity.
    pub grad_norm_sq: f64,
    /// Spherical Laplacian.
    pub lap_h: f64,
    /// |<grad_h, x>|: tangency of the reduced gradient.
    pub tangency_residual: f64,
    /// Deviation between the direct |grad_h|^2 and the identity value.
    pub norm_identity_residual: f64,
}

/// Evaluates the three homogeneity identities at a unit-sphere point.
pub fn sphere_calculus(f: &ScalarField, x: &[f64]) -> Result<SphereCalculus> {
    let k = f.degree().ok_or_else(|| {
        GeomError::UnsupportedHypothesis("sphere calculus needs a homogeneous field".into())
    })?;
    let ambient = x.len();
    let n = ambient - 1;
    let r2: f64 = x.iter().map(|v| v * v).sum();
    if (r2 - 1.0).abs() > 1e-9 {
        return Err(GeomError::OutsideDomain(x.to_vec()));
    }
    let jet = eval_jet2(f, x)?;
    let kf = k as f64;
    let grad_h: Vec<f64> = jet
        .grad
        .iter()
        .zip(x)
        .map(|(g, xi)| g - kf * jet.value * xi)
        .collect();
    let grad_e_sq: f64 = jet.grad.iter().map(|g| g * g).sum();
    let grad_norm_sq = grad_e_sq - kf * kf * jet.value * jet.value;
    let direct: f64 = grad_h.iter().map(|g| g * g).sum();
    let lap_e = jet.hess.trace();
    let lap_h = lap_e - kf * (kf + n as f64 - 1.0) * jet.value;
    let tangency_residual = crate::linalg::dot(&grad_h, &x.to_vec()).abs();
    let norm_identity_residual = (direct - grad_norm_sq).abs();
    Ok(SphereCalculus {
        value: jet.value,
        grad_h,
        grad_norm_sq,
        lap_h,
        tangency_residual,
        norm_identity_residual,
    })
}

/// The two ambient expressions whose per-level constancy decides the
/// isoparametric property for the drift x |-> xQ.
pub fn sphere_criterion_expressions(
    f: &ScalarField,
    q: &SkewMatrix,
    x: &[f64],
    tol: &Tolerances,
) -> Result<(f64, f64)> {
    let calc = sphere_calculus(f, x)?;
    if calc.grad_norm_sq < tol.critical_gradient * tol.critical_gradient {
        return Err(GeomError::CriticalPoint(calc.grad_norm_sq.max(0.0).sqrt()));
    }
    let norm = calc.grad_norm_sq.sqrt();
    let xq = q.apply_row(x);
    let jet = eval_jet2(f, x)?;
    let rho: f64 = crate::linalg::dot(&jet.grad, &xq);
    let e1 = norm + rho;

    // grad_E rho by one more dual level: rho(x) = <grad_E Phi(x), xQ>.
    let ambient = x.len();
    let xd: Vec<D1> = seed(x);
    let nested: Vec<Dual<D1>> = xd
        .iter()
        .enumerate()
        .map(|(i, v)| Dual::variable(v.clone(), i, ambient))
        .collect();
    let out = f.eval(&nested);
    let xq_d = q.apply_row(&xd);
    let mut rho_d = D1::constant(0.0);
    for i in 0..ambient {
        rho_d = rho_d + out.d(i) * xq_d[i].clone();
    }
    let grad_rho: Vec<f64> = (0..ambient).map(|j| rho_d.d(j)).collect();
    let pairing: f64 = crate::linalg::dot(&grad_rho, &jet.grad);
    let e2 = calc.lap_h / norm + pairing / calc.grad_norm_sq;
    Ok((e1, e2))
}

/// Per-level samples of (e1, e2) over the sphere; feeds the shared
/// verdict machinery in the isoparametric module.
pub fn sphere_criterion_samples(
    f: &ScalarField,
    q: &SkewMatrix,
    levels: &[f64],
    count: usize,
    seed_val: u64,
    tol: &Tolerances,
) -> Result<Vec<(f64, Vec<Vec<f64>>, Vec<(f64, f64)>, usize)>> {
    let ambient = q.dim();
    f.verify_homogeneous(ambient, seed_val)?;
    let mut out = Vec::with_capacity(levels.len());
    for (idx, &t) in levels.iter().enumerate() {
        let sample = sample_sphere_level_set(f, ambient, t, count, seed_val, idx, tol)?;
        let mut values = Vec::with_capacity(sample.points.len());
        let mut kept = Vec::with_capacity(sample.points.len());
        let mut excluded = sample.excluded;
        for p in &sample.points {
            match sphere_criterion_expressions(f, q, p, tol) {
                Ok(pair) => {
                    values.push(pair);
                    kept.push(p.clone());
                }
                Err(GeomError::CriticalPoint(_)) => excluded += 1,
                Err(e) => return Err(e),
            }
        }
        if values.len() < count.max(1) * 9 / 10 {
            return Err(GeomError::CriticalLevel {
                level: t,
                excluded,
                total: count,
            });
        }
        out.push((t, kept, values, excluded));
    }
    Ok(out)
}

pub fn default_sphere_levels(
    f: &ScalarField,
    ambient_dim: usize,
    levels: usize,
    seed_val: u64,
) -> Result<Vec<f64>> {
    auto_levels_sphere(f, ambient_dim, levels, seed_val)
}


#[cfg(test)]
mod chart_cross_check_tests {
    use super::*;
    use crate::field::stereographic;
    use crate::level_set::sample_sphere_level_set;
    use crate::space_form::SpaceForm;

    #[test]
    fn extrinsic_calculus_matches_chart_pullback() {
        // The ambient identities and the chart pipeline compute the same
        // gradient norm and Laplacian at corresponding points (away from
        // the projection pole).
        let text = "dot(block(1,1),block(1,1)) - dot(block(2,3),block(2,3))";
        let ambient = ScalarField::homogeneous(text, 2).unwrap();
        let chart_field = ScalarField::SpherePullback {
            phi: crate::expr::parse_expr(text).unwrap(),
        };
        let space = SpaceForm::new(2, 1.0);
        let tol = Tolerances::default();
        for (idx, t) in [-0.5, 0.0, 0.4].into_iter().enumerate() {
            let sample = sample_sphere_level_set(&ambient, 3, t, 15, 77, idx, &tol).unwrap();
            for eta in &sample.points {
                if eta[2] > 0.8 {
                    continue; // too close to the projection pole
                }
                let x = stereographic(eta);
                let calc = sphere_calculus(&ambient, eta).unwrap();
                let norm_chart = space.grad_norm(&chart_field, &x).unwrap();
                let (_, _, lap_chart) = space.grad_hess_lap(&chart_field, &x).unwrap();
                assert!(
                    (norm_chart - calc.grad_norm_sq.sqrt()).abs() < 1e-8,
                    "norm {} vs {}",
                    norm_chart,
                    calc.grad_norm_sq.sqrt()
                );
                assert!(
                    (lap_chart - calc.lap_h).abs() < 1e-7,
                    "laplacian {} vs {}",
                    lap_chart,
                    calc.lap_h
                );
            }
        }
    }
}
