//! Seeded sampling of level sets f^{-1}(t), by Newton projection along
//! the Riemannian gradient on charts and by constrained projection on the
//! extrinsic unit sphere. Membership is a purely metric-h affair here;
//! the drift only restricts sampling to points where it stays subunit.

use crate::config::Tolerances;
use crate::dual::{gradient, D1};
use crate::error::{GeomError, Result};
use crate::field::ScalarField;
use crate::jet::eval_jet2;
use crate::sampling::{level_rng, sample_point};
use crate::space_form::SpaceForm;
use crate::vector_field::VectorFieldSpec;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Points on one level, plus how many candidate starts were rejected
/// (projection failure, critical gradient, or leaving the usable domain).
#[derive(Clone, Debug)]
pub struct LevelSample {
    pub level: f64,
    pub points: Vec<Vec<f64>>,
    pub excluded: usize,
}

/// Newton projection onto f^{-1}(t) along the h-gradient from a chart
/// start point. Returns None when it fails to converge or walks out of
/// the domain.
fn project_chart(
    space: &SpaceForm,
    f: &ScalarField,
    t: f64,
    start: &[f64],
    tol: &Tolerances,
) -> Option<Vec<f64>> {
    let mut x = start.to_vec();
    for _ in 0..tol.max_newton_iters {
        if !space.contains(&x) {
            return None;
        }
        let jet = eval_jet2(f, &x).ok()?;
        let resid = jet.value - t;
        if resid.abs() < tol.newton_residual {
            return Some(x);
        }
        let h_inv = space.metric_inv(&x);
        let grad_up = h_inv.mul_vec(&jet.grad);
        let norm2: f64 = crate::linalg::dot(&jet.grad, &grad_up);
        if norm2 < tol.critical_gradient * tol.critical_gradient {
            return None;
        }
        let step = resid / norm2;
        for i in 0..x.len() {
            x[i] -= step * grad_up[i];
        }
    }
    None
}

/// Samples `count` points of f^{-1}(t) on the chart. When `drift` is
/// given, points must also satisfy ||W||_h <= 0.98 so that Finsler
/// quantities stay defined. Deterministic per (seed, level index).
pub fn sample_level_set(
    space: &SpaceForm,
    f: &ScalarField,
    drift: Option<&VectorFieldSpec>,
    t: f64,
    count: usize,
    box_radius: f64,
    seed: u64,
    level_index: usize,
    tol: &Tolerances,
) -> Result<LevelSample> {
    let mut rng = level_rng(seed, level_index);
    let mut points = Vec::with_capacity(count);
    let mut excluded = 0;
    let max_attempts = count * 20;
    let mut attempts = 0;
    while points.len() < count && attempts < max_attempts {
        attempts += 1;
        let start = sample_point(space, &mut rng, box_radius);
        let Some(x) = project_chart(space, f, t, &start, tol) else {
            excluded += 1;
            continue;
        };
        let jet = match eval_jet2(f, &x) {
            Ok(j) => j,
            Err(_) => {
                excluded += 1;
                continue;
            }
        };
        let h_inv = space.metric_inv(&x);
        let norm = h_inv.bilinear(&jet.grad, &jet.grad).max(0.0).sqrt();
        if norm < tol.critical_gradient {
            excluded += 1;
            continue;
        }
        if let Some(w) = drift {
            let h = space.metric(&x);
            let w_up = w.eval(space, &x);
            if h.bilinear(&w_up, &w_up) > 0.98 * 0.98 {
                excluded += 1;
                continue;
            }
        }
        points.push(x);
    }
    if points.len() < count.max(1) * 9 / 10 {
        return Err(GeomError::CriticalLevel {
            level: t,
            excluded,
            total: attempts,
        });
    }
    Ok(LevelSample {
        level: t,
        points,
        excluded,
    })
}

/// Uniformish random point of the unit sphere S^n in R^{n+1}.
fn random_sphere_point(rng: &mut ChaCha8Rng, ambient: usize) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..ambient).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n2: f64 = x.iter().map(|v| v * v).sum();
        if n2 > 0.05 && n2 <= 1.0 {
            let n = n2.sqrt();
            return x.into_iter().map(|v| v / n).collect();
        }
    }
}

/// Projects an ambient point onto {|x| = 1} intersect {Phi = t} by
/// Gauss-Newton on the two constraints.
fn project_sphere(phi: &ScalarField, t: f64, start: &[f64], tol: &Tolerances) -> Option<Vec<f64>> {
    let mut x = start.to_vec();
    let dim = x.len();
    for _ in 0..tol.max_newton_iters {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let (pv, pg) = gradient(|q: &[D1]| phi.eval(q), &x);
        let c = [r2 - 1.0, pv - t];
        if c[0].abs() < tol.newton_residual && c[1].abs() < tol.newton_residual {
            return Some(x);
        }
        // J = [2x; grad Phi], step = -J^T (J J^T)^{-1} c.
        let j0: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let a = crate::linalg::dot(&j0, &j0);
        let b = crate::linalg::dot(&j0, &pg);
        let d = crate::linalg::dot(&pg, &pg);
        let det = a * d - b * b;
        if det.abs() < 1e-18 {
            return None;
        }
        let l0 = (d * c[0] - b * c[1]) / det;
        let l1 = (-b * c[0] + a * c[1]) / det;
        for i in 0..dim {
            x[i] -= l0 * j0[i] + l1 * pg[i];
        }
    }
    None
}

/// Samples `count` points of {Phi = t} on the unit sphere S^n, where Phi
/// is the homogeneous ambient function of `f`.
pub fn sample_sphere_level_set(
    f: &ScalarField,
    ambient_dim: usize,
    t: f64,
    count: usize,
    seed: u64,
    level_index: usize,
    tol: &Tolerances,
) -> Result<LevelSample> {
    let mut rng = level_rng(seed, level_index);
    let mut points = Vec::with_capacity(count);
    let mut excluded = 0;
    let max_attempts = count * 20;
    let mut attempts = 0;
    while points.len() < count && attempts < max_attempts {
        attempts += 1;
        let start = random_sphere_point(&mut rng, ambient_dim);
        let Some(x) = project_sphere(f, t, &start, tol) else {
            excluded += 1;
            continue;
        };
        points.push(x);
    }
    if points.len() < count.max(1) * 9 / 10 {
        return Err(GeomError::CriticalLevel {
            level: t,
            excluded,
            total: attempts,
        });
    }
    Ok(LevelSample {
        level: t,
        points,
        excluded,
    })
}

/// Equispaced interior levels of the observed range of `f`, sampled with
/// the given seed: l_i = lo + (i+1)(hi-lo)/(L+1).
pub fn auto_levels_chart(
    space: &SpaceForm,
    f: &ScalarField,
    box_radius: f64,
    levels: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let mut rng = level_rng(seed, usize::MAX / 2);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for _ in 0..256 {
        let x = sample_point(space, &mut rng, box_radius);
        let v = f.eval(&x);
        if v.is_finite() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(GeomError::EmptySample("observed range of f is degenerate".into()));
    }
    Ok((0..levels)
        .map(|i| lo + (i as f64 + 1.0) * (hi - lo) / (levels as f64 + 1.0))
        .collect())
}

pub fn auto_levels_sphere(
    f: &ScalarField,
    ambient_dim: usize,
    levels: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let mut rng = level_rng(seed, usize::MAX / 2);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for _ in 0..256 {
        let x = random_sphere_point(&mut rng, ambient_dim);
        let v = f.eval(&x);
        if v.is_finite() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(GeomError::EmptySample("observed range of Phi is degenerate".into()));
    }
    Ok((0..levels)
        .map(|i| lo + (i as f64 + 1.0) * (hi - lo) / (levels as f64 + 1.0))
        .collect())
}
