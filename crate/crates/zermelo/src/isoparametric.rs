//! Isoparametric verification: per-level constancy of the gradient-norm
//! and Laplacian quantities, through three routes that must agree.
//!
//! * direct: F(grad f) and the nonlinear Laplacian of the drift metric;
//! * riemannian: |df|_h and the metric-h Laplacian (the base criterion);
//! * navigation: the pair of h-expressions equivalent to the direct test,
//!
//! ```text
//! |df|_h + df(W)   and   lap_h f / |df|_h + div W + <d(df(W)), df>_h / |df|_h^2,
//! ```
//!
//! plus the drift-derivative test: for homothetic W and h-isoparametric
//! f, the metric criterion holds iff df(W) is a function of f, in which
//! case the profiles reconstruct as
//!
//! ```text
//! a~ = a + phi,      b~ = (a + phi) (b/a - 2 n k0 + phi'),
//! ```
//!
//! the second line being the first navigation expression times the
//! second.

use crate::config::Tolerances;
use crate::dual::{seed, Dual, Real, D1};
use crate::error::{GeomError, Result};
use crate::field::ScalarField;
use crate::jet::eval_jet2;
use crate::level_set::{auto_levels_chart, sample_level_set, LevelSample};
use crate::randers::RandersMetric;
use crate::space_form::SpaceForm;
use crate::sphere::{sphere_calculus, sphere_criterion_samples};
use crate::vector_field::{classify_field, divergence, FieldClass, SkewMatrix, VectorFieldSpec};

/// Statistics of one quantity on one level.
#[derive(Clone, Debug)]
pub struct LevelStats {
    pub level: f64,
    pub mean: f64,
    pub spread: f64,
    pub count: usize,
    pub excluded: usize,
}

/// Per-level means of a sampled quantity: the numerical realization of a
/// profile t -> value.
#[derive(Clone, Debug)]
pub struct Profile {
    pub stats: Vec<LevelStats>,
}

impl Profile {
    pub fn levels(&self) -> Vec<f64> {
        self.stats.iter().map(|s| s.level).collect()
    }

    pub fn means(&self) -> Vec<f64> {
        self.stats.iter().map(|s| s.mean).collect()
    }

    /// True when every level passes the constancy test.
    pub fn is_constant_per_level(&self, tol: &Tolerances) -> bool {
        self.stats
            .iter()
            .all(|s| s.spread < tol.level_spread(s.mean))
    }

    pub fn worst_spread(&self) -> f64 {
        self.stats.iter().map(|s| s.spread).fold(0.0, f64::max)
    }

    /// Derivative of the mean with respect to the level, by central
    /// differences (one-sided at the ends).
    pub fn derivative(&self) -> Vec<f64> {
        let n = self.stats.len();
        let t: Vec<f64> = self.levels();
        let v: Vec<f64> = self.means();
        (0..n)
            .map(|i| {
                let (a, b) = if i == 0 {
                    (0, 1.min(n - 1))
                } else if i == n - 1 {
                    (n - 2, n - 1)
                } else {
                    (i - 1, i + 1)
                };
                if a == b {
                    0.0
                } else {
                    (v[b] - v[a]) / (t[b] - t[a])
                }
            })
            .collect()
    }

    /// Least-squares polynomial fit of the means; returns coefficients
    /// (low degree first) and the max deviation at the level means.
    pub fn poly_fit(&self, degree: usize) -> (Vec<f64>, f64) {
        use nalgebra::{DMatrix, DVector};
        let n = self.stats.len();
        let d = degree.min(n.saturating_sub(1));
        let vand = DMatrix::from_fn(n, d + 1, |i, j| self.stats[i].level.powi(j as i32));
        let rhs = DVector::from_vec(self.means());
        let svd = vand.clone().svd(true, true);
        let coeffs = svd.solve(&rhs, 1e-12).expect("least squares");
        let fitted = vand * &coeffs;
        let dev = (fitted - rhs).abs().max();
        (coeffs.iter().copied().collect(), dev)
    }
}

/// Groups raw (level, value) samples into a profile; needs at least two
/// distinct levels to be a profile rather than a single constant.
pub fn fit_profiles(samples: &[(f64, f64)]) -> Result<Profile> {
    use std::collections::BTreeMap;
    let mut groups: BTreeMap<u64, (f64, Vec<f64>)> = BTreeMap::new();
    for &(t, v) in samples {
        groups
            .entry(t.to_bits())
            .or_insert_with(|| (t, Vec::new()))
            .1
            .push(v);
    }
    if groups.len() < 2 {
        return Err(GeomError::EmptySample(
            "a profile needs at least two distinct levels".into(),
        ));
    }
    let mut stats: Vec<LevelStats> = groups
        .into_values()
        .map(|(t, vs)| {
            let mean = vs.iter().sum::<f64>() / vs.len() as f64;
            let spread = vs.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
                - vs.iter().fold(f64::INFINITY, |a, &b| a.min(b));
            LevelStats {
                level: t,
                mean,
                spread,
                count: vs.len(),
                excluded: 0,
            }
        })
        .collect();
    stats.sort_by(|a, b| a.level.total_cmp(&b.level));
    Ok(Profile { stats })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Isoparametric,
    TransnormalOnly,
    Neither,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Isoparametric => write!(f, "isoparametric"),
            Verdict::TransnormalOnly => write!(f, "transnormal only"),
            Verdict::Neither => write!(f, "neither"),
        }
    }
}

/// Verdict plus the two profiles that produced it. `norm` carries the
/// first-line quantity, `laplacian` the second-line one.
#[derive(Clone, Debug)]
pub struct IsoparametricReport {
    pub verdict: Verdict,
    pub norm: Profile,
    pub laplacian: Profile,
    pub excluded: usize,
    /// Rows of per-point data for CSV export: (level, point, first, second).
    pub samples: Vec<(f64, Vec<f64>, f64, f64)>,
}

impl IsoparametricReport {
    fn from_profiles(
        norm: Profile,
        laplacian: Profile,
        excluded: usize,
        samples: Vec<(f64, Vec<f64>, f64, f64)>,
        tol: &Tolerances,
    ) -> Self {
        let first = norm.is_constant_per_level(tol);
        let second = laplacian.is_constant_per_level(tol);
        let verdict = match (first, second) {
            (true, true) => Verdict::Isoparametric,
            (true, false) => Verdict::TransnormalOnly,
            _ => Verdict::Neither,
        };
        IsoparametricReport {
            verdict,
            norm,
            laplacian,
            excluded,
            samples,
        }
    }
}

/// Common sampling configuration for the level checks.
#[derive(Clone, Debug)]
pub struct LevelPlan {
    pub levels: Vec<f64>,
    pub count: usize,
    pub seed: u64,
    pub box_radius: f64,
}

impl LevelPlan {
    /// Levels chosen automatically from the observed range of f.
    pub fn auto(
        space: &SpaceForm,
        f: &ScalarField,
        levels: usize,
        count: usize,
        seed: u64,
        box_radius: f64,
    ) -> Result<Self> {
        Ok(LevelPlan {
            levels: auto_levels_chart(space, f, box_radius, levels, seed)?,
            count,
            seed,
            box_radius,
        })
    }
}

fn collect_levels(
    space: &SpaceForm,
    f: &ScalarField,
    drift: Option<&VectorFieldSpec>,
    plan: &LevelPlan,
    tol: &Tolerances,
    mut eval: impl FnMut(&[f64]) -> Result<(f64, f64)>,
) -> Result<(Profile, Profile, usize, Vec<(f64, Vec<f64>, f64, f64)>)> {
    let mut norm_stats = Vec::with_capacity(plan.levels.len());
    let mut lap_stats = Vec::with_capacity(plan.levels.len());
    let mut excluded_total = 0;
    let mut rows = Vec::new();
    for (idx, &t) in plan.levels.iter().enumerate() {
        let sample: LevelSample = sample_level_set(
            space,
            f,
            drift,
            t,
            plan.count,
            plan.box_radius,
            plan.seed,
            idx,
            tol,
        )?;
        let mut firsts = Vec::with_capacity(sample.points.len());
        let mut seconds = Vec::with_capacity(sample.points.len());
        let mut excluded = sample.excluded;
        for p in &sample.points {
            match eval(p) {
                Ok((a, b)) => {
                    firsts.push(a);
                    seconds.push(b);
                    rows.push((t, p.clone(), a, b));
                }
                Err(GeomError::CriticalPoint(_)) => excluded += 1,
                Err(e) => return Err(e),
            }
        }
        if firsts.len() < plan.count.max(1) * 9 / 10 {
            return Err(GeomError::CriticalLevel {
                level: t,
                excluded,
                total: plan.count,
            });
        }
        let stats = |vals: &[f64]| {
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let spread = vals.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
                - vals.iter().fold(f64::INFINITY, |a, &b| a.min(b));
            LevelStats {
                level: t,
                mean,
                spread,
                count: vals.len(),
                excluded,
            }
        };
        norm_stats.push(stats(&firsts));
        lap_stats.push(stats(&seconds));
        excluded_total += excluded;
    }
    Ok((
        Profile { stats: norm_stats },
        Profile { stats: lap_stats },
        excluded_total,
        rows,
    ))
}

/// Direct test: F(grad f) and the nonlinear Laplacian must be constant
/// per level.
pub fn check_direct(
    f: &ScalarField,
    metric: &RandersMetric,
    plan: &LevelPlan,
    tol: &Tolerances,
) -> Result<IsoparametricReport> {
    let (norm, lap, excluded, rows) = collect_levels(
        metric.space(),
        f,
        Some(metric.field()),
        plan,
        tol,
        |p| {
            let grad = metric.finsler_gradient(f, p)?;
            let lap = metric.finsler_laplacian(f, p, tol)?;
            Ok((grad.f_of_grad, lap))
        },
    )?;
    Ok(IsoparametricReport::from_profiles(
        norm, lap, excluded, rows, tol,
    ))
}

/// Base-metric test: |df|_h and the metric-h Laplacian. Chart fields run
/// on the chart; homogeneous ambient fields run extrinsically on the unit
/// sphere through the homogeneity identities.
pub fn check_riemannian(
    f: &ScalarField,
    space: &SpaceForm,
    plan: &LevelPlan,
    tol: &Tolerances,
) -> Result<IsoparametricReport> {
    if let ScalarField::Homogeneous { .. } = f {
        let ambient = space.dim() + 1;
        f.verify_homogeneous(ambient, plan.seed)?;
        let mut norm_stats = Vec::new();
        let mut lap_stats = Vec::new();
        let mut rows = Vec::new();
        let mut excluded_total = 0;
        for (idx, &t) in plan.levels.iter().enumerate() {
            let sample = crate::level_set::sample_sphere_level_set(
                f, ambient, t, plan.count, plan.seed, idx, tol,
            )?;
            let mut firsts = Vec::new();
            let mut seconds = Vec::new();
            let mut excluded = sample.excluded;
            for p in &sample.points {
                let calc = sphere_calculus(f, p)?;
                if calc.grad_norm_sq < tol.critical_gradient * tol.critical_gradient {
                    excluded += 1;
                    continue;
                }
                let a = calc.grad_norm_sq.sqrt();
                firsts.push(a);
                seconds.push(calc.lap_h);
                rows.push((t, p.clone(), a, calc.lap_h));
            }
            if firsts.len() < plan.count.max(1) * 9 / 10 {
                return Err(GeomError::CriticalLevel {
                    level: t,
                    excluded,
                    total: plan.count,
                });
            }
            let stats = |vals: &[f64]| LevelStats {
                level: t,
                mean: vals.iter().sum::<f64>() / vals.len() as f64,
                spread: vals.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
                    - vals.iter().fold(f64::INFINITY, |a, &b| a.min(b)),
                count: vals.len(),
                excluded,
            };
            norm_stats.push(stats(&firsts));
            lap_stats.push(stats(&seconds));
            excluded_total += excluded;
        }
        return Ok(IsoparametricReport::from_profiles(
            Profile { stats: norm_stats },
            Profile { stats: lap_stats },
            excluded_total,
            rows,
            tol,
        ));
    }

    let (norm, lap, excluded, rows) = collect_levels(space, f, None, plan, tol, |p| {
        let jet = eval_jet2(f, p)?;
        let h_inv = space.metric_inv(p);
        let norm = h_inv.bilinear(&jet.grad, &jet.grad).max(0.0).sqrt();
        if norm < tol.critical_gradient {
            return Err(GeomError::CriticalPoint(norm));
        }
        let (_, _, lap) = space.grad_hess_lap(f, p)?;
        Ok((norm, lap))
    })?;
    Ok(IsoparametricReport::from_profiles(
        norm, lap, excluded, rows, tol,
    ))
}

/// Navigation test: the pair of h-expressions that the drift metric
/// turns into the direct test. For Killing or homothetic drifts the
/// divergence is additionally pinned to -2 n k0.
pub fn check_navigation(
    f: &ScalarField,
    space: &SpaceForm,
    w: &VectorFieldSpec,
    plan: &LevelPlan,
    tol: &Tolerances,
) -> Result<IsoparametricReport> {
    let n = space.dim();
    let classify = classify_field(space, w, plan.box_radius, plan.seed)?;
    let expected_div = match classify.class {
        FieldClass::Killing => Some(0.0),
        FieldClass::Homothetic { dilation } => Some(-2.0 * n as f64 * dilation),
        FieldClass::Neither => None,
    };
    let (norm, lap, excluded, rows) = collect_levels(space, f, Some(w), plan, tol, |p| {
        let jet = eval_jet2(f, p)?;
        let h_inv = space.metric_inv(p);
        let grad_norm = h_inv.bilinear(&jet.grad, &jet.grad).max(0.0).sqrt();
        if grad_norm < tol.critical_gradient {
            return Err(GeomError::CriticalPoint(grad_norm));
        }
        let (_, _, lap_h) = space.grad_hess_lap(f, p)?;
        let div = divergence(space, w, p)?;
        if let Some(expect) = expected_div {
            if (div - expect).abs() > 1e-6 * expect.abs().max(1.0) {
                return Err(GeomError::ConsistencyCheck(format!(
                    "divergence {:.6} deviates from the homothety value {:.6}",
                    div, expect
                )));
            }
        }
        // rho = df(W); its differential by one extra dual level.
        let xd: Vec<D1> = seed(p);
        let nested: Vec<Dual<D1>> = xd
            .iter()
            .enumerate()
            .map(|(i, v)| Dual::variable(v.clone(), i, n))
            .collect();
        let fd = f.eval(&nested);
        let w_d = w.eval(space, &xd);
        let mut rho_d = D1::constant(0.0);
        for i in 0..n {
            rho_d = rho_d + fd.d(i) * w_d[i].clone();
        }
        let rho = rho_d.value();
        let d_rho: Vec<f64> = (0..n).map(|j| rho_d.d(j)).collect();
        let pairing = h_inv.bilinear(&d_rho, &jet.grad);

        let e1 = grad_norm + rho;
        let e2 = lap_h / grad_norm + div + pairing / (grad_norm * grad_norm);
        Ok((e1, e2))
    })?;
    Ok(IsoparametricReport::from_profiles(
        norm, lap, excluded, rows, tol,
    ))
}

/// Ambient-sphere test for homogeneous fields under rotational drift.
pub fn check_sphere_criterion(
    f: &ScalarField,
    q: &SkewMatrix,
    plan: &LevelPlan,
    tol: &Tolerances,
) -> Result<IsoparametricReport> {
    let data = sphere_criterion_samples(f, q, &plan.levels, plan.count, plan.seed, tol)?;
    let mut norm_stats = Vec::new();
    let mut lap_stats = Vec::new();
    let mut rows = Vec::new();
    let mut excluded_total = 0;
    for (t, points, values, excluded) in data {
        let firsts: Vec<f64> = values.iter().map(|v| v.0).collect();
        let seconds: Vec<f64> = values.iter().map(|v| v.1).collect();
        for (p, v) in points.iter().zip(&values) {
            rows.push((t, p.clone(), v.0, v.1));
        }
        let stats = |vals: &[f64]| LevelStats {
            level: t,
            mean: vals.iter().sum::<f64>() / vals.len() as f64,
            spread: vals.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
                - vals.iter().fold(f64::INFINITY, |a, &b| a.min(b)),
            count: vals.len(),
            excluded,
        };
        norm_stats.push(stats(&firsts));
        lap_stats.push(stats(&seconds));
        excluded_total += excluded;
    }
    Ok(IsoparametricReport::from_profiles(
        Profile { stats: norm_stats },
        Profile { stats: lap_stats },
        excluded_total,
        rows,
        tol,
    ))
}

/// Result of the drift-derivative test.
#[derive(Clone, Debug)]
pub struct DriftDerivativeReport {
    /// Per-level spread of df(W) stayed below tolerance on every level.
    pub passes: bool,
    /// Fitted profile of df(W).
    pub phi: Profile,
    pub dilation: f64,
    /// Base profiles a, b of the h-criterion.
    pub riemannian: IsoparametricReport,
    /// Direct profiles a~, b~ of the drift criterion.
    pub direct: IsoparametricReport,
    /// max_i |a~_i - (a_i + phi_i)| over level means.
    pub a_reconstruction_residual: f64,
    /// max_i |b~_i - (a_i + phi_i)(b_i/a_i - 2 n k0 + phi'_i)| over
    /// level means.
    pub b_reconstruction_residual: f64,
    /// The equivalence itself: passes iff the direct verdict is
    /// isoparametric.
    pub iff_consistent: bool,
}

/// Tests df(W) = phi(f) for a homothetic drift over an h-isoparametric
/// function, and reconstructs the drift profiles from the base ones.
pub fn check_drift_derivative(
    f: &ScalarField,
    metric: &RandersMetric,
    plan: &LevelPlan,
    tol: &Tolerances,
) -> Result<DriftDerivativeReport> {
    let space = metric.space();
    let n = space.dim();
    let classify = classify_field(space, metric.field(), plan.box_radius, plan.seed)?;
    let k0 = classify.dilation_or_err()?;

    let riemannian = check_riemannian(f, space, plan, tol)?;
    if riemannian.verdict != Verdict::Isoparametric {
        return Err(GeomError::UnsupportedHypothesis(format!(
            "base function is not isoparametric for h (verdict: {})",
            riemannian.verdict
        )));
    }

    let (phi, _, _, _) = collect_levels(space, f, Some(metric.field()), plan, tol, |p| {
        let grad = metric.finsler_gradient(f, p)?;
        Ok((grad.df_of_w, 0.0))
    })?;
    let passes = phi.is_constant_per_level(tol);

    let direct = check_direct(f, metric, plan, tol)?;
    let iff_consistent = passes == (direct.verdict == Verdict::Isoparametric);

    let mut a_res: f64 = 0.0;
    let mut b_res: f64 = 0.0;
    if passes {
        let a = riemannian.norm.means();
        let b = riemannian.laplacian.means();
        let at = direct.norm.means();
        let bt = direct.laplacian.means();
        let phim = phi.means();
        let dphi = phi.derivative();
        for i in 0..a.len() {
            a_res = a_res.max((at[i] - (a[i] + phim[i])).abs());
            let predicted =
                (a[i] + phim[i]) * (b[i] / a[i] - 2.0 * n as f64 * k0 + dphi[i]);
            b_res = b_res.max((bt[i] - predicted).abs());
        }
    }
    Ok(DriftDerivativeReport {
        passes,
        phi,
        dilation: k0,
        riemannian,
        direct,
        a_reconstruction_residual: a_res,
        b_reconstruction_residual: b_res,
        iff_consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn plan(space: &SpaceForm, f: &ScalarField, box_radius: f64, seed: u64) -> LevelPlan {
        LevelPlan::auto(space, f, 5, 24, seed, box_radius).unwrap()
    }

    #[test]
    fn linear_function_in_flat_space() {
        let space = SpaceForm::euclidean(2);
        let m = RandersMetric::riemannian(space.clone());
        let f = ScalarField::coordinate(0);
        let p = plan(&space, &f, 1.0, 7);
        let rep = check_direct(&f, &m, &p, &tol()).unwrap();
        assert_eq!(rep.verdict, Verdict::Isoparametric);
        for s in &rep.norm.stats {
            assert!((s.mean - 1.0).abs() < 1e-10);
        }
        for s in &rep.laplacian.stats {
            assert!(s.mean.abs() < 1e-9);
        }
    }

    #[test]
    fn linear_function_with_constant_drift() {
        let space = SpaceForm::euclidean(2);
        let m = RandersMetric::from_parts(space.clone(), VectorFieldSpec::constant(vec![0.5, 0.0]))
            .unwrap();
        let f = ScalarField::coordinate(0);
        let p = plan(&space, &f, 1.0, 7);
        let rep = check_direct(&f, &m, &p, &tol()).unwrap();
        assert_eq!(rep.verdict, Verdict::Isoparametric);
        for s in &rep.norm.stats {
            assert!((s.mean - 1.5).abs() < 1e-10, "{:?}", s);
        }
        for s in &rep.laplacian.stats {
            assert!(s.mean.abs() < 1e-9);
        }
        // The navigation route must agree level by level.
        let nav = check_navigation(&f, &space, m.field(), &p, &tol()).unwrap();
        assert_eq!(nav.verdict, Verdict::Isoparametric);
        for s in &nav.norm.stats {
            assert!((s.mean - 1.5).abs() < 1e-10);
        }
    }

    #[test]
    fn parabola_minus_line_is_not_transnormal() {
        let space = SpaceForm::euclidean(2);
        let m = RandersMetric::riemannian(space.clone());
        let f = ScalarField::expr("x1^2 - x2").unwrap();
        let p = plan(&space, &f, 1.0, 11);
        let rep = check_direct(&f, &m, &p, &tol()).unwrap();
        assert_eq!(rep.verdict, Verdict::Neither);
        let nav = check_navigation(&f, &space, m.field(), &p, &tol()).unwrap();
        assert_eq!(nav.verdict, Verdict::Neither);
        let rie = check_riemannian(&f, &space, &p, &tol()).unwrap();
        assert_eq!(rie.verdict, Verdict::Neither);
    }

    #[test]
    fn distance_from_origin_profiles() {
        // f = |x| away from 0: a = 1, b = (n-1)/f.
        let space = SpaceForm::euclidean(3);
        let f = ScalarField::Builtin(crate::field::Builtin::Norm);
        let p = LevelPlan {
            levels: vec![0.4, 0.6, 0.8, 1.0],
            count: 24,
            seed: 3,
            box_radius: 1.2,
        };
        let rep = check_riemannian(&f, &space, &p, &tol()).unwrap();
        assert_eq!(rep.verdict, Verdict::Isoparametric);
        for s in &rep.norm.stats {
            assert!((s.mean - 1.0).abs() < 1e-9);
        }
        for s in &rep.laplacian.stats {
            assert!((s.mean - 2.0 / s.level).abs() < 1e-8, "{:?}", s);
        }
    }

    #[test]
    fn funk_disk_scenario_reconstructs_profiles() {
        // f = |x|^2 with drift -x/2 (dilation 1/4) on the flat chart:
        // phi(f) = -f, a~ = 2 sqrt(f) - f, b~ = 2 - 4 sqrt(f).
        let space = SpaceForm::euclidean(2);
        let m =
            RandersMetric::from_parts(space.clone(), VectorFieldSpec::radial(2, 0.25)).unwrap();
        let f = ScalarField::norm_sq();
        let p = LevelPlan {
            levels: vec![0.25, 0.49, 0.81, 1.0, 1.21],
            count: 24,
            seed: 13,
            box_radius: 1.4,
        };
        let rep = check_drift_derivative(&f, &m, &p, &tol()).unwrap();
        assert!(rep.passes);
        assert!(rep.iff_consistent);
        assert_eq!(rep.direct.verdict, Verdict::Isoparametric);
        assert!((rep.dilation - 0.25).abs() < 1e-9);
        for (s, phi) in rep.phi.stats.iter().zip(rep.phi.means()) {
            assert!((phi + s.level).abs() < 1e-9, "{:?}", s);
        }
        for s in &rep.direct.norm.stats {
            let expect = 2.0 * s.level.sqrt() - s.level;
            assert!((s.mean - expect).abs() < 1e-8, "{:?}", s);
        }
        for s in &rep.direct.laplacian.stats {
            // b~ = (a + phi)(b/a - 2 n k0 + phi') with a = 2 sqrt(t),
            // b = 4, phi = -t: 2 (2 - sqrt(t)) (1 - sqrt(t)).
            let r = s.level.sqrt();
            let expect = 2.0 * (2.0 - r) * (1.0 - r);
            assert!((s.mean - expect).abs() < 1e-7, "{:?}", s);
        }
        assert!(rep.a_reconstruction_residual < 1e-6);
        assert!(rep.b_reconstruction_residual < 1e-4);
    }

    #[test]
    fn navigation_expressions_reproduce_direct_profiles() {
        // On an isoparametric scenario the first navigation expression is
        // the direct norm profile and the second is the ratio
        // laplacian / norm, level by level.
        let space = SpaceForm::euclidean(2);
        let m =
            RandersMetric::from_parts(space.clone(), VectorFieldSpec::radial(2, 0.25)).unwrap();
        let f = ScalarField::norm_sq();
        let p = LevelPlan {
            levels: vec![0.25, 0.49, 0.81, 1.21],
            count: 24,
            seed: 97,
            box_radius: 1.4,
        };
        let direct = check_direct(&f, &m, &p, &tol()).unwrap();
        let nav = check_navigation(&f, &space, m.field(), &p, &tol()).unwrap();
        assert_eq!(direct.verdict, Verdict::Isoparametric);
        for i in 0..p.levels.len() {
            let a_tilde = direct.norm.stats[i].mean;
            let b_tilde = direct.laplacian.stats[i].mean;
            let e1 = nav.norm.stats[i].mean;
            let e2 = nav.laplacian.stats[i].mean;
            assert!((e1 - a_tilde).abs() < 1e-9, "level {}: {} vs {}", i, e1, a_tilde);
            assert!(
                (e2 - b_tilde / a_tilde).abs() < 1e-8,
                "level {}: {} vs {}",
                i,
                e2,
                b_tilde / a_tilde
            );
        }
    }

    #[test]
    fn rotational_killing_drift_keeps_linear_functions_isoparametric() {
        // Height function with a rotation fixing its axis plus a
        // translation: df(W) = <e3, e> constant.
        let space = SpaceForm::euclidean(3);
        let e = vec![0.2, 0.1, 0.3];
        let m = RandersMetric::from_parts(
            space.clone(),
            VectorFieldSpec::Affine {
                dilation: 0.0,
                q: SkewMatrix::rotation(3, 0, 1, 0.5),
                e: e.clone(),
            },
        )
        .unwrap();
        let f = ScalarField::coordinate(2);
        let p = plan(&space, &f, 0.9, 19);
        let rep = check_drift_derivative(&f, &m, &p, &tol()).unwrap();
        assert!(rep.passes);
        assert!(rep.iff_consistent);
        for phi in rep.phi.means() {
            assert!((phi - 0.3).abs() < 1e-10);
        }
        for s in &rep.direct.norm.stats {
            assert!((s.mean - 1.3).abs() < 1e-10);
        }
    }

    #[test]
    fn generic_translation_breaks_sphere_levels() {
        // f = |x|^2 is h-isoparametric, but df(W) = 2<x, e> varies on the
        // spheres, so the drift criterion must fail and the direct test
        // must agree that it fails.
        let space = SpaceForm::euclidean(2);
        let m = RandersMetric::from_parts(space.clone(), VectorFieldSpec::constant(vec![0.4, 0.0]))
            .unwrap();
        let f = ScalarField::norm_sq();
        let p = LevelPlan {
            levels: vec![0.36, 0.64, 1.0],
            count: 24,
            seed: 23,
            box_radius: 1.3,
        };
        let rep = check_drift_derivative(&f, &m, &p, &tol()).unwrap();
        assert!(!rep.passes);
        assert!(rep.iff_consistent);
        assert_ne!(rep.direct.verdict, Verdict::Isoparametric);
        // First line already fails: not even transnormal.
        assert_eq!(rep.direct.verdict, Verdict::Neither);
    }

    #[test]
    fn sphere_block_quadric_is_isoparametric() {
        // Phi = x1^2 - (x2^2 + x3^2) on S^2 with a block rotation.
        let f = ScalarField::homogeneous(
            "dot(block(1,1),block(1,1)) - dot(block(2,3),block(2,3))",
            2,
        )
        .unwrap();
        let q = SkewMatrix::rotation(3, 1, 2, 0.5);
        let plan = LevelPlan {
            levels: vec![-0.6, -0.3, 0.0, 0.3, 0.6],
            count: 24,
            seed: 29,
            box_radius: 1.0,
        };
        let rep = check_sphere_criterion(&f, &q, &plan, &tol()).unwrap();
        assert_eq!(rep.verdict, Verdict::Isoparametric);
        // Riemannian profiles on the sphere: a = 2 sqrt(1 - f^2),
        // b = -2 - 6 f; with <grad Phi, xQ> = 0 the first expressions
        // coincide.
        let space = SpaceForm::new(2, 1.0);
        let rie = check_riemannian(&f, &space, &plan, &tol()).unwrap();
        assert_eq!(rie.verdict, Verdict::Isoparametric);
        for s in &rie.norm.stats {
            let expect = 2.0 * (1.0 - s.level * s.level).sqrt();
            assert!((s.mean - expect).abs() < 1e-8, "{:?}", s);
        }
        for s in &rie.laplacian.stats {
            let expect = -2.0 - 6.0 * s.level;
            assert!((s.mean - expect).abs() < 1e-8, "{:?}", s);
        }
    }

    #[test]
    fn sphere_height_function_is_isoparametric() {
        // Phi = <x, e3> on S^2 with a rotation fixing the e3 axis: the
        // drift term <grad Phi, xQ> vanishes and the levels are the
        // parallels, so both ambient expressions are per-level constant.
        let f = ScalarField::homogeneous("x3", 1).unwrap();
        let q = SkewMatrix::rotation(3, 0, 1, 0.6);
        let plan = LevelPlan {
            levels: vec![-0.6, -0.2, 0.2, 0.6],
            count: 24,
            seed: 37,
            box_radius: 1.0,
        };
        let rep = check_sphere_criterion(&f, &q, &plan, &tol()).unwrap();
        assert_eq!(rep.verdict, Verdict::Isoparametric);
        for s in &rep.norm.stats {
            // a(t) = |grad_h Phi| = sqrt(1 - t^2) and the rotation term
            // vanishes.
            let expect = (1.0 - s.level * s.level).sqrt();
            assert!((s.mean - expect).abs() < 1e-9, "{:?}", s);
        }
    }

    #[test]
    fn sphere_cubic_with_generic_rotation_is_not_isoparametric() {
        let f = ScalarField::homogeneous("x1*x2*x3", 3).unwrap();
        let q = SkewMatrix::from_upper(3, vec![0.4, -0.2, 0.3]).unwrap();
        let plan = LevelPlan {
            levels: vec![-0.12, -0.06, 0.06, 0.12],
            count: 24,
            seed: 31,
            box_radius: 1.0,
        };
        let rep = check_sphere_criterion(&f, &q, &plan, &tol()).unwrap();
        assert_eq!(rep.verdict, Verdict::Neither);
    }

    #[test]
    fn profile_fitting_and_negative_control() {
        let samples: Vec<(f64, f64)> = vec![
            (0.0, 1.0),
            (0.0, 1.0),
            (1.0, 3.0),
            (1.0, 3.0),
            (2.0, 5.0),
        ];
        let profile = fit_profiles(&samples).unwrap();
        assert!(profile.is_constant_per_level(&tol()));
        let d = profile.derivative();
        assert!((d[1] - 2.0).abs() < 1e-12);
        let (coeffs, dev) = profile.poly_fit(1);
        assert!((coeffs[0] - 1.0).abs() < 1e-10);
        assert!((coeffs[1] - 2.0).abs() < 1e-10);
        assert!(dev < 1e-10);

        let noisy: Vec<(f64, f64)> = vec![(0.0, 1.0), (0.0, 1.5), (1.0, 3.0)];
        let profile = fit_profiles(&noisy).unwrap();
        assert!(!profile.is_constant_per_level(&tol()));

        assert!(fit_profiles(&[(0.0, 1.0), (0.0, 2.0)]).is_err());
    }
}
