//! Scenario-driven verification: a JSON config selects a space form, a
//! drift field, optionally a function and a hypersurface, and the suites
//! to run. The runner prints one PASS/FAIL line per check and can emit a
//! CSV of per-point quantities. Exit codes: 0 all requested verdicts
//! pass, 1 verification failure, 2 config error, 3 hypothesis error.

use crate::config::Tolerances;
use crate::error::{GeomError, Result};
use crate::field::ScalarField;
use crate::immersion::{CatalogId, Immersion};
use crate::isoparametric::{
    check_direct, check_drift_derivative, check_navigation, check_sphere_criterion,
    IsoparametricReport, LevelPlan, Verdict,
};
use crate::jet::eval_jet2;
use crate::level_set::{auto_levels_chart, auto_levels_sphere, sample_level_set};
use crate::randers::RandersMetric;
use crate::sampling::{sample_direction, sample_nav_point};
use crate::space_form::{Chart, SpaceForm};
use crate::vector_field::{classify_field, FieldClass, SkewMatrix, VectorFieldSpec};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use std::fmt::Write as _;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub dim: usize,
    pub curvature: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldConfig {
    Zero,
    Constant {
        e: Vec<f64>,
    },
    Affine {
        #[serde(default)]
        dilation: f64,
        #[serde(default)]
        q_upper: Vec<f64>,
        #[serde(default)]
        e: Vec<f64>,
    },
    Projective {
        #[serde(default)]
        q_upper: Vec<f64>,
        #[serde(default)]
        e: Vec<f64>,
    },
    SphereKilling {
        q_upper: Vec<f64>,
    },
    Custom {
        components: Vec<String>,
    },
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig::Zero
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionConfig {
    Expr { text: String },
    Coordinate { index: usize },
    NormSq,
    Norm,
    Linear { coefficients: Vec<f64> },
    /// Homogeneous ambient function on the unit sphere; the chart side
    /// uses its stereographic pullback.
    Homogeneous { text: String, degree: i32 },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypersurfaceConfig {
    pub catalog: CatalogId,
    #[serde(default)]
    pub radius: Option<f64>,
    #[serde(default)]
    pub offset: Option<f64>,
    /// Sphere-factor dimension for cylinders and tori.
    #[serde(default)]
    pub split: Option<usize>,
    #[serde(default = "default_orientation")]
    pub orientation: f64,
}

fn default_orientation() -> f64 {
    1.0
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChecksConfig {
    pub metric_identities: bool,
    pub shift: bool,
    pub isoparametric: bool,
    pub drift_derivative: bool,
    pub expect_verdict: Option<String>,
}

impl Default for ChecksConfig {
    fn default() -> Self {
        ChecksConfig {
            metric_identities: true,
            shift: false,
            isoparametric: false,
            drift_derivative: false,
            expect_verdict: None,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingConfig {
    pub levels: usize,
    pub count: usize,
    pub seed: u64,
    pub box_radius: f64,
    pub metric_samples: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            levels: 7,
            count: 40,
            seed: 7,
            box_radius: 1.0,
            metric_samples: 200,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub space: SpaceConfig,
    #[serde(default)]
    pub field: FieldConfig,
    #[serde(default)]
    pub function: Option<FunctionConfig>,
    #[serde(default)]
    pub hypersurface: Option<HypersurfaceConfig>,
    #[serde(default)]
    pub checks: ChecksConfig,
    #[serde(default)]
    pub sampling: SamplingConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Scenario> {
        serde_json::from_str(text).map_err(|e| GeomError::Config(e.to_string()))
    }

    pub fn from_path(path: &std::path::Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GeomError::Config(format!("{}: {}", path.display(), e)))?;
        Self::from_json(&text)
    }

    fn build_field(&self) -> Result<VectorFieldSpec> {
        let n = self.space.dim;
        Ok(match &self.field {
            FieldConfig::Zero => VectorFieldSpec::zero(n),
            FieldConfig::Constant { e } => VectorFieldSpec::constant(e.clone()),
            FieldConfig::Affine {
                dilation,
                q_upper,
                e,
            } => VectorFieldSpec::Affine {
                dilation: *dilation,
                q: skew_or_zero(n, q_upper)?,
                e: pad_or_err(n, e, "translation part")?,
            },
            FieldConfig::Projective { q_upper, e } => VectorFieldSpec::Projective {
                q: skew_or_zero(n, q_upper)?,
                e: pad_or_err(n, e, "translation part")?,
            },
            FieldConfig::SphereKilling { q_upper } => VectorFieldSpec::SphereKilling {
                q: skew_or_zero(n + 1, q_upper)?,
            },
            FieldConfig::Custom { components } => {
                let comps: Result<Vec<ScalarField>> =
                    components.iter().map(|t| ScalarField::expr(t)).collect();
                VectorFieldSpec::Custom { components: comps? }
            }
        })
    }

    /// Chart-side function (pullback for homogeneous ones).
    fn build_chart_function(&self) -> Result<Option<ScalarField>> {
        let Some(cfg) = &self.function else {
            return Ok(None);
        };
        Ok(Some(match cfg {
            FunctionConfig::Expr { text } => ScalarField::expr(text)?,
            FunctionConfig::Coordinate { index } => {
                if *index == 0 || *index > self.space.dim {
                    return Err(GeomError::Config(format!(
                        "coordinate index {} outside 1..{}",
                        index, self.space.dim
                    )));
                }
                ScalarField::coordinate(index - 1)
            }
            FunctionConfig::NormSq => ScalarField::norm_sq(),
            FunctionConfig::Norm => ScalarField::Builtin(crate::field::Builtin::Norm),
            FunctionConfig::Linear { coefficients } => {
                ScalarField::Builtin(crate::field::Builtin::Linear(coefficients.clone()))
            }
            FunctionConfig::Homogeneous { text, .. } => ScalarField::SpherePullback {
                phi: crate::expr::parse_expr(text)?,
            },
        }))
    }

    fn build_ambient_function(&self) -> Result<Option<ScalarField>> {
        match &self.function {
            Some(FunctionConfig::Homogeneous { text, degree }) => {
                Ok(Some(ScalarField::homogeneous(text, *degree)?))
            }
            _ => Ok(None),
        }
    }

    fn build_immersion(&self) -> Result<Option<Immersion>> {
        let Some(cfg) = &self.hypersurface else {
            return Ok(None);
        };
        let n = self.space.dim;
        let imm = match cfg.catalog {
            CatalogId::Hyperplane => Immersion::hyperplane(n, cfg.offset.unwrap_or(0.0))?,
            CatalogId::Hypersphere => Immersion::hypersphere(n, cfg.radius.unwrap_or(1.0))?,
            CatalogId::Cylinder => {
                Immersion::cylinder(n, cfg.split.unwrap_or(1), cfg.radius.unwrap_or(1.0))?
            }
            CatalogId::CliffordTorus => Immersion::clifford_torus(
                n,
                cfg.split.unwrap_or(1),
                cfg.radius.unwrap_or(std::f64::consts::FRAC_1_SQRT_2),
            )?,
        };
        Ok(Some(imm))
    }

    fn expected_verdict(&self) -> Result<Verdict> {
        match self.checks.expect_verdict.as_deref() {
            None | Some("isoparametric") => Ok(Verdict::Isoparametric),
            Some("transnormal_only") => Ok(Verdict::TransnormalOnly),
            Some("neither") => Ok(Verdict::Neither),
            Some(other) => Err(GeomError::Config(format!(
                "unknown expected verdict '{}'",
                other
            ))),
        }
    }
}

fn skew_or_zero(dim: usize, upper: &[f64]) -> Result<SkewMatrix> {
    if upper.is_empty() {
        Ok(SkewMatrix::zero(dim))
    } else {
        SkewMatrix::from_upper(dim, upper.to_vec())
    }
}

fn pad_or_err(dim: usize, e: &[f64], what: &str) -> Result<Vec<f64>> {
    if e.is_empty() {
        Ok(vec![0.0; dim])
    } else if e.len() == dim {
        Ok(e.to_vec())
    } else {
        Err(GeomError::Config(format!(
            "{} has length {}, chart dimension is {}",
            what,
            e.len(),
            dim
        )))
    }
}

/// One report line of a scenario run.
#[derive(Clone, Debug)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of a scenario run: report lines, exit code and optional CSV.
#[derive(Clone, Debug)]
pub struct ScenarioRun {
    pub name: String,
    pub lines: Vec<CheckLine>,
    pub exit_code: i32,
    pub csv: Option<String>,
}

impl ScenarioRun {
    pub fn passed(&self) -> bool {
        self.exit_code == 0
    }

    pub fn report(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scenario: {}", self.name);
        for line in &self.lines {
            let tag = if line.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "[{}] {}: {}", tag, line.name, line.detail);
        }
        let _ = writeln!(
            out,
            "result: {} (exit {})",
            if self.exit_code == 0 { "PASS" } else { "FAIL" },
            self.exit_code
        );
        out
    }
}

fn exit_code_for(err: &GeomError) -> i32 {
    match err {
        GeomError::Config(_) | GeomError::Expr { .. } => 2,
        GeomError::UnsupportedHypothesis(_) => 3,
        _ => 1,
    }
}

struct Runner {
    lines: Vec<CheckLine>,
    failed: bool,
}

impl Runner {
    fn new() -> Self {
        Runner {
            lines: Vec::new(),
            failed: false,
        }
    }

    fn push(&mut self, name: &str, passed: bool, detail: String) {
        if !passed {
            self.failed = true;
        }
        self.lines.push(CheckLine {
            name: name.to_string(),
            passed,
            detail,
        });
    }
}

/// Runs every requested suite of a scenario. A suite that aborts keeps
/// the lines produced so far and appends the failure.
pub fn run_scenario(sc: &Scenario) -> ScenarioRun {
    let mut runner = Runner::new();
    match run_scenario_inner(sc, &mut runner) {
        Ok(csv) => ScenarioRun {
            name: sc.name.clone(),
            exit_code: if runner.failed { 1 } else { 0 },
            lines: runner.lines,
            csv,
        },
        Err(e) => {
            let code = exit_code_for(&e);
            runner.push("aborted", false, e.to_string());
            ScenarioRun {
                name: sc.name.clone(),
                lines: runner.lines,
                exit_code: code,
                csv: None,
            }
        }
    }
}

fn run_scenario_inner(sc: &Scenario, runner: &mut Runner) -> Result<Option<String>> {
    validate_sphere_scenario(sc)?;
    let space = SpaceForm::new(sc.space.dim, sc.space.curvature);
    let w = sc.build_field()?;
    w.validate_dims(&space)?;
    let metric = RandersMetric::from_parts(space.clone(), w.clone())?;
    let tol = sc.tolerances;

    // Drift classification is reported up front; suites that require the
    // isotropy hypothesis surface hypothesis errors below.
    let classify = classify_field(&space, &w, sc.sampling.box_radius, sc.sampling.seed)?;
    runner.push(
        "drift classification",
        true,
        match classify.class {
            FieldClass::Killing => format!("killing (residual {:.2e})", classify.max_residual),
            FieldClass::Homothetic { dilation } => format!(
                "homothetic, dilation {:.6} (residual {:.2e})",
                dilation, classify.max_residual
            ),
            FieldClass::Neither => format!("neither (residual {:.2e})", classify.max_residual),
        },
    );
    // The curved-chart drift family is only meaningful when it actually
    // generates isometries of the chart metric; if validation fails the
    // run aborts rather than proceeding with wrong geometry.
    if matches!(sc.field, FieldConfig::Projective { .. })
        && classify.class == FieldClass::Neither
    {
        return Err(GeomError::UnsupportedHypothesis(format!(
            "the curved-chart drift family is not an isometry generator in this chart \
             (residual {:.3e}); nonzero offsets belong to the central-projection chart, \
             use sphere_killing instead",
            classify.max_residual
        )));
    }

    if sc.checks.metric_identities {
        run_metric_identities(runner, &metric, &sc.sampling, &tol)?;
    }

    if sc.checks.shift {
        let Some(imm) = sc.build_immersion()? else {
            return Err(GeomError::Config(
                "shift suite requested without a hypersurface".into(),
            ));
        };
        run_shift_suite(runner, &imm, &metric, &sc.sampling, &tol)?;
    }

    let mut csv = None;
    if sc.checks.isoparametric {
        let Some(f_chart) = sc.build_chart_function()? else {
            return Err(GeomError::Config(
                "isoparametric suite requested without a function".into(),
            ));
        };
        let expected = sc.expected_verdict()?;
        let f_ambient = sc.build_ambient_function()?;
        csv = Some(run_isoparametric_suite(
            runner,
            sc,
            &metric,
            &f_chart,
            f_ambient.as_ref(),
            expected,
            &tol,
        )?);
    }

    Ok(csv)
}

fn run_metric_identities(
    runner: &mut Runner,
    metric: &RandersMetric,
    sampling: &SamplingConfig,
    tol: &Tolerances,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed ^ 0xA5A5);
    let n = metric.dim();
    let mut det_residual: f64 = 0.0;
    let mut legendre_residual: f64 = 0.0;
    let mut spray_residual: f64 = 0.0;
    let mut nav_checked = 0usize;
    for i in 0..sampling.metric_samples {
        let x = sample_nav_point(metric.space(), metric.field(), &mut rng, sampling.box_radius);
        let y = sample_direction(&mut rng, n);
        // f_value, fundamental_tensor and spray assert their own
        // dual-route identities internally.
        metric.f_value(&x, &y)?;
        det_residual = det_residual.max(metric.det_identity_residual(&x)?);
        metric.bh_density(&x)?;
        let xi = metric.legendre(&x, &y)?;
        let back = metric.legendre_inverse(&x, &xi)?;
        let scale = y.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        for (u, v) in back.iter().zip(&y) {
            legendre_residual = legendre_residual.max((u - v).abs() / scale);
        }
        if i % 8 == 0 {
            metric.fundamental_tensor(&x, &y)?;
            let spray = metric.spray(&x, &y)?;
            let oracle = metric.spray_from_first_principles(&x, &y)?;
            for (a, b) in spray.g.iter().zip(&oracle) {
                spray_residual = spray_residual.max((a - b).abs() / b.abs().max(1.0));
            }
        }
        nav_checked += 1;
    }
    runner.push(
        "navigation-form and volume identities",
        true,
        format!("asserted on {} sampled (x, y)", nav_checked),
    );
    runner.push(
        "determinant identity det(a) lambda^(n+1) = det(h)",
        det_residual < 1e-10,
        format!("max residual {:.2e} (tol 1e-10)", det_residual),
    );
    runner.push(
        "Legendre round trips",
        legendre_residual < tol.exact_identity,
        format!(
            "max residual {:.2e} (tol {:.0e})",
            legendre_residual, tol.exact_identity
        ),
    );
    runner.push(
        "geodesic coefficients vs first-principles autodiff",
        spray_residual < 1e-8,
        format!("max residual {:.2e} (tol 1e-8)", spray_residual),
    );
    Ok(())
}

fn run_shift_suite(
    runner: &mut Runner,
    imm: &Immersion,
    metric: &RandersMetric,
    sampling: &SamplingConfig,
    tol: &Tolerances,
) -> Result<()> {
    let mut shift: f64 = 0.0;
    let mut angle: f64 = 0.0;
    let mut nd: f64 = 0.0;
    let mut conformal: f64 = 0.0;
    let mut points = 0usize;
    for k in 0..2 {
        let u = imm.generic_parameter(k);
        for orientation in [1.0, -1.0] {
            let report = crate::hypersurface::verify_shift(
                imm,
                metric,
                &u,
                orientation,
                sampling.box_radius,
                tol,
            )?;
            shift = shift.max(report.shift_residual);
            angle = angle.max(report.max_principal_angle);
            nd = nd.max(report.normal_derivative_residual);
            let ind = crate::hypersurface::induced_metric(imm, metric, &u, orientation, tol)?;
            conformal = conformal.max(ind.residual);
            points += 1;
        }
    }
    runner.push(
        "principal-curvature shift",
        shift < tol.shift,
        format!(
            "max residual {:.2e} over {} points/orientations (tol {:.0e})",
            shift, points, tol.shift
        ),
    );
    runner.push(
        "principal-vector alignment",
        angle < tol.principal_angle,
        format!(
            "max principal angle {:.2e} rad (tol {:.0e})",
            angle, tol.principal_angle
        ),
    );
    runner.push(
        "normal-derivative relation",
        nd < tol.shift,
        format!("max residual {:.2e} (tol {:.0e})", nd, tol.shift),
    );
    runner.push(
        "induced-metric conformal factor",
        conformal < tol.identity,
        format!("max residual {:.2e} (tol {:.0e})", conformal, tol.identity),
    );
    Ok(())
}

fn run_isoparametric_suite(
    runner: &mut Runner,
    sc: &Scenario,
    metric: &RandersMetric,
    f_chart: &ScalarField,
    f_ambient: Option<&ScalarField>,
    expected: Verdict,
    tol: &Tolerances,
) -> Result<String> {
    let space = metric.space();
    let levels = match f_ambient {
        Some(fa) => auto_levels_sphere(fa, space.dim() + 1, sc.sampling.levels, sc.sampling.seed)?,
        None => auto_levels_chart(
            space,
            f_chart,
            sc.sampling.box_radius,
            sc.sampling.levels,
            sc.sampling.seed,
        )?,
    };
    let plan = LevelPlan {
        levels,
        count: sc.sampling.count,
        seed: sc.sampling.seed,
        box_radius: sc.sampling.box_radius,
    };

    let direct = check_direct(f_chart, metric, &plan, tol)?;
    let navigation = check_navigation(f_chart, space, metric.field(), &plan, tol)?;
    let mut verdicts = vec![("direct", direct.verdict), ("navigation", navigation.verdict)];

    let sphere_report: Option<IsoparametricReport> = match (f_ambient, metric.field()) {
        (Some(fa), VectorFieldSpec::SphereKilling { q }) => {
            let rep = check_sphere_criterion(fa, q, &plan, tol)?;
            verdicts.push(("sphere-criterion", rep.verdict));
            Some(rep)
        }
        _ => None,
    };

    let agree = verdicts.iter().all(|(_, v)| *v == verdicts[0].1);
    if !agree {
        // The routes are equivalent criteria; disagreement is an
        // implementation bug, not a property of the scenario.
        let detail = verdicts
            .iter()
            .map(|(n, v)| format!("{}={}", n, v))
            .collect::<Vec<_>>()
            .join(" ");
        runner.push("isoparametric criteria agreement", false, detail);
        return Err(GeomError::ConsistencyCheck(
            "equivalent isoparametric criteria disagree".into(),
        ));
    }
    let verdict = verdicts[0].1;
    runner.push(
        "isoparametric criteria agreement",
        true,
        verdicts
            .iter()
            .map(|(n, v)| format!("{}={}", n, v))
            .collect::<Vec<_>>()
            .join(" "),
    );
    runner.push(
        "isoparametric verdict",
        verdict == expected,
        format!("got {}, expected {}", verdict, expected),
    );

    if let Some(rep) = &sphere_report {
        let worst = rep.norm.worst_spread().max(rep.laplacian.worst_spread());
        runner.push(
            "sphere-criterion spreads",
            true,
            format!("worst per-level spread {:.2e}", worst),
        );
    }

    if sc.checks.drift_derivative {
        let rep = check_drift_derivative(f_chart, metric, &plan, tol)?;
        runner.push(
            "drift-derivative profile",
            rep.iff_consistent,
            format!(
                "df(W) per-level constant: {}; direct verdict {}",
                rep.passes, rep.direct.verdict
            ),
        );
        if rep.passes {
            runner.push(
                "profile reconstruction",
                rep.a_reconstruction_residual < tol.level_abs * 10.0
                    && rep.b_reconstruction_residual < tol.profile_relaxed,
                format!(
                    "norm residual {:.2e} (tol {:.0e}), laplacian residual {:.2e} (tol {:.0e})",
                    rep.a_reconstruction_residual,
                    tol.level_abs * 10.0,
                    rep.b_reconstruction_residual,
                    tol.profile_relaxed
                ),
            );
        }
    }

    build_csv(metric, f_chart, &plan, tol)
}

/// CSV of per-point quantities at freshly sampled level points:
/// level, chart coordinates, F(grad f), laplacian, |df|_h, h-laplacian,
/// df(W). Floats carry 17 significant digits, so identical configs and
/// seeds produce byte-identical files.
fn build_csv(
    metric: &RandersMetric,
    f: &ScalarField,
    plan: &LevelPlan,
    tol: &Tolerances,
) -> Result<String> {
    let space = metric.space();
    let n = space.dim();
    let mut out = String::new();
    out.push_str("level");
    for i in 1..=n {
        let _ = write!(out, ",x{}", i);
    }
    out.push_str(",f_grad_norm,laplacian,h_grad_norm,h_laplacian,drift_derivative\n");
    for (idx, &t) in plan.levels.iter().enumerate() {
        let sample = sample_level_set(
            space,
            f,
            Some(metric.field()),
            t,
            plan.count,
            plan.box_radius,
            plan.seed,
            idx,
            tol,
        )?;
        for p in &sample.points {
            let grad = match metric.finsler_gradient(f, p) {
                Ok(g) => g,
                Err(GeomError::CriticalPoint(_)) => continue,
                Err(e) => return Err(e),
            };
            let lap = metric.finsler_laplacian(f, p, tol)?;
            let jet = eval_jet2(f, p)?;
            let h_inv = space.metric_inv(p);
            let h_norm = h_inv.bilinear(&jet.grad, &jet.grad).max(0.0).sqrt();
            let (_, _, h_lap) = space.grad_hess_lap(f, p)?;
            let _ = write!(out, "{:.16e}", t);
            for v in p {
                let _ = write!(out, ",{:.16e}", v);
            }
            let _ = writeln!(
                out,
                ",{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                grad.f_of_grad, lap, h_norm, h_lap, grad.df_of_w
            );
        }
    }
    Ok(out)
}

/// Validation probe for the stereographic-ambient consistency of a
/// scenario before it runs (sphere scenarios need a positive-curvature
/// chart and an ambient drift).
pub fn validate_sphere_scenario(sc: &Scenario) -> Result<()> {
    if let Some(FunctionConfig::Homogeneous { .. }) = sc.function {
        let chart_ok = sc.space.curvature > 0.0;
        let field_ok = matches!(sc.field, FieldConfig::SphereKilling { .. } | FieldConfig::Zero);
        if !(chart_ok && field_ok) {
            return Err(GeomError::Config(
                "homogeneous functions need a positive-curvature chart and a sphere drift".into(),
            ));
        }
    }
    Ok(())
}

impl SpaceForm {
    /// Human-readable chart name for reports.
    pub fn chart_name(&self) -> &'static str {
        match self.chart() {
            Chart::Cartesian => "cartesian",
            Chart::PoincareBall => "poincare-ball",
            Chart::Stereographic => "stereographic",
        }
    }
}
