//! Reduced-sample invariant sweep over every module, one PASS/FAIL line
//! per suite. Used by the `selftest` subcommand and as a smoke test.

use crate::config::Tolerances;
use crate::error::{GeomError, Result};
use crate::field::ScalarField;
use crate::immersion::Immersion;
use crate::isoparametric::{check_direct, check_navigation, LevelPlan, Verdict};
use crate::jet::fd_check;
use crate::linalg::{solve_sym_geig, SymMatrix};
use crate::randers::RandersMetric;
use crate::sampling::{sample_direction, sample_nav_point, sample_point};
use crate::space_form::SpaceForm;
use crate::vector_field::{classify_field, FieldClass, SkewMatrix, VectorFieldSpec};
use nalgebra::DMatrix;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::io::Write;

fn ensure(cond: bool, what: &str, detail: String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(GeomError::ConsistencyCheck(format!("{}: {}", what, detail)))
    }
}

fn suite_jets(tol: &Tolerances) -> Result<String> {
    let corpus = [
        ScalarField::expr("x1^2*x2 - x2^3 + 1")?,
        ScalarField::expr("sqrt(x1^2 + x2^2 + 3)")?,
        ScalarField::expr("exp(x1*x2)")?,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for f in &corpus {
        for _ in 0..25 {
            let x = [
                rand::Rng::gen_range(&mut rng, -1.0..1.0),
                rand::Rng::gen_range(&mut rng, -1.0..1.0),
            ];
            let report = fd_check(f, &x, 1e-5)?;
            worst = worst.max(report.max_discrepancy());
        }
    }
    ensure(
        worst < tol.gradient,
        "autodiff vs finite differences",
        format!("max discrepancy {:.2e}", worst),
    )?;
    Ok(format!("max discrepancy {:.2e}", worst))
}

fn suite_eigensolver(tol: &Tolerances) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let n = 4;
        let raw = DMatrix::from_fn(n, n, |_, _| rand::Rng::gen_range(&mut rng, -1.0..1.0));
        let a = SymMatrix::new(&raw + raw.transpose());
        let sqrtb = DMatrix::from_fn(n, n, |_, _| rand::Rng::gen_range(&mut rng, -1.0..1.0));
        let b = SymMatrix::new(
            &sqrtb * sqrtb.transpose() + DMatrix::<f64>::identity(n, n) * (n as f64),
        );
        let sol = solve_sym_geig(&a, &b)?;
        let scale = a.matrix().norm();
        worst = worst.max(sol.residual(&a, &b) / scale.max(1.0));
    }
    ensure(
        worst < tol.eigen_residual,
        "generalized eigensolver residual",
        format!("{:.2e}", worst),
    )?;
    Ok(format!("max relative residual {:.2e}", worst))
}

fn suite_space_forms(tol: &Tolerances) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut compat: f64 = 0.0;
    let mut curv: f64 = 0.0;
    for space in [
        SpaceForm::euclidean(3),
        SpaceForm::new(2, 1.0),
        SpaceForm::new(2, -1.0),
    ] {
        for _ in 0..15 {
            let x = sample_point(&space, &mut rng, 0.6);
            compat = compat.max(space.metric_compat_residual(&x)?);
            let u = sample_direction(&mut rng, space.dim());
            let v = sample_direction(&mut rng, space.dim());
            match space.sectional_curvature(&x, &u, &v) {
                Ok(sec) => curv = curv.max((sec - space.curvature()).abs()),
                Err(GeomError::DegenerateFlag) => continue,
                Err(e) => return Err(e),
            }
        }
    }
    ensure(compat < tol.identity, "metric compatibility", format!("{:.2e}", compat))?;
    ensure(curv < 1e-5, "sampled sectional curvature", format!("{:.2e}", curv))?;
    Ok(format!(
        "compatibility {:.2e}, curvature deviation {:.2e}",
        compat, curv
    ))
}

fn suite_drift_classification(_tol: &Tolerances) -> Result<String> {
    let space = SpaceForm::euclidean(2);
    let killing = VectorFieldSpec::Affine {
        dilation: 0.0,
        q: SkewMatrix::rotation(2, 0, 1, 0.5),
        e: vec![0.2, -0.1],
    };
    let homothetic = VectorFieldSpec::radial(2, 0.3);
    let quadratic = VectorFieldSpec::Custom {
        components: vec![ScalarField::expr("x1^2")?, ScalarField::expr("0")?],
    };
    let a = classify_field(&space, &killing, 0.8, 1)?;
    let b = classify_field(&space, &homothetic, 0.8, 2)?;
    let c = classify_field(&space, &quadratic, 0.8, 3)?;
    ensure(a.class == FieldClass::Killing, "killing drift", format!("{:?}", a.class))?;
    ensure(
        matches!(b.class, FieldClass::Homothetic { dilation } if (dilation - 0.3).abs() < 1e-8),
        "homothetic drift",
        format!("{:?}", b.class),
    )?;
    ensure(c.class == FieldClass::Neither, "generic drift", format!("{:?}", c.class))?;
    Ok("killing / homothetic(0.3) / neither all recovered".into())
}

fn navigation_cases() -> Result<Vec<RandersMetric>> {
    Ok(vec![
        RandersMetric::from_parts(
            SpaceForm::euclidean(2),
            VectorFieldSpec::constant(vec![0.5, 0.0]),
        )?,
        RandersMetric::from_parts(
            SpaceForm::euclidean(2),
            VectorFieldSpec::Affine {
                dilation: 0.25,
                q: SkewMatrix::rotation(2, 0, 1, 0.4),
                e: vec![0.1, -0.05],
            },
        )?,
        RandersMetric::from_parts(
            SpaceForm::new(2, 1.0),
            VectorFieldSpec::SphereKilling {
                q: SkewMatrix::rotation(3, 0, 2, 0.35),
            },
        )?,
        RandersMetric::from_parts(
            SpaceForm::new(2, -1.0),
            VectorFieldSpec::Affine {
                dilation: 0.0,
                q: SkewMatrix::rotation(2, 0, 1, 0.3),
                e: vec![0.0, 0.0],
            },
        )?,
    ])
}

fn suite_navigation_identities(tol: &Tolerances) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut det: f64 = 0.0;
    let mut legendre: f64 = 0.0;
    let mut spray: f64 = 0.0;
    for m in navigation_cases()? {
        for i in 0..40 {
            let x = sample_nav_point(m.space(), m.field(), &mut rng, 0.6);
            let y = sample_direction(&mut rng, m.dim());
            m.f_value(&x, &y)?;
            m.bh_density(&x)?;
            det = det.max(m.det_identity_residual(&x)?);
            let xi = m.legendre(&x, &y)?;
            let back = m.legendre_inverse(&x, &xi)?;
            for (u, v) in back.iter().zip(&y) {
                legendre = legendre.max((u - v).abs());
            }
            if i % 10 == 0 {
                m.fundamental_tensor(&x, &y)?;
                let s = m.spray(&x, &y)?;
                let oracle = m.spray_from_first_principles(&x, &y)?;
                for (a, b) in s.g.iter().zip(&oracle) {
                    spray = spray.max((a - b).abs() / b.abs().max(1.0));
                }
            }
        }
    }
    ensure(det < 1e-10, "determinant identity", format!("{:.2e}", det))?;
    ensure(legendre < tol.exact_identity, "Legendre round trip", format!("{:.2e}", legendre))?;
    ensure(spray < 1e-8, "first-principles spray", format!("{:.2e}", spray))?;
    Ok(format!(
        "det {:.2e}, legendre {:.2e}, spray {:.2e}",
        det, legendre, spray
    ))
}

fn suite_curvatures(tol: &Tolerances) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    // Homothetic drift: S = (n+1) k0 F and flag curvature -k0^2.
    let k0 = 0.25;
    let m = RandersMetric::from_parts(SpaceForm::euclidean(2), VectorFieldSpec::radial(2, k0))?;
    let mut s_res: f64 = 0.0;
    let mut k_res: f64 = 0.0;
    for _ in 0..30 {
        let x = sample_nav_point(m.space(), m.field(), &mut rng, 1.0);
        let y = sample_direction(&mut rng, 2);
        let s = m.s_curvature(&x, &y)?;
        let f = m.f_value(&x, &y)?;
        s_res = s_res.max((s - 3.0 * k0 * f).abs());
        let v = sample_direction(&mut rng, 2);
        if (y[0] * v[1] - y[1] * v[0]).abs() < 0.05 {
            continue;
        }
        let k = m.flag_curvature(&x, &y, &v)?;
        k_res = k_res.max((k + k0 * k0).abs());
    }
    ensure(s_res < tol.gradient, "isotropic distortion rate", format!("{:.2e}", s_res))?;
    ensure(k_res < 1e-4, "constant flag curvature", format!("{:.2e}", k_res))?;
    Ok(format!("distortion residual {:.2e}, flag residual {:.2e}", s_res, k_res))
}

fn suite_hypersurfaces(tol: &Tolerances) -> Result<String> {
    let m = RandersMetric::from_parts(SpaceForm::euclidean(2), VectorFieldSpec::radial(2, 0.25))?;
    let imm = Immersion::hypersphere(2, 1.0)?;
    let report = crate::hypersurface::verify_shift(&imm, &m, &[0.9], 1.0, 1.2, tol)?;
    ensure(
        report.shift_residual < tol.shift,
        "principal-curvature shift",
        format!("{:.2e}", report.shift_residual),
    )?;
    ensure(
        report.normal_derivative_residual < tol.shift,
        "normal-derivative relation",
        format!("{:.2e}", report.normal_derivative_residual),
    )?;
    let ind = crate::hypersurface::induced_metric(&imm, &m, &[0.9], 1.0, tol)?;
    ensure(
        ind.residual < tol.identity,
        "conformal induced metric",
        format!("{:.2e}", ind.residual),
    )?;
    Ok(format!(
        "shift {:.2e}, normal-derivative {:.2e}, conformal {:.2e}",
        report.shift_residual, report.normal_derivative_residual, ind.residual
    ))
}

fn suite_isoparametric(tol: &Tolerances) -> Result<String> {
    let space = SpaceForm::euclidean(2);
    let m = RandersMetric::from_parts(space.clone(), VectorFieldSpec::constant(vec![0.5, 0.0]))?;
    let f = ScalarField::coordinate(0);
    let plan = LevelPlan {
        levels: vec![-0.4, 0.0, 0.4],
        count: 16,
        seed: 7,
        box_radius: 1.0,
    };
    let direct = check_direct(&f, &m, &plan, tol)?;
    let nav = check_navigation(&f, &space, m.field(), &plan, tol)?;
    ensure(
        direct.verdict == Verdict::Isoparametric && nav.verdict == Verdict::Isoparametric,
        "linear drift scenario",
        format!("direct {} navigation {}", direct.verdict, nav.verdict),
    )?;
    let g = ScalarField::expr("x1^2 - x2")?;
    let neg = check_direct(&g, &RandersMetric::riemannian(space.clone()), &plan_for(&space, &g)?, tol)?;
    ensure(
        neg.verdict == Verdict::Neither,
        "negative control",
        format!("{}", neg.verdict),
    )?;
    Ok("positive and negative controls agree across criteria".into())
}

fn plan_for(space: &SpaceForm, f: &ScalarField) -> Result<LevelPlan> {
    LevelPlan::auto(space, f, 3, 16, 7, 1.0)
}

fn suite_expressions(_tol: &Tolerances) -> Result<String> {
    let samples = [
        "x1^2 - x2^2",
        "dot(block(1,2),block(1,2)) - dot(block(3,4),block(3,4))",
        "sqrt(x1^2 + 1)/exp(x2)",
    ];
    for s in samples {
        let ast = crate::expr::parse_expr(s)?;
        let printed = ast.to_string();
        let back = crate::expr::parse_expr(&printed)?;
        ensure(
            ast == back,
            "print-parse fixed point",
            format!("'{}' -> '{}'", s, printed),
        )?;
    }
    ensure(
        crate::expr::parse_expr("(x1 + x2").is_err(),
        "syntax error detection",
        "unbalanced parenthesis accepted".into(),
    )?;
    Ok("round trips and error positions verified".into())
}

/// Runs every suite, printing one line each; returns the process exit
/// code (0 on full success).
pub fn selftest(tol: &Tolerances, out: &mut dyn Write) -> i32 {
    let suites: Vec<(&str, fn(&Tolerances) -> Result<String>)> = vec![
        ("jets-vs-finite-differences", suite_jets),
        ("generalized-eigensolver", suite_eigensolver),
        ("space-form-charts", suite_space_forms),
        ("drift-classification", suite_drift_classification),
        ("navigation-identities", suite_navigation_identities),
        ("distortion-and-flag-curvature", suite_curvatures),
        ("hypersurface-shift", suite_hypersurfaces),
        ("isoparametric-criteria", suite_isoparametric),
        ("expression-parser", suite_expressions),
    ];
    let mut failures = 0;
    for (name, run) in suites {
        match run(tol) {
            Ok(detail) => {
                let _ = writeln!(out, "[PASS] {}: {}", name, detail);
            }
            Err(e) => {
                failures += 1;
                let _ = writeln!(out, "[FAIL] {}: {}", name, e);
            }
        }
    }
    if failures == 0 {
        0
    } else {
        1
    }
}
