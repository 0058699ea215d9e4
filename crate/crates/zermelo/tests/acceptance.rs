//! Acceptance suite: each test pins one verification target of the crate
//! at its stated tolerance and prints a one-line summary.

use zermelo::config::Tolerances;
use zermelo::field::ScalarField;
use zermelo::hypersurface::{induced_metric, verify_shift};
use zermelo::immersion::Immersion;
use zermelo::isoparametric::{
    check_direct, check_drift_derivative, check_navigation, check_riemannian,
    check_sphere_criterion, LevelPlan, Verdict,
};
use zermelo::jet::fd_check;
use zermelo::level_set::auto_levels_sphere;
use zermelo::randers::RandersMetric;
use zermelo::sampling::{sample_direction, sample_nav_point};
use zermelo::scenario::{run_scenario, Scenario};
use zermelo::space_form::SpaceForm;
use zermelo::vector_field::{SkewMatrix, VectorFieldSpec};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn nav_scenarios() -> Vec<(&'static str, RandersMetric, f64)> {
    vec![
        (
            "flat constant drift",
            RandersMetric::from_parts(
                SpaceForm::euclidean(2),
                VectorFieldSpec::constant(vec![0.5, 0.0]),
            )
            .unwrap(),
            1.2,
        ),
        (
            "flat homothetic drift",
            RandersMetric::from_parts(
                SpaceForm::euclidean(3),
                VectorFieldSpec::Affine {
                    dilation: 0.25,
                    q: SkewMatrix::rotation(3, 0, 1, 0.4),
                    e: vec![0.1, -0.05, 0.0],
                },
            )
            .unwrap(),
            0.8,
        ),
        (
            "hyperbolic rotation drift",
            RandersMetric::from_parts(
                SpaceForm::new(2, -1.0),
                VectorFieldSpec::Affine {
                    dilation: 0.0,
                    q: SkewMatrix::rotation(2, 0, 1, 0.35),
                    e: vec![0.0, 0.0],
                },
            )
            .unwrap(),
            0.6,
        ),
        (
            "round-sphere rotation drift",
            RandersMetric::from_parts(
                SpaceForm::new(3, 1.0),
                VectorFieldSpec::SphereKilling {
                    q: SkewMatrix::from_upper(4, vec![0.4, 0.0, 0.0, 0.0, 0.0, 0.3]).unwrap(),
                },
            )
            .unwrap(),
            1.4,
        ),
        (
            "flat rotation-translation drift",
            RandersMetric::from_parts(
                SpaceForm::euclidean(2),
                VectorFieldSpec::Affine {
                    dilation: 0.0,
                    q: SkewMatrix::rotation(2, 0, 1, 0.6),
                    e: vec![0.2, -0.1],
                },
            )
            .unwrap(),
            0.7,
        ),
    ]
}

#[test]
fn criterion_1_navigation_algebra() {
    // 1000 seeded (x, y) per scenario; F via both routes must agree to
    // 1e-12 relative (asserted inside f_value), the determinant identity
    // to 1e-10, and the volume density must equal sqrt(det h) to 1e-10
    // (asserted inside bh_density).
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let mut worst_det: f64 = 0.0;
    for (name, m, box_radius) in nav_scenarios() {
        for _ in 0..1000 {
            let x = sample_nav_point(m.space(), m.field(), &mut rng, box_radius);
            let y = sample_direction(&mut rng, m.dim());
            m.f_value(&x, &y)
                .unwrap_or_else(|e| panic!("{}: {}", name, e));
            let det = m.det_identity_residual(&x).unwrap();
            assert!(det < 1e-10, "{}: det residual {:.3e}", name, det);
            worst_det = worst_det.max(det);
            m.bh_density(&x).unwrap();
        }
    }
    println!(
        "[PASS] criterion 1: navigation algebra on 5 scenarios x 1000 samples (worst det residual {:.2e})",
        worst_det
    );
}

#[test]
fn criterion_2_calculus_identities() {
    let corpus = [
        ScalarField::expr("x1^2 + x1*x2 - x2").unwrap(),
        ScalarField::expr("sqrt(x1^2 + x2^2 + 4)").unwrap(),
        ScalarField::norm_sq(),
        ScalarField::coordinate(0),
    ];
    let tol = tol();
    let mut rng = ChaCha8Rng::seed_from_u64(1002);
    let mut legendre: f64 = 0.0;
    let mut grad_dual: f64 = 0.0;
    for (name, m, box_radius) in nav_scenarios() {
        for i in 0..60 {
            let x = sample_nav_point(m.space(), m.field(), &mut rng, box_radius);
            let y = sample_direction(&mut rng, m.dim());
            // Closed-form fundamental tensor vs autodiff Hessian of F^2/2
            // (1e-9) and closed-form nonlinear connection vs dG/dy (1e-8)
            // are asserted inside these calls.
            m.fundamental_tensor(&x, &y).unwrap();
            m.spray(&x, &y).unwrap();
            let xi = m.legendre(&x, &y).unwrap();
            let back = m.legendre_inverse(&x, &xi).unwrap();
            let scale = y.iter().fold(1.0f64, |a, v| a.max(v.abs()));
            for (u, v) in back.iter().zip(&y) {
                legendre = legendre.max((u - v).abs() / scale);
            }
            if i < 20 && m.dim() == 2 {
                for f in &corpus {
                    let grad = match m.finsler_gradient(f, &x) {
                        Ok(g) => g,
                        Err(zermelo::GeomError::CriticalPoint(_)) => continue,
                        Err(e) => panic!("{}: {}", name, e),
                    };
                    // F(grad f) = F*(df) to 1e-10.
                    let f_of = m.f_value(&x, &grad.vector).unwrap();
                    grad_dual = grad_dual.max((f_of - grad.f_of_grad).abs());
                    // Divergence form vs trace form (1e-6) asserted inside.
                    m.finsler_laplacian(f, &x, &tol).unwrap();
                }
            }
        }
    }
    assert!(legendre < 1e-10, "legendre round trip {:.3e}", legendre);
    assert!(grad_dual < 1e-10, "gradient dual identity {:.3e}", grad_dual);
    println!(
        "[PASS] criterion 2: calculus identities (legendre {:.2e}, gradient-dual {:.2e}, tensor/connection/laplacian dual routes asserted)",
        legendre, grad_dual
    );
}

#[test]
fn criterion_3_s_curvature() {
    let mut rng = ChaCha8Rng::seed_from_u64(1003);
    let mut worst: f64 = 0.0;
    for k0 in [0.0, 0.25, 0.45] {
        let m = RandersMetric::from_parts(
            SpaceForm::euclidean(2),
            VectorFieldSpec::Affine {
                dilation: k0,
                q: SkewMatrix::rotation(2, 0, 1, 0.3),
                e: vec![0.1, -0.05],
            },
        )
        .unwrap();
        for _ in 0..500 {
            let x = sample_nav_point(m.space(), m.field(), &mut rng, 0.4);
            let y = sample_direction(&mut rng, 2);
            let s = m.s_curvature(&x, &y).unwrap();
            let f = m.f_value(&x, &y).unwrap();
            let residual = (s - 3.0 * k0 * f).abs();
            assert!(residual < 1e-6, "k0 = {}: residual {:.3e}", k0, residual);
            worst = worst.max(residual);
        }
    }
    // Killing drift on the round sphere: S vanishes identically.
    let m = RandersMetric::from_parts(
        SpaceForm::new(2, 1.0),
        VectorFieldSpec::SphereKilling {
            q: SkewMatrix::rotation(3, 0, 2, 0.4),
        },
    )
    .unwrap();
    for _ in 0..500 {
        let x = sample_nav_point(m.space(), m.field(), &mut rng, 1.4);
        let y = sample_direction(&mut rng, 2);
        let s = m.s_curvature(&x, &y).unwrap();
        assert!(s.abs() < 1e-6, "sphere killing S = {:.3e}", s);
        worst = worst.max(s.abs());
    }
    println!(
        "[PASS] criterion 3: S-curvature isotropy for dilations {{0, 1/4, 0.45}} and sphere Killing drift (worst residual {:.2e})",
        worst
    );
}

#[test]
fn criterion_4_flag_curvature() {
    let mut rng = ChaCha8Rng::seed_from_u64(1004);
    let cases: Vec<(&str, RandersMetric, f64, f64)> = vec![
        (
            "flat dilation 1/4",
            RandersMetric::from_parts(SpaceForm::euclidean(2), VectorFieldSpec::radial(2, 0.25))
                .unwrap(),
            -1.0 / 16.0,
            1.0,
        ),
        (
            "flat dilation 0.45 with rotation",
            RandersMetric::from_parts(
                SpaceForm::euclidean(2),
                VectorFieldSpec::Affine {
                    dilation: 0.45,
                    q: SkewMatrix::rotation(2, 0, 1, 0.3),
                    e: vec![0.05, 0.0],
                },
            )
            .unwrap(),
            -0.45 * 0.45,
            0.4,
        ),
        (
            "flat killing",
            RandersMetric::from_parts(
                SpaceForm::euclidean(2),
                VectorFieldSpec::Affine {
                    dilation: 0.0,
                    q: SkewMatrix::rotation(2, 0, 1, 0.5),
                    e: vec![0.2, 0.0],
                },
            )
            .unwrap(),
            0.0,
            0.7,
        ),
        (
            "sphere killing",
            RandersMetric::from_parts(
                SpaceForm::new(2, 1.0),
                VectorFieldSpec::SphereKilling {
                    q: SkewMatrix::rotation(3, 0, 1, 0.4),
                },
            )
            .unwrap(),
            1.0,
            1.3,
        ),
    ];
    for (name, m, expected, box_radius) in cases {
        let mut values = Vec::with_capacity(200);
        while values.len() < 200 {
            let x = sample_nav_point(m.space(), m.field(), &mut rng, box_radius);
            let y = sample_direction(&mut rng, 2);
            let v = sample_direction(&mut rng, 2);
            if (y[0] * v[1] - y[1] * v[0]).abs() < 0.05 {
                continue;
            }
            values.push(m.flag_curvature(&x, &y, &v).unwrap());
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let spread = values.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
            - values.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        assert!(spread < 1e-3, "{}: spread {:.3e}", name, spread);
        assert!(
            (mean - expected).abs() < 1e-4,
            "{}: mean {} vs expected {}",
            name,
            mean,
            expected
        );
        println!(
            "[PASS] criterion 4 ({}): flag curvature mean {:.6} (expected {:.6}), spread {:.2e}",
            name, mean, expected, spread
        );
    }
}

fn flat_drifts(n: usize) -> Vec<(&'static str, VectorFieldSpec)> {
    let mut e = vec![0.0; n];
    e[0] = 0.5;
    vec![
        ("constant", VectorFieldSpec::constant(e)),
        ("radial -x/2", VectorFieldSpec::radial(n, 0.25)),
        (
            "rotation",
            VectorFieldSpec::Affine {
                dilation: 0.0,
                q: SkewMatrix::rotation(n, 0, 1, 0.4),
                e: vec![0.0; n],
            },
        ),
    ]
}

#[test]
fn criterion_5_and_6_shift_grid() {
    let tol = tol();
    let flat3 = SpaceForm::euclidean(3);
    let shapes: Vec<(String, Immersion)> = vec![
        ("hyperplane".into(), Immersion::hyperplane(3, 0.0).unwrap()),
        (
            "hypersphere r=1/2".into(),
            Immersion::hypersphere(3, 0.5).unwrap(),
        ),
        (
            "hypersphere r=1".into(),
            Immersion::hypersphere(3, 1.0).unwrap(),
        ),
        ("cylinder".into(), Immersion::cylinder(3, 1, 0.5).unwrap()),
    ];
    let mut worst_shift: f64 = 0.0;
    let mut worst_angle: f64 = 0.0;
    let mut worst_nd: f64 = 0.0;
    let mut worst_conformal: f64 = 0.0;
    let mut cells = 0;
    for (shape_name, imm) in &shapes {
        for (drift_name, w) in flat_drifts(3) {
            let metric = RandersMetric::from_parts(flat3.clone(), w).unwrap();
            for k in 0..2 {
                let u = imm.generic_parameter(k);
                for orientation in [1.0, -1.0] {
                    let rep = verify_shift(imm, &metric, &u, orientation, 0.8, &tol)
                        .unwrap_or_else(|e| {
                            panic!("{} / {}: {}", shape_name, drift_name, e)
                        });
                    worst_shift = worst_shift.max(rep.shift_residual);
                    worst_angle = worst_angle.max(rep.max_principal_angle);
                    worst_nd = worst_nd.max(rep.normal_derivative_residual);
                    let ind = induced_metric(imm, &metric, &u, orientation, &tol).unwrap();
                    worst_conformal = worst_conformal.max(ind.residual);
                }
            }
            cells += 1;
        }
    }
    // Clifford torus cell: the round-sphere chart only admits Killing
    // drifts, so the torus is crossed with rotation generators.
    let sphere3 = SpaceForm::new(3, 1.0);
    let torus = Immersion::clifford_torus(3, 1, std::f64::consts::FRAC_1_SQRT_2).unwrap();
    let torus_drifts = vec![
        SkewMatrix::rotation(4, 0, 1, 0.3),
        SkewMatrix::rotation(4, 2, 3, 0.2),
        SkewMatrix::from_upper(4, vec![0.3, 0.0, 0.0, 0.0, 0.0, 0.2]).unwrap(),
    ];
    for q in torus_drifts {
        let metric =
            RandersMetric::from_parts(sphere3.clone(), VectorFieldSpec::SphereKilling { q })
                .unwrap();
        for k in 0..2 {
            let u = torus.generic_parameter(k);
            for orientation in [1.0, -1.0] {
                let rep = verify_shift(&torus, &metric, &u, orientation, 1.2, &tol).unwrap();
                worst_shift = worst_shift.max(rep.shift_residual);
                worst_angle = worst_angle.max(rep.max_principal_angle);
                worst_nd = worst_nd.max(rep.normal_derivative_residual);
                let ind = induced_metric(&torus, &metric, &u, orientation, &tol).unwrap();
                worst_conformal = worst_conformal.max(ind.residual);
            }
        }
        cells += 1;
    }
    assert!(worst_shift < 1e-6, "shift residual {:.3e}", worst_shift);
    assert!(worst_angle < 1e-4, "principal angle {:.3e}", worst_angle);
    assert!(worst_nd < 1e-6, "normal-derivative residual {:.3e}", worst_nd);
    assert!(worst_conformal < 1e-8, "conformal residual {:.3e}", worst_conformal);

    // Hand-checkable conformal factor: hyperplane in the plane with
    // drift (1/2, 0) has factor 1/(1 + 1/2) = 2/3.
    let m2 = RandersMetric::from_parts(
        SpaceForm::euclidean(2),
        VectorFieldSpec::constant(vec![0.5, 0.0]),
    )
    .unwrap();
    let plane = Immersion::hyperplane(2, 0.0).unwrap();
    let ind = induced_metric(&plane, &m2, &[0.3], 1.0, &tol).unwrap();
    assert!((ind.factor - 2.0 / 3.0).abs() < 1e-12);

    println!(
        "[PASS] criterion 5: principal-curvature shift on {} grid cells (shift {:.2e}, angle {:.2e}, normal-derivative {:.2e})",
        cells, worst_shift, worst_angle, worst_nd
    );
    println!(
        "[PASS] criterion 6: induced-metric conformality (residual {:.2e}; hyperplane factor {:.12} = 2/3)",
        worst_conformal, ind.factor
    );
}

#[test]
fn criterion_7_isoparametric_agreement() {
    let tol = tol();
    let mut passes = 0;

    // (1) Linear function with an axis-fixing rotation plus translation.
    {
        let space = SpaceForm::euclidean(3);
        let m = RandersMetric::from_parts(
            space.clone(),
            VectorFieldSpec::Affine {
                dilation: 0.0,
                q: SkewMatrix::rotation(3, 0, 1, 0.5),
                e: vec![0.2, 0.1, 0.3],
            },
        )
        .unwrap();
        let f = ScalarField::coordinate(2);
        let plan = LevelPlan::auto(&space, &f, 5, 24, 41, 0.8).unwrap();
        let d = check_direct(&f, &m, &plan, &tol).unwrap();
        let n = check_navigation(&f, &space, m.field(), &plan, &tol).unwrap();
        assert_eq!(d.verdict, Verdict::Isoparametric);
        assert_eq!(d.verdict, n.verdict);
        passes += 1;
    }

    // (2) Block quadric on the 2-sphere; also pins the base profiles
    // a = 2 sqrt(1 - f^2) and b = -2 - 6 f.
    {
        let f = ScalarField::homogeneous(
            "dot(block(1,1),block(1,1)) - dot(block(2,3),block(2,3))",
            2,
        )
        .unwrap();
        let q = SkewMatrix::rotation(3, 1, 2, 0.5);
        let space = SpaceForm::new(2, 1.0);
        let levels = vec![-0.6, -0.3, 0.0, 0.3, 0.6];
        let plan = LevelPlan {
            levels,
            count: 30,
            seed: 43,
            box_radius: 2.0,
        };
        let s = check_sphere_criterion(&f, &q, &plan, &tol).unwrap();
        let r = check_riemannian(&f, &space, &plan, &tol).unwrap();
        let f_chart = ScalarField::SpherePullback {
            phi: zermelo::expr::parse_expr(
                "dot(block(1,1),block(1,1)) - dot(block(2,3),block(2,3))",
            )
            .unwrap(),
        };
        let m = RandersMetric::from_parts(
            space.clone(),
            VectorFieldSpec::SphereKilling { q: q.clone() },
        )
        .unwrap();
        let d = check_direct(&f_chart, &m, &plan, &tol).unwrap();
        let nv = check_navigation(&f_chart, &space, m.field(), &plan, &tol).unwrap();
        assert_eq!(s.verdict, Verdict::Isoparametric);
        assert_eq!(s.verdict, r.verdict);
        assert_eq!(s.verdict, d.verdict);
        assert_eq!(s.verdict, nv.verdict);
        let mut worst_a: f64 = 0.0;
        let mut worst_b: f64 = 0.0;
        for st in &r.norm.stats {
            worst_a = worst_a.max((st.mean - 2.0 * (1.0 - st.level * st.level).sqrt()).abs());
        }
        for st in &r.laplacian.stats {
            worst_b = worst_b.max((st.mean - (-2.0 - 6.0 * st.level)).abs());
        }
        assert!(worst_a < 1e-5, "a profile deviation {:.3e}", worst_a);
        assert!(worst_b < 1e-4, "b profile deviation {:.3e}", worst_b);
        passes += 1;
    }

    // (3) Coordinate function with a transverse constant drift.
    {
        let space = SpaceForm::euclidean(2);
        let m = RandersMetric::from_parts(space.clone(), VectorFieldSpec::constant(vec![0.5, 0.0]))
            .unwrap();
        let f = ScalarField::coordinate(0);
        let plan = LevelPlan::auto(&space, &f, 5, 24, 47, 1.0).unwrap();
        let d = check_direct(&f, &m, &plan, &tol).unwrap();
        let n = check_navigation(&f, &space, m.field(), &plan, &tol).unwrap();
        assert_eq!(d.verdict, Verdict::Isoparametric);
        assert_eq!(d.verdict, n.verdict);
        for st in &d.norm.stats {
            assert!((st.mean - 1.5).abs() < 1e-10);
        }
        passes += 1;
    }

    // (4) Funk-like disk: concentric circles under radial drift.
    {
        let space = SpaceForm::euclidean(2);
        let m =
            RandersMetric::from_parts(space.clone(), VectorFieldSpec::radial(2, 0.25)).unwrap();
        let f = ScalarField::norm_sq();
        let plan = LevelPlan {
            levels: vec![0.25, 0.49, 0.81, 1.0],
            count: 24,
            seed: 53,
            box_radius: 1.3,
        };
        let d = check_direct(&f, &m, &plan, &tol).unwrap();
        let n = check_navigation(&f, &space, m.field(), &plan, &tol).unwrap();
        assert_eq!(d.verdict, Verdict::Isoparametric);
        assert_eq!(d.verdict, n.verdict);
        passes += 1;
    }

    // (5) Negative control: parabola level sets are not transnormal.
    {
        let space = SpaceForm::euclidean(2);
        let m = RandersMetric::from_parts(space.clone(), VectorFieldSpec::constant(vec![0.5, 0.0]))
            .unwrap();
        let f = ScalarField::expr("x1^2 - x2").unwrap();
        let plan = LevelPlan::auto(&space, &f, 5, 24, 59, 1.0).unwrap();
        let d = check_direct(&f, &m, &plan, &tol).unwrap();
        let n = check_navigation(&f, &space, m.field(), &plan, &tol).unwrap();
        assert_eq!(d.verdict, Verdict::Neither);
        assert_eq!(d.verdict, n.verdict);
        passes += 1;
    }

    // (6) Negative control: cubic on the sphere under a generic rotation.
    {
        let f = ScalarField::homogeneous("x1*x2*x3", 3).unwrap();
        let q = SkewMatrix::from_upper(3, vec![0.4, -0.2, 0.3]).unwrap();
        let space = SpaceForm::new(2, 1.0);
        let levels = auto_levels_sphere(&f, 3, 4, 61).unwrap();
        let plan = LevelPlan {
            levels,
            count: 24,
            seed: 61,
            box_radius: 2.0,
        };
        let s = check_sphere_criterion(&f, &q, &plan, &tol).unwrap();
        let m = RandersMetric::from_parts(
            space.clone(),
            VectorFieldSpec::SphereKilling { q: q.clone() },
        )
        .unwrap();
        let f_chart = ScalarField::SpherePullback {
            phi: zermelo::expr::parse_expr("x1*x2*x3").unwrap(),
        };
        let d = check_direct(&f_chart, &m, &plan, &tol).unwrap();
        let nv = check_navigation(&f_chart, &space, m.field(), &plan, &tol).unwrap();
        assert_eq!(s.verdict, Verdict::Neither);
        assert_eq!(s.verdict, d.verdict);
        assert_eq!(s.verdict, nv.verdict);
        passes += 1;
    }

    // (7) Negative control: generic translation against concentric
    // spheres (h-isoparametric, drift-inconsistent).
    {
        let space = SpaceForm::euclidean(2);
        let m = RandersMetric::from_parts(space.clone(), VectorFieldSpec::constant(vec![0.4, 0.0]))
            .unwrap();
        let f = ScalarField::norm_sq();
        let plan = LevelPlan {
            levels: vec![0.36, 0.64, 1.0],
            count: 24,
            seed: 67,
            box_radius: 1.3,
        };
        let d = check_direct(&f, &m, &plan, &tol).unwrap();
        let n = check_navigation(&f, &space, m.field(), &plan, &tol).unwrap();
        assert_eq!(d.verdict, Verdict::Neither);
        assert_eq!(d.verdict, n.verdict);
        passes += 1;
    }

    println!(
        "[PASS] criterion 7: {} scenarios with identical verdicts across the equivalent criteria (block-quadric profiles pinned)",
        passes
    );
}

#[test]
fn criterion_8_profile_reconstruction() {
    // For every isoparametric pass with an isotropic drift, the direct
    // profiles must reconstruct from the base profiles and the fitted
    // drift derivative: a~ = a + phi (1e-6 at level means) and
    // b~ = (a + phi)(b/a - 2 n k0 + phi') (1e-4).
    let tol = tol();
    let mut cases = 0;
    let mut worst_a: f64 = 0.0;
    let mut worst_b: f64 = 0.0;

    // Funk-like disk (homothetic, dilation 1/4).
    {
        let space = SpaceForm::euclidean(2);
        let m =
            RandersMetric::from_parts(space.clone(), VectorFieldSpec::radial(2, 0.25)).unwrap();
        let f = ScalarField::norm_sq();
        let plan = LevelPlan {
            levels: vec![0.25, 0.49, 0.81, 1.0, 1.21],
            count: 30,
            seed: 71,
            box_radius: 1.4,
        };
        let rep = check_drift_derivative(&f, &m, &plan, &tol).unwrap();
        assert!(rep.passes && rep.iff_consistent);
        worst_a = worst_a.max(rep.a_reconstruction_residual);
        worst_b = worst_b.max(rep.b_reconstruction_residual);
        cases += 1;
    }
    // Killing drifts (dilation 0): linear function and axis rotation.
    {
        let space = SpaceForm::euclidean(3);
        let m = RandersMetric::from_parts(
            space.clone(),
            VectorFieldSpec::Affine {
                dilation: 0.0,
                q: SkewMatrix::rotation(3, 0, 1, 0.5),
                e: vec![0.2, 0.1, 0.3],
            },
        )
        .unwrap();
        let f = ScalarField::coordinate(2);
        let plan = LevelPlan::auto(&space, &f, 5, 24, 73, 0.8).unwrap();
        let rep = check_drift_derivative(&f, &m, &plan, &tol).unwrap();
        assert!(rep.passes && rep.iff_consistent);
        worst_a = worst_a.max(rep.a_reconstruction_residual);
        worst_b = worst_b.max(rep.b_reconstruction_residual);
        cases += 1;
    }
    {
        let space = SpaceForm::euclidean(2);
        let m = RandersMetric::from_parts(space.clone(), VectorFieldSpec::constant(vec![0.5, 0.0]))
            .unwrap();
        let f = ScalarField::coordinate(0);
        let plan = LevelPlan::auto(&space, &f, 5, 24, 79, 1.0).unwrap();
        let rep = check_drift_derivative(&f, &m, &plan, &tol).unwrap();
        assert!(rep.passes && rep.iff_consistent);
        worst_a = worst_a.max(rep.a_reconstruction_residual);
        worst_b = worst_b.max(rep.b_reconstruction_residual);
        cases += 1;
    }
    // Sphere quadric through the chart (Killing pushforward).
    {
        let space = SpaceForm::new(2, 1.0);
        let m = RandersMetric::from_parts(
            space.clone(),
            VectorFieldSpec::SphereKilling {
                q: SkewMatrix::rotation(3, 1, 2, 0.5),
            },
        )
        .unwrap();
        let f = ScalarField::SpherePullback {
            phi: zermelo::expr::parse_expr(
                "dot(block(1,1),block(1,1)) - dot(block(2,3),block(2,3))",
            )
            .unwrap(),
        };
        let plan = LevelPlan {
            levels: vec![-0.6, -0.3, 0.0, 0.3, 0.6],
            count: 24,
            seed: 83,
            box_radius: 2.0,
        };
        let rep = check_drift_derivative(&f, &m, &plan, &tol).unwrap();
        assert!(rep.passes && rep.iff_consistent);
        for phi in rep.phi.means() {
            assert!(phi.abs() < 1e-9, "drift derivative should vanish: {}", phi);
        }
        worst_a = worst_a.max(rep.a_reconstruction_residual);
        worst_b = worst_b.max(rep.b_reconstruction_residual);
        cases += 1;
    }

    assert!(worst_a < 1e-6, "norm reconstruction {:.3e}", worst_a);
    assert!(worst_b < 1e-4, "laplacian reconstruction {:.3e}", worst_b);
    println!(
        "[PASS] criterion 8: profile reconstruction on {} scenarios (norm {:.2e}, laplacian {:.2e})",
        cases, worst_a, worst_b
    );
}

#[test]
fn criterion_9_determinism_and_oracles() {
    // Selftest must pass with default tolerances.
    let mut out = Vec::new();
    let code = zermelo::selftest::selftest(&Tolerances::default(), &mut out);
    assert_eq!(code, 0, "{}", String::from_utf8_lossy(&out));

    // Identical seeds give byte-identical CSV; a different seed samples
    // different points.
    let text = std::fs::read_to_string(
        std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../../scenarios/funk_like_disk.json"),
    )
    .unwrap();
    let sc = Scenario::from_json(&text).unwrap();
    let a = run_scenario(&sc);
    let b = run_scenario(&sc);
    assert_eq!(a.exit_code, 0);
    assert_eq!(a.csv, b.csv);
    assert!(a.csv.as_deref().unwrap().lines().count() > 30);
    let mut sc2 = Scenario::from_json(&text).unwrap();
    sc2.sampling.seed = 999;
    let c = run_scenario(&sc2);
    assert_eq!(c.exit_code, 0);
    assert_ne!(a.csv, c.csv);

    // Autodiff confirmed by finite differences on the corpus.
    let corpus = [
        ScalarField::expr("x1^2*x2 - x2^3 + x1").unwrap(),
        ScalarField::expr("sqrt(x1^2 + x2^2 + 2)").unwrap(),
        ScalarField::expr("exp(x1*x2)").unwrap(),
        ScalarField::norm_sq(),
        ScalarField::SpherePullback {
            phi: zermelo::expr::parse_expr("x3").unwrap(),
        },
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(1009);
    let mut worst: f64 = 0.0;
    for f in &corpus {
        for _ in 0..100 {
            let x = [
                rand::Rng::gen_range(&mut rng, -1.0..1.0),
                rand::Rng::gen_range(&mut rng, -1.0..1.0),
            ];
            let rep = fd_check(f, &x, 1e-5).unwrap();
            worst = worst.max(rep.max_discrepancy());
        }
    }
    assert!(worst < 1e-6, "fd oracle {:.3e}", worst);
    println!(
        "[PASS] criterion 9: selftest exit 0, byte-identical CSV per seed, finite-difference oracle max {:.2e}",
        worst
    );
}
