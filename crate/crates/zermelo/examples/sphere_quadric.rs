//! A block quadric restricted to the unit 2-sphere under a rotational
//! drift: the ambient criterion, the base profiles in closed form, and
//! the chart cross-check all agree.

use zermelo::isoparametric::{check_direct, check_riemannian, check_sphere_criterion, LevelPlan};
use zermelo::sphere::sphere_calculus;
use zermelo::vector_field::SkewMatrix;
use zermelo::{RandersMetric, ScalarField, SpaceForm, Tolerances, VectorFieldSpec};

fn main() -> zermelo::Result<()> {
    let tol = Tolerances::default();
    // Phi = x1^2 - (x2^2 + x3^2), homogeneous of degree 2, restricted to
    // S^2; the drift rotates the (x2, x3) block, so <grad Phi, xQ> = 0.
    let text = "dot(block(1,1),block(1,1)) - dot(block(2,3),block(2,3))";
    let phi = ScalarField::homogeneous(text, 2)?;
    let q = SkewMatrix::rotation(3, 1, 2, 0.5);

    // Pointwise homogeneity calculus at one sphere point.
    let x = [0.6, 0.0, 0.8];
    let calc = sphere_calculus(&phi, &x)?;
    println!("at x = {:?}:", x);
    println!("  tangential gradient  = {:+.6?}", calc.grad_h);
    println!("  |grad|^2 (identity)  = {:.12}  (4(1 - Phi^2) = {:.12})",
        calc.grad_norm_sq, 4.0 * (1.0 - calc.value * calc.value));
    println!("  spherical laplacian  = {:.12}  (-2 - 6 Phi = {:.12})",
        calc.lap_h, -2.0 - 6.0 * calc.value);
    println!();

    let plan = LevelPlan {
        levels: vec![-0.6, -0.3, 0.0, 0.3, 0.6],
        count: 30,
        seed: 43,
        box_radius: 2.0,
    };
    let ambient = check_sphere_criterion(&phi, &q, &plan, &tol)?;
    println!("ambient criterion verdict: {}", ambient.verdict);
    println!();
    println!("  level      a(t) fitted    2 sqrt(1-t^2)    b(t) fitted     -2 - 6t");
    let space = SpaceForm::new(2, 1.0);
    let base = check_riemannian(&phi, &space, &plan, &tol)?;
    for (ns, ls) in base.norm.stats.iter().zip(&base.laplacian.stats) {
        println!(
            "  {:+.2}   {:>12.8} {:>14.8} {:>14.8} {:>12.8}",
            ns.level,
            ns.mean,
            2.0 * (1.0 - ns.level * ns.level).sqrt(),
            ls.mean,
            -2.0 - 6.0 * ns.level
        );
    }
    println!();

    // Chart cross-check: pull the function back through the
    // stereographic chart, push the rotation forward, and run the direct
    // criterion there.
    let metric =
        RandersMetric::from_parts(space, VectorFieldSpec::SphereKilling { q })?;
    let f_chart = ScalarField::SpherePullback {
        phi: zermelo::expr::parse_expr(text)?,
    };
    let chart = check_direct(&f_chart, &metric, &plan, &tol)?;
    println!("chart-side direct verdict: {}", chart.verdict);
    println!("drift metric and base metric share these level sets, with g = 2");
    println!("distinct principal curvatures on each.");
    Ok(())
}
