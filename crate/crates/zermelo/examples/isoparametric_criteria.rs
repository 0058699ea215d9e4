//! The equivalent isoparametric tests on a positive and a negative
//! scenario: concentric circles under a radial drift pass all routes
//! with reconstructed profiles, while a parabola fails all of them.

use zermelo::isoparametric::{
    check_direct, check_drift_derivative, check_navigation, LevelPlan,
};
use zermelo::{RandersMetric, ScalarField, SpaceForm, Tolerances, VectorFieldSpec};

fn main() -> zermelo::Result<()> {
    let tol = Tolerances::default();
    let space = SpaceForm::euclidean(2);

    // Concentric circles of f = |x|^2 under the drift W = -x/2.
    let metric = RandersMetric::from_parts(space.clone(), VectorFieldSpec::radial(2, 0.25))?;
    let f = ScalarField::norm_sq();
    let plan = LevelPlan {
        levels: vec![0.25, 0.49, 0.81, 1.0, 1.21],
        count: 30,
        seed: 7,
        box_radius: 1.4,
    };

    let direct = check_direct(&f, &metric, &plan, &tol)?;
    let nav = check_navigation(&f, &space, metric.field(), &plan, &tol)?;
    println!("f = |x|^2 with radial drift:");
    println!("  direct criterion:     {}", direct.verdict);
    println!("  navigation criterion: {}", nav.verdict);

    let rep = check_drift_derivative(&f, &metric, &plan, &tol)?;
    println!("  drift derivative df(W) constant per level: {}", rep.passes);
    println!();
    println!("  level     F(grad f)      laplacian      df(W)");
    for ((ns, ls), phi) in rep
        .direct
        .norm
        .stats
        .iter()
        .zip(&rep.direct.laplacian.stats)
        .zip(rep.phi.means())
    {
        println!(
            "  {:<8.3} {:>12.8} {:>14.8} {:>10.4}",
            ns.level, ns.mean, ls.mean, phi
        );
    }
    println!(
        "  profile reconstruction residuals: norm {:.2e}, laplacian {:.2e}",
        rep.a_reconstruction_residual, rep.b_reconstruction_residual
    );
    println!();

    // Negative control: a parabola is not even transnormal.
    let g = ScalarField::expr("x1^2 - x2")?;
    let gplan = LevelPlan::auto(&space, &g, 5, 24, 11, 1.0)?;
    let riem = RandersMetric::riemannian(space.clone());
    let direct = check_direct(&g, &riem, &gplan, &tol)?;
    let nav = check_navigation(&g, &space, riem.field(), &gplan, &tol)?;
    println!("f = x1^2 - x2 without drift:");
    println!("  direct criterion:     {}", direct.verdict);
    println!("  navigation criterion: {}", nav.verdict);
    println!(
        "  worst per-level spread of the gradient norm: {:.3}",
        direct.norm.worst_spread()
    );
    Ok(())
}
