//! The induced metric a hypersurface inherits from the drift metric is a
//! conformal rescaling of the Riemannian pullback, with factor
//! 1 / (1 + <normal, W>_h).

use zermelo::hypersurface::induced_metric;
use zermelo::{Immersion, RandersMetric, SpaceForm, Tolerances, VectorFieldSpec};

fn main() -> zermelo::Result<()> {
    let tol = Tolerances::default();

    // Hyperplane with a transverse constant drift of speed 1/2: the
    // factor is exactly 1/(1 + 1/2) = 2/3.
    let metric = RandersMetric::from_parts(
        SpaceForm::euclidean(2),
        VectorFieldSpec::constant(vec![0.5, 0.0]),
    )?;
    let plane = Immersion::hyperplane(2, 0.0)?;
    let ind = induced_metric(&plane, &metric, &[0.3], 1.0, &tol)?;
    println!("hyperplane, transverse drift: factor = {:.12} (2/3)", ind.factor);

    // Drift tangent to the surface: no rescaling at all.
    let tangent = RandersMetric::from_parts(
        SpaceForm::euclidean(2),
        VectorFieldSpec::constant(vec![0.0, 0.4]),
    )?;
    let ind = induced_metric(&plane, &tangent, &[0.3], 1.0, &tol)?;
    println!("hyperplane, tangent drift:    factor = {:.12} (1)", ind.factor);
    println!();

    // Across the catalog under a radial drift, both orientations.
    let metric = RandersMetric::from_parts(SpaceForm::euclidean(3), VectorFieldSpec::radial(3, 0.2))?;
    println!("{:<22} {:>12} {:>12} {:>10}", "shape", "factor(+)", "factor(-)", "residual");
    for (name, imm) in [
        ("hypersphere r=1", Immersion::hypersphere(3, 1.0)?),
        ("cylinder S^1(1/2)xR", Immersion::cylinder(3, 1, 0.5)?),
        ("hyperplane", Immersion::hyperplane(3, 0.25)?),
    ] {
        let u = imm.generic_parameter(0);
        let plus = induced_metric(&imm, &metric, &u, 1.0, &tol)?;
        let minus = induced_metric(&imm, &metric, &u, -1.0, &tol)?;
        println!(
            "{:<22} {:>12.8} {:>12.8} {:>10.2e}",
            name,
            plus.factor,
            minus.factor,
            plus.residual.max(minus.residual)
        );
    }
    println!();
    println!("flipping the orientation flips the sign of <normal, W>_h, so the");
    println!("two factors multiply the same pullback from opposite sides of 1.");
    Ok(())
}
