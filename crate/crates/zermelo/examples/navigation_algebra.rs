//! Build a drift metric from navigation data and check the algebra that
//! ties its two presentations together.

use zermelo::{RandersMetric, SpaceForm, VectorFieldSpec};

fn main() -> zermelo::Result<()> {
    // Flat plane with a constant drift of speed 1/2 along the first axis.
    let metric = RandersMetric::from_parts(
        SpaceForm::euclidean(2),
        VectorFieldSpec::constant(vec![0.5, 0.0]),
    )?;

    let x = [0.0, 0.0];
    println!("direction        F(x, y)");
    for y in [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [1.0, 1.0]] {
        // f_value computes the navigation form AND alpha + beta and
        // insists they agree to 1e-12 relative.
        let f = metric.f_value(&x, &y)?;
        println!("{:>10?}   {:.12}", y, f);
    }
    println!();
    println!("downwind unit cost 2/3, upwind cost 2: the metric remembers the drift.");
    println!();

    // The structural identities that pin the navigation algebra.
    let x = [0.3, -0.4];
    println!("det(a) lambda^(n+1) / det(h) - 1 = {:.3e}", metric.det_identity_residual(&x)?);
    println!("volume density sigma(x)          = {:.12}", metric.bh_density(&x)?);
    println!("(equals sqrt det h = 1 on the flat chart, asserted internally)");
    Ok(())
}
