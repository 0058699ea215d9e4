//! Geodesic coefficients, the nonlinear connection consistency check, and
//! the S-curvature of an isotropically distorting drift.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zermelo::sampling::{sample_direction, sample_nav_point};
use zermelo::{RandersMetric, SpaceForm, VectorFieldSpec};

fn main() -> zermelo::Result<()> {
    // W = -2 k0 x with dilation k0 = 1/4 on the flat plane.
    let k0 = 0.25;
    let metric =
        RandersMetric::from_parts(SpaceForm::euclidean(2), VectorFieldSpec::radial(2, k0))?;

    let x = [0.4, -0.3];
    let y = [1.0, 0.5];
    let spray = metric.spray(&x, &y)?;
    println!("G(x, y)                  = {:?}", spray.g);
    println!("closed form vs dG/dy     : {:.3e}", spray.n_consistency);
    let oracle = metric.spray_from_first_principles(&x, &y)?;
    println!("first-principles oracle  = {:?}", oracle);
    println!();

    // The radial drift makes the spray radial: G^i = k0 F y^i.
    let f = metric.f_value(&x, &y)?;
    println!("k0 F y = {:?}  (closed-form prediction)", [k0 * f * y[0], k0 * f * y[1]]);
    println!();

    // S-curvature: for a homothetic drift, S = (n+1) k0 F everywhere.
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    println!("point                    S(x,y)         (n+1) k0 F");
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let x = sample_nav_point(metric.space(), metric.field(), &mut rng, 1.0);
        let y = sample_direction(&mut rng, 2);
        let s = metric.s_curvature(&x, &y)?;
        let predicted = 3.0 * k0 * metric.f_value(&x, &y)?;
        worst = worst.max((s - predicted).abs());
        println!("[{:+.3}, {:+.3}]       {:+.9}   {:+.9}", x[0], x[1], s, predicted);
    }
    println!("max deviation {:.2e}", worst);
    Ok(())
}
