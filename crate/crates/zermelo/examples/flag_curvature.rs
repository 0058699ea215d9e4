//! Flag curvature across random flags: the drift shifts the base
//! curvature by minus the squared dilation, and Killing drifts preserve
//! it.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zermelo::sampling::{sample_direction, sample_nav_point};
use zermelo::vector_field::SkewMatrix;
use zermelo::{RandersMetric, SpaceForm, VectorFieldSpec};

fn survey(name: &str, metric: &RandersMetric, box_radius: f64, seed: u64) -> zermelo::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::new();
    while values.len() < 100 {
        let x = sample_nav_point(metric.space(), metric.field(), &mut rng, box_radius);
        let y = sample_direction(&mut rng, metric.dim());
        let v = sample_direction(&mut rng, metric.dim());
        match metric.flag_curvature(&x, &y, &v) {
            Ok(k) => values.push(k),
            Err(zermelo::GeomError::DegenerateFlag) => continue,
            Err(e) => return Err(e),
        }
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let spread = values.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
        - values.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    println!("{:<32} K = {:+.8}  (spread {:.1e} over {} flags)", name, mean, spread, values.len());
    Ok(())
}

fn main() -> zermelo::Result<()> {
    survey(
        "flat, no drift",
        &RandersMetric::riemannian(SpaceForm::euclidean(2)),
        1.0,
        1,
    )?;
    survey(
        "flat, dilation 1/4",
        &RandersMetric::from_parts(SpaceForm::euclidean(2), VectorFieldSpec::radial(2, 0.25))?,
        1.0,
        2,
    )?;
    survey(
        "flat, killing rotation",
        &RandersMetric::from_parts(
            SpaceForm::euclidean(2),
            VectorFieldSpec::Affine {
                dilation: 0.0,
                q: SkewMatrix::rotation(2, 0, 1, 0.5),
                e: vec![0.2, 0.0],
            },
        )?,
        0.7,
        3,
    )?;
    survey(
        "round sphere, killing rotation",
        &RandersMetric::from_parts(
            SpaceForm::new(2, 1.0),
            VectorFieldSpec::SphereKilling {
                q: SkewMatrix::rotation(3, 0, 1, 0.4),
            },
        )?,
        1.3,
        4,
    )?;
    println!();
    println!("dilation k0 shifts the flat curvature to -k0^2 = -0.0625;");
    println!("killing drifts keep the base curvature (0 and +1).");
    Ok(())
}
