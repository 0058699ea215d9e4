//! The three constant-curvature charts, their numerically verified
//! curvature, and the drift classifier that decides which fields keep
//! the navigation metric homogeneous.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zermelo::sampling::{sample_direction, sample_point};
use zermelo::vector_field::{classify_field, FieldClass, SkewMatrix, VectorFieldSpec};
use zermelo::{ScalarField, SpaceForm};

fn main() -> zermelo::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    println!("{:<28} {:>10} {:>14} {:>12}", "chart", "declared", "sampled sec.", "compat.");
    for space in [
        SpaceForm::euclidean(3),
        SpaceForm::new(2, 1.0),
        SpaceForm::new(3, 0.5),
        SpaceForm::new(2, -1.0),
        SpaceForm::new(3, -2.0),
    ] {
        let x = sample_point(&space, &mut rng, 0.5);
        let (sec, compat) = loop {
            let u = sample_direction(&mut rng, space.dim());
            let v = sample_direction(&mut rng, space.dim());
            match space.sectional_curvature(&x, &u, &v) {
                Ok(s) => break (s, space.metric_compat_residual(&x)?),
                Err(zermelo::GeomError::DegenerateFlag) => continue,
                Err(e) => return Err(e),
            }
        };
        println!(
            "{:<28} {:>10.3} {:>14.9} {:>12.2e}",
            format!("{} (dim {})", space.chart_name(), space.dim()),
            space.curvature(),
            sec,
            compat
        );
    }
    println!();

    // Drift classification: the navigation metric has constant flag
    // curvature exactly when the drift distorts isotropically.
    let flat = SpaceForm::euclidean(2);
    let sphere = SpaceForm::new(2, 1.0);
    let cases: Vec<(&str, &SpaceForm, VectorFieldSpec)> = vec![
        (
            "rotation + translation (flat)",
            &flat,
            VectorFieldSpec::Affine {
                dilation: 0.0,
                q: SkewMatrix::rotation(2, 0, 1, 0.5),
                e: vec![0.3, -0.1],
            },
        ),
        ("radial -2(0.3)x (flat)", &flat, VectorFieldSpec::radial(2, 0.3)),
        (
            "quadratic (flat)",
            &flat,
            VectorFieldSpec::Custom {
                components: vec![ScalarField::expr("x1^2")?, ScalarField::expr("0")?],
            },
        ),
        (
            "ambient rotation (sphere)",
            &sphere,
            VectorFieldSpec::SphereKilling {
                q: SkewMatrix::rotation(3, 0, 2, 0.4),
            },
        ),
        (
            "offset family e != 0 (sphere)",
            &sphere,
            VectorFieldSpec::Projective {
                q: SkewMatrix::zero(2),
                e: vec![0.3, 0.0],
            },
        ),
    ];
    println!("{:<32} {:>24} {:>12}", "drift", "class", "residual");
    for (name, space, w) in cases {
        let report = classify_field(space, &w, 0.8, 11)?;
        let class = match report.class {
            FieldClass::Killing => "killing".to_string(),
            FieldClass::Homothetic { dilation } => format!("homothetic({:.3})", dilation),
            FieldClass::Neither => "neither".to_string(),
        };
        println!("{:<32} {:>24} {:>12.2e}", name, class, report.max_residual);
    }
    println!();
    println!("the offset family fails here because it belongs to the central");
    println!("projection chart, not the conformal one; the classifier guards");
    println!("every curved-chart construction at run time.");
    Ok(())
}
