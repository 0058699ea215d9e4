//! Seeded rejection sampling of chart points and directions. All callers
//! pass explicit RNGs; nothing here touches global state.

use crate::space_form::SpaceForm;
use crate::vector_field::VectorFieldSpec;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Uniform point in the box [-r, r]^n intersected with the chart domain.
pub fn sample_point(space: &SpaceForm, rng: &mut ChaCha8Rng, box_radius: f64) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..space.dim())
            .map(|_| rng.gen_range(-box_radius..box_radius))
            .collect();
        if space.contains(&x) {
            return x;
        }
    }
}

/// Like [`sample_point`] but additionally requires the navigation bound
/// ||W||_h <= 0.98, so every sampled point admits the Randers metric.
pub fn sample_nav_point(
    space: &SpaceForm,
    w: &VectorFieldSpec,
    rng: &mut ChaCha8Rng,
    box_radius: f64,
) -> Vec<f64> {
    for _ in 0..10_000 {
        let x = sample_point(space, rng, box_radius);
        let h = space.metric(&x);
        let w_up = w.eval(space, &x);
        let b2 = h.bilinear(&w_up, &w_up);
        if b2 < 0.98 * 0.98 {
            return x;
        }
    }
    panic!("navigation domain appears empty inside the sampling box");
}

/// Direction in [-1,1]^n bounded away from zero.
pub fn sample_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let y: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n2: f64 = y.iter().map(|v| v * v).sum();
        if n2 > 0.01 {
            return y;
        }
    }
}

/// Deterministic per-level RNG stream: parallel and serial traversals of
/// the levels see identical draws.
pub fn level_rng(seed: u64, level_index: usize) -> ChaCha8Rng {
    use rand_chacha::rand_core::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed ^ ((level_index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}
