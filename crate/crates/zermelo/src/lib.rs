//! Randers metrics from Zermelo navigation data, with the calculus and
//! verification machinery around them.
//!
//! The crate builds the drift metric F of a navigation pair (h, W) on a
//! constant-curvature chart, exposes its Finsler calculus (Legendre
//! transform, gradient, Laplacian, spray, Chern coefficients,
//! S-curvature, flag curvature), measures hypersurface curvature against
//! both F and h, and verifies the structural facts that tie the two
//! geometries together: the principal-curvature shift by the drift
//! dilation, conformality of induced metrics, and the equivalent
//! isoparametric criteria. The `examples/` directory has one runnable
//! example per capability; the `zermelo` binary drives scenario configs.

pub mod config;
pub mod dual;
pub mod error;
pub mod expr;
pub mod field;
pub mod hypersurface;
pub mod immersion;
pub mod isoparametric;
pub mod jet;
pub mod level_set;
pub mod linalg;
pub mod randers;
pub mod sampling;
pub mod scenario;
pub mod selftest;
pub mod space_form;
pub mod sphere;
pub mod vector_field;

pub use config::Tolerances;
pub use error::{GeomError, Result};
pub use field::ScalarField;
pub use immersion::Immersion;
pub use randers::{NavigationSpec, RandersMetric};
pub use space_form::SpaceForm;
pub use vector_field::VectorFieldSpec;
