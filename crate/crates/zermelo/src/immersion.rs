//! Parametric hypersurfaces of the charts, including the catalog shapes
//! used by the verification grids: hyperplanes, hyperspheres and
//! cylinders in the flat chart, and the Clifford torus of the round
//! sphere composed with the stereographic chart.

use crate::dual::{seed, Real};
use crate::error::{GeomError, Result};
use crate::field::stereographic;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CatalogId {
    Hyperplane,
    Hypersphere,
    Cylinder,
    CliffordTorus,
}

#[derive(Clone, Debug)]
enum Kind {
    /// {x^1 = offset} in the flat chart; parameters are the remaining
    /// coordinates.
    Hyperplane { offset: f64 },
    /// Sphere of radius r about the chart origin, spherical angles.
    Hypersphere { radius: f64 },
    /// S^m(r) x R^{n-m-1} in the flat chart: m angles then linear
    /// coordinates.
    Cylinder { m: usize, radius: f64 },
    /// S^m(r) x S^{n-m-1}(s), r^2 + s^2 = 1, inside the unit sphere S^n,
    /// pushed through the stereographic chart.
    CliffordTorus { m: usize, radius: f64 },
}

#[derive(Clone, Debug)]
pub struct Immersion {
    kind: Kind,
    chart_dim: usize,
}

/// Unit sphere S^m in R^{m+1} by spherical angles; rank is full while
/// every interior angle stays inside (0, pi).
fn unit_sphere_angles<S: Real>(u: &[S]) -> Vec<S> {
    let m = u.len();
    let mut out = Vec::with_capacity(m + 1);
    let mut sines = S::one();
    for ui in u.iter().take(m) {
        out.push(sines.clone() * ui.cos());
        sines = sines * ui.sin();
    }
    out.push(sines);
    out
}

impl Immersion {
    pub fn hyperplane(chart_dim: usize, offset: f64) -> Result<Self> {
        if chart_dim < 2 {
            return Err(GeomError::Config("hyperplane needs chart dimension >= 2".into()));
        }
        Ok(Immersion {
            kind: Kind::Hyperplane { offset },
            chart_dim,
        })
    }

    pub fn hypersphere(chart_dim: usize, radius: f64) -> Result<Self> {
        if chart_dim < 2 || radius <= 0.0 {
            return Err(GeomError::Config(
                "hypersphere needs chart dimension >= 2 and a positive radius".into(),
            ));
        }
        Ok(Immersion {
            kind: Kind::Hypersphere { radius },
            chart_dim,
        })
    }

    pub fn cylinder(chart_dim: usize, m: usize, radius: f64) -> Result<Self> {
        if m < 1 || m + 1 >= chart_dim || radius <= 0.0 {
            return Err(GeomError::Config(format!(
                "cylinder S^{}({}) x R^{} does not fit a chart of dimension {}",
                m,
                radius,
                chart_dim.saturating_sub(m + 1),
                chart_dim
            )));
        }
        Ok(Immersion {
            kind: Kind::Cylinder { m, radius },
            chart_dim,
        })
    }

    /// Torus factor radii (r, sqrt(1 - r^2)) must both be positive.
    pub fn clifford_torus(chart_dim: usize, m: usize, radius: f64) -> Result<Self> {
        if m < 1 || m >= chart_dim || !(0.0 < radius && radius < 1.0) {
            return Err(GeomError::Config(format!(
                "clifford torus S^{}({}) x S^{} needs 0 < r < 1 and factors fitting S^{}",
                m,
                radius,
                chart_dim - m - 1,
                chart_dim
            )));
        }
        Ok(Immersion {
            kind: Kind::CliffordTorus { m, radius },
            chart_dim,
        })
    }

    pub fn catalog_id(&self) -> CatalogId {
        match self.kind {
            Kind::Hyperplane { .. } => CatalogId::Hyperplane,
            Kind::Hypersphere { .. } => CatalogId::Hypersphere,
            Kind::Cylinder { .. } => CatalogId::Cylinder,
            Kind::CliffordTorus { .. } => CatalogId::CliffordTorus,
        }
    }

    pub fn chart_dim(&self) -> usize {
        self.chart_dim
    }

    pub fn param_dim(&self) -> usize {
        self.chart_dim - 1
    }

    /// A parameter point with full rank and generic position, used by
    /// grid checks that only need "some point on the shape".
    pub fn generic_parameter(&self, k: usize) -> Vec<f64> {
        let m = self.param_dim();
        (0..m)
            .map(|a| 0.6 + 0.17 * (a as f64 + 1.0) + 0.05 * (k as f64))
            .collect()
    }

    pub fn map<S: Real>(&self, u: &[S]) -> Vec<S> {
        assert_eq!(u.len(), self.param_dim(), "parameter dimension mismatch");
        match &self.kind {
            Kind::Hyperplane { offset } => {
                let mut x = Vec::with_capacity(self.chart_dim);
                x.push(S::constant(*offset));
                x.extend(u.iter().cloned());
                x
            }
            Kind::Hypersphere { radius } => {
                let r = S::constant(*radius);
                unit_sphere_angles(u).into_iter().map(|c| r.clone() * c).collect()
            }
            Kind::Cylinder { m, radius } => {
                let r = S::constant(*radius);
                let mut x: Vec<S> = unit_sphere_angles(&u[..*m])
                    .into_iter()
                    .map(|c| r.clone() * c)
                    .collect();
                x.extend(u[*m..].iter().cloned());
                x
            }
            Kind::CliffordTorus { m, radius } => {
                let r = S::constant(*radius);
                let s = S::constant((1.0 - radius * radius).sqrt());
                let mut ambient: Vec<S> = unit_sphere_angles(&u[..*m])
                    .into_iter()
                    .map(|c| r.clone() * c)
                    .collect();
                ambient.extend(
                    unit_sphere_angles(&u[*m..])
                        .into_iter()
                        .map(|c| s.clone() * c),
                );
                stereographic(&ambient)
            }
        }
    }

    /// Chart point and differential (n x m) at u; errors when the
    /// differential loses rank.
    pub fn differential(&self, u: &[f64]) -> Result<(Vec<f64>, DMatrix<f64>)> {
        let n = self.chart_dim;
        let m = self.param_dim();
        let xd = self.map(&seed(u));
        let point: Vec<f64> = xd.iter().map(|v| v.value()).collect();
        let dphi = DMatrix::from_fn(n, m, |i, a| xd[i].d(a));
        let svd = dphi.clone().svd(false, false);
        let smin = svd
            .singular_values
            .iter()
            .fold(f64::INFINITY, |acc, &s| acc.min(s));
        if !smin.is_finite() || smin < 1e-8 {
            return Err(GeomError::RankDeficient(u.to_vec()));
        }
        Ok((point, dphi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_map_lands_on_sphere() {
        let imm = Immersion::hypersphere(3, 0.75).unwrap();
        let u = [1.1, 2.3];
        let x = imm.map(&u[..]);
        let r2: f64 = x.iter().map(|v| v * v).sum();
        assert!((r2 - 0.75 * 0.75).abs() < 1e-14);
        let (_, dphi) = imm.differential(&u).unwrap();
        assert_eq!(dphi.nrows(), 3);
        assert_eq!(dphi.ncols(), 2);
    }

    #[test]
    fn sphere_parametrization_degenerates_at_pole() {
        let imm = Immersion::hypersphere(3, 1.0).unwrap();
        assert!(matches!(
            imm.differential(&[0.0, 0.4]),
            Err(GeomError::RankDeficient(_))
        ));
    }

    #[test]
    fn cylinder_map() {
        let imm = Immersion::cylinder(3, 1, 0.5).unwrap();
        let x = imm.map(&[0.9f64, -2.0]);
        assert!((x[0] * x[0] + x[1] * x[1] - 0.25).abs() < 1e-15);
        assert!((x[2] + 2.0).abs() < 1e-15);
    }

    #[test]
    fn clifford_torus_lands_on_unit_sphere() {
        let imm = Immersion::clifford_torus(3, 1, std::f64::consts::FRAC_1_SQRT_2).unwrap();
        let u = [0.7f64, 1.9];
        let x = imm.map(&u[..]);
        // The chart image of a unit-sphere point eta satisfies
        // |x|^2 = (1 + eta_4)/(1 - eta_4); verify by round trip.
        let eta = crate::field::inverse_stereographic(&x);
        let r2: f64 = eta.iter().map(|v| v * v).sum();
        assert!((r2 - 1.0).abs() < 1e-13);
        let split: f64 = eta[..2].iter().map(|v| v * v).sum();
        assert!((split - 0.5).abs() < 1e-13);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(Immersion::hypersphere(3, -1.0).is_err());
        assert!(Immersion::clifford_torus(3, 1, 1.2).is_err());
        assert!(Immersion::cylinder(3, 2, 0.5).is_err());
    }
}
