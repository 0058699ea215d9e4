//! Second-order jets of scalar fields and the finite-difference oracle
//! that keeps the autodiff honest.

use crate::dual::{gradient, seed, Dual, Real, D1, D2};
use crate::error::{GeomError, Result};
use crate::field::ScalarField;
use nalgebra::DMatrix;

/// Value, gradient and Hessian of a scalar field at a point. The Hessian
/// is symmetrized on construction, so `hess` is symmetric by definition.
#[derive(Clone, Debug)]
pub struct Jet2 {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: DMatrix<f64>,
}

impl Jet2 {
    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.grad.iter().all(|g| g.is_finite())
            && self.hess.iter().all(|h| h.is_finite())
    }
}

/// Evaluates value, gradient and Hessian by nested forward mode: the
/// point is seeded at two dual levels and the Hessian read off the
/// second-level partials.
pub fn eval_jet2(f: &ScalarField, x: &[f64]) -> Result<Jet2> {
    let n = x.len();
    let outer: Vec<D1> = seed(x);
    let nested: Vec<D2> = outer
        .iter()
        .enumerate()
        .map(|(i, xi)| Dual::variable(xi.clone(), i, n))
        .collect();
    let out = f.eval(&nested);
    let value = out.value();
    let grad: Vec<f64> = (0..n).map(|i| out.d(i).re).collect();
    let mut hess = DMatrix::zeros(n, n);
    for i in 0..n {
        let di = out.d(i);
        for j in 0..n {
            hess[(i, j)] = di.d(j);
        }
    }
    let hess = (&hess + hess.transpose()) * 0.5;
    let jet = Jet2 { value, grad, hess };
    if !jet.is_finite() {
        return Err(GeomError::OutsideDomain(x.to_vec()));
    }
    Ok(jet)
}

/// Discrepancies between autodiff and central differences.
///
/// The gradient is compared against central differences of the field
/// itself. The Hessian is compared against central differences of the
/// autodiff *gradient*: second differences of plain values amplify
/// round-off as eps/h^2 and could never certify 1e-8 agreement, while the
/// difference ladder keeps every rung first-order and the gradient rung is
/// itself verified against raw values.
#[derive(Clone, Debug)]
pub struct FdReport {
    pub grad_error: f64,
    pub hess_error: f64,
    pub step: f64,
}

impl FdReport {
    pub fn max_discrepancy(&self) -> f64 {
        self.grad_error.max(self.hess_error)
    }
}

pub fn fd_check(f: &ScalarField, x: &[f64], h_step: f64) -> Result<FdReport> {
    assert!(h_step > 0.0, "finite-difference step must be positive");
    let n = x.len();
    let jet = eval_jet2(f, x)?;

    let value_at = |p: &[f64]| -> f64 { f.eval(p) };
    let grad_at = |p: &[f64]| -> Vec<f64> {
        let (_, g) = gradient(|q: &[D1]| f.eval(q), p);
        g
    };

    let mut grad_error: f64 = 0.0;
    let mut hess_error: f64 = 0.0;
    for i in 0..n {
        let mut plus = x.to_vec();
        let mut minus = x.to_vec();
        plus[i] += h_step;
        minus[i] -= h_step;

        let fd_grad = (value_at(&plus) - value_at(&minus)) / (2.0 * h_step);
        grad_error = grad_error.max((fd_grad - jet.grad[i]).abs());

        let gp = grad_at(&plus);
        let gm = grad_at(&minus);
        for j in 0..n {
            let fd_hess = (gp[j] - gm[j]) / (2.0 * h_step);
            hess_error = hess_error.max((fd_hess - jet.hess[(i, j)]).abs());
        }
    }
    Ok(FdReport {
        grad_error,
        hess_error,
        step: h_step,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Builtin;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn jet_of_square() {
        // f(x) = x1^2 at (3): value 9, grad (6), hess (2).
        let f = ScalarField::expr("x1^2").unwrap();
        let jet = eval_jet2(&f, &[3.0]).unwrap();
        assert!((jet.value - 9.0).abs() < 1e-15);
        assert!((jet.grad[0] - 6.0).abs() < 1e-15);
        assert!((jet.hess[(0, 0)] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn jet_of_constant() {
        let f = ScalarField::expr("4.25").unwrap();
        let jet = eval_jet2(&f, &[0.3, -0.8]).unwrap();
        assert_eq!(jet.value, 4.25);
        assert!(jet.grad.iter().all(|g| *g == 0.0));
        assert!(jet.hess.iter().all(|h| *h == 0.0));
    }

    #[test]
    fn jet_of_bilinear() {
        // f = x1 x2 at (1,2): value 2, grad (2,1), hess [[0,1],[1,0]].
        let f = ScalarField::expr("x1*x2").unwrap();
        let jet = eval_jet2(&f, &[1.0, 2.0]).unwrap();
        assert!((jet.value - 2.0).abs() < 1e-15);
        assert!((jet.grad[0] - 2.0).abs() < 1e-15);
        assert!((jet.grad[1] - 1.0).abs() < 1e-15);
        assert!((jet.hess[(0, 1)] - 1.0).abs() < 1e-15);
        assert!(jet.hess[(0, 0)].abs() < 1e-15);
    }

    #[test]
    fn fd_agrees_on_polynomial() {
        let f = ScalarField::expr("x1^2*x2 - 3*x2^3 + x1").unwrap();
        let report = fd_check(&f, &[1.1, -0.7], 1e-5).unwrap();
        assert!(report.max_discrepancy() < 1e-8, "{:?}", report);
    }

    #[test]
    fn fd_agrees_on_exponential() {
        let f = ScalarField::expr("exp(x1)").unwrap();
        let report = fd_check(&f, &[0.0], 1e-5).unwrap();
        assert!(report.max_discrepancy() < 1e-7, "{:?}", report);
    }

    #[test]
    fn fd_on_constant_is_exact() {
        let f = ScalarField::expr("2.5").unwrap();
        let report = fd_check(&f, &[0.4, 0.1, -0.9], 1e-5).unwrap();
        assert_eq!(report.max_discrepancy(), 0.0);
    }

    #[test]
    fn fd_agrees_across_corpus_at_seeded_points() {
        let corpus = [
            ScalarField::expr("x1^2 - x2^2").unwrap(),
            ScalarField::expr("sqrt(x1^2 + x2^2 + 4)").unwrap(),
            ScalarField::expr("exp(x1*x2)/(1 + x2^2)").unwrap(),
            ScalarField::Builtin(Builtin::NormSq),
            ScalarField::Builtin(Builtin::Linear(vec![0.5, -1.5])),
            ScalarField::SpherePullback {
                phi: crate::expr::parse_expr("x3").unwrap(),
            },
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for f in &corpus {
            for _ in 0..100 {
                let x: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let report = fd_check(f, &x, 1e-5).unwrap();
                assert!(
                    report.max_discrepancy() < 1e-6,
                    "field {:?} at {:?}: {:?}",
                    f,
                    x,
                    report
                );
            }
        }
    }

    #[test]
    fn domain_violation_is_reported() {
        // sqrt of a negative value: NaN propagates to a domain error.
        let f = ScalarField::expr("sqrt(x1)").unwrap();
        assert!(matches!(
            eval_jet2(&f, &[-1.0]),
            Err(GeomError::OutsideDomain(_))
        ));
    }
}
