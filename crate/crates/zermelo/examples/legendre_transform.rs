//! The Legendre transform of a drift metric and its asymmetry, plus the
//! nonlinear gradient it induces.

use zermelo::{RandersMetric, ScalarField, SpaceForm, VectorFieldSpec};

fn main() -> zermelo::Result<()> {
    let metric = RandersMetric::from_parts(
        SpaceForm::euclidean(2),
        VectorFieldSpec::constant(vec![0.5, 0.0]),
    )?;
    let x = [0.0, 0.0];

    let xi = [1.0, 0.0];
    let y = metric.legendre_inverse(&x, &xi)?;
    let y_neg = metric.legendre_inverse(&x, &[-1.0, 0.0])?;
    println!("L^-1( dx1) = {:?}", y);
    println!("L^-1(-dx1) = {:?}", y_neg);
    println!("the inverse transform is NOT odd: L^-1(-xi) != -L^-1(xi)");
    println!();

    // Round trip through the transform.
    let back = metric.legendre(&x, &y)?;
    println!("L(L^-1(dx1)) = {:?}  (round trip)", back);
    println!();

    // Gradient of f = x1: the inverse Legendre image of df.
    let f = ScalarField::coordinate(0);
    let grad = metric.finsler_gradient(&f, &[0.7, -0.2])?;
    println!("grad(x1)      = {:?}", grad.vector);
    println!("F(grad x1)    = {:.12}", grad.f_of_grad);
    println!("|d x1|_h      = {:.12}", grad.df_norm_h);
    println!("F(grad f) = F*(df) = |df|_h + df(W): the drift shifts the dual norm.");
    Ok(())
}
