//! The expression language for scalar fields: parsing, jets, and the
//! finite-difference oracle that keeps the autodiff honest.

use zermelo::expr::parse_expr;
use zermelo::jet::{eval_jet2, fd_check};
use zermelo::ScalarField;

fn main() -> zermelo::Result<()> {
    for text in [
        "x1^2 - x2^2",
        "sqrt(x1^2 + x2^2 + 1)/exp(x2)",
        "dot(block(1,1),block(1,1)) - dot(block(2,3),block(2,3))",
    ] {
        let ast = parse_expr(text)?;
        println!("input:     {}", text);
        println!("canonical: {}", ast);
        println!("needs {} coordinates", ast.min_dim());
        println!();
    }

    // Errors carry the offending column.
    match parse_expr("(x1 + x2") {
        Err(e) => println!("as expected: {}", e),
        Ok(_) => unreachable!(),
    }
    println!();

    // Jets: value, gradient and Hessian in one nested-dual evaluation.
    let f = ScalarField::expr("x1^2*x2 + exp(x1)")?;
    let x = [0.5, -1.0];
    let jet = eval_jet2(&f, &x)?;
    println!("f = x1^2 x2 + exp(x1) at {:?}", x);
    println!("  value    = {:.12}", jet.value);
    println!("  gradient = [{:.12}, {:.12}]", jet.grad[0], jet.grad[1]);
    println!(
        "  hessian  = [[{:.8}, {:.8}], [{:.8}, {:.8}]]",
        jet.hess[(0, 0)],
        jet.hess[(0, 1)],
        jet.hess[(1, 0)],
        jet.hess[(1, 1)]
    );

    let report = fd_check(&f, &x, 1e-5)?;
    println!(
        "  finite-difference check: gradient {:.2e}, hessian {:.2e}",
        report.grad_error, report.hess_error
    );
    Ok(())
}
