//! Parse, print and evaluate field-component expressions.

use locon::expr::ScalarExpr;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for src in ["-y/(x^2+y^2)", "x/(x^2+y^2)", "2*sin(x)*cos(y) + exp(-x^2)", "atan2(y, x)", "sqrt(x^2 + y^2)^3"] {
        let e = ScalarExpr::parse(src)?;
        let back = ScalarExpr::parse(&e.to_string())?;
        println!("{src:<32} prints as {:<36} f(1, 2) = {:.12}", e.to_string(), e.eval(1.0, 2.0)?);
        assert_eq!(back.node(), e.node());
    }

    // a domain error is reported, not returned as NaN
    let e = ScalarExpr::parse("log(x)")?;
    println!("log(x) at x = -1: {}", e.eval(-1.0, 0.0).unwrap_err());

    // parametric curves use t, with an exact derivative
    let c = ScalarExpr::parse_param("cos(2*pi*t)")?;
    let (v, dv) = c.eval_t_with_derivative(0.125)?;
    println!("cos(2 pi t) at t = 1/8: value {v:.12}, derivative {dv:.12}");

    match ScalarExpr::parse("x + * y") {
        Err(err) => println!("parse error: {err}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
