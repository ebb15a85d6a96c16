use std::f64::consts::PI;

use super::{Func, Node, Var};

/// Variable bindings for evaluation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Env {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl Env {
    fn get(&self, v: Var) -> f64 {
        match v {
            Var::X => self.x,
            Var::Y => self.y,
            Var::T => self.t,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("domain error in `{subexpr}`: {reason}")]
    Domain {
        subexpr: String,
        reason: &'static str,
    },
}

impl EvalError {
    fn domain(node: &Node, reason: &'static str) -> EvalError {
        EvalError::Domain {
            subexpr: node.to_string(),
            reason,
        }
    }
}

fn finite(node: &Node, v: f64) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::domain(node, "non-finite result"))
    }
}

fn powi(node: &Node, base: f64, n: i32) -> Result<f64, EvalError> {
    if n < 0 && base == 0.0 {
        return Err(EvalError::domain(node, "division by zero"));
    }
    finite(node, base.powi(n))
}

pub(crate) fn eval(node: &Node, env: &Env) -> Result<f64, EvalError> {
    let v = match node {
        Node::Num(v) => *v,
        Node::Pi => PI,
        Node::Var(v) => env.get(*v),
        Node::Neg(a) => -eval(a, env)?,
        Node::Add(a, b) => eval(a, env)? + eval(b, env)?,
        Node::Sub(a, b) => eval(a, env)? - eval(b, env)?,
        Node::Mul(a, b) => eval(a, env)? * eval(b, env)?,
        Node::Div(a, b) => {
            let num = eval(a, env)?;
            let den = eval(b, env)?;
            if den == 0.0 {
                return Err(EvalError::domain(node, "division by zero"));
            }
            num / den
        }
        Node::Pow(a, n) => return powi(node, eval(a, env)?, *n),
        Node::Call(func, args) => {
            let a = eval(&args[0], env)?;
            match func {
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Exp => a.exp(),
                Func::Log => {
                    if a <= 0.0 {
                        return Err(EvalError::domain(node, "log of non-positive value"));
                    }
                    a.ln()
                }
                Func::Sqrt => {
                    if a < 0.0 {
                        return Err(EvalError::domain(node, "sqrt of negative value"));
                    }
                    a.sqrt()
                }
                Func::Abs => a.abs(),
                Func::Atan2 => a.atan2(eval(&args[1], env)?),
            }
        }
    };
    finite(node, v)
}

/// Forward-mode evaluation in `t`: returns (value, d value / dt).
/// The value component is bit-identical to [`eval`].
pub(crate) fn eval_dual(node: &Node, t: f64) -> Result<(f64, f64), EvalError> {
    let env = Env { x: 0.0, y: 0.0, t };
    dual(node, &env)
}

fn dual(node: &Node, env: &Env) -> Result<(f64, f64), EvalError> {
    let (v, d) = match node {
        Node::Num(v) => (*v, 0.0),
        Node::Pi => (PI, 0.0),
        Node::Var(v) => (env.get(*v), if *v == Var::T { 1.0 } else { 0.0 }),
        Node::Neg(a) => {
            let (v, d) = dual(a, env)?;
            (-v, -d)
        }
        Node::Add(a, b) => {
            let (va, da) = dual(a, env)?;
            let (vb, db) = dual(b, env)?;
            (va + vb, da + db)
        }
        Node::Sub(a, b) => {
            let (va, da) = dual(a, env)?;
            let (vb, db) = dual(b, env)?;
            (va - vb, da - db)
        }
        Node::Mul(a, b) => {
            let (va, da) = dual(a, env)?;
            let (vb, db) = dual(b, env)?;
            (va * vb, da * vb + va * db)
        }
        Node::Div(a, b) => {
            let (va, da) = dual(a, env)?;
            let (vb, db) = dual(b, env)?;
            if vb == 0.0 {
                return Err(EvalError::domain(node, "division by zero"));
            }
            (va / vb, (da * vb - va * db) / (vb * vb))
        }
        Node::Pow(a, n) => {
            let (va, da) = dual(a, env)?;
            let v = powi(node, va, *n)?;
            let d = if *n == 0 {
                0.0
            } else {
                *n as f64 * powi(node, va, *n - 1)? * da
            };
            (v, d)
        }
        Node::Call(func, args) => {
            let (a, da) = dual(&args[0], env)?;
            match func {
                Func::Sin => (a.sin(), a.cos() * da),
                Func::Cos => (a.cos(), -a.sin() * da),
                Func::Exp => {
                    let e = a.exp();
                    (e, e * da)
                }
                Func::Log => {
                    if a <= 0.0 {
                        return Err(EvalError::domain(node, "log of non-positive value"));
                    }
                    (a.ln(), da / a)
                }
                Func::Sqrt => {
                    if a < 0.0 {
                        return Err(EvalError::domain(node, "sqrt of negative value"));
                    }
                    let s = a.sqrt();
                    if s == 0.0 {
                        if da != 0.0 {
                            return Err(EvalError::domain(node, "sqrt not differentiable at 0"));
                        }
                        (s, 0.0)
                    } else {
                        (s, da / (2.0 * s))
                    }
                }
                Func::Abs => {
                    let sign = if a > 0.0 {
                        1.0
                    } else if a < 0.0 {
                        -1.0
                    } else {
                        0.0
                    };
                    (a.abs(), sign * da)
                }
                Func::Atan2 => {
                    let (b, db) = dual(&args[1], env)?;
                    let r2 = a * a + b * b;
                    let d = if r2 == 0.0 { 0.0 } else { (b * da - a * db) / r2 };
                    (a.atan2(b), d)
                }
            }
        }
    };
    Ok((finite(node, v)?, finite(node, d)?))
}

#[cfg(test)]
mod tests {
    use crate::expr::parse_expr;

    #[test]
    fn domain_errors_not_infinities() {
        let e = parse_expr("1/(x-1)").unwrap();
        let err = e.eval(1.0, 0.0).unwrap_err();
        assert_eq!(err.to_string(), "domain error in `(1 / (x - 1))`: division by zero");

        assert!(parse_expr("log(x)").unwrap().eval(0.0, 0.0).is_err());
        assert!(parse_expr("log(x)").unwrap().eval(-1.0, 0.0).is_err());
        assert!(parse_expr("sqrt(y)").unwrap().eval(0.0, -1.0).is_err());
        assert!(parse_expr("x^-1").unwrap().eval(0.0, 0.0).is_err());
        assert!(parse_expr("exp(x)").unwrap().eval(1000.0, 0.0).is_err());
    }

    #[test]
    fn evaluation_is_deterministic() {
        let e = parse_expr("sin(x)*exp(-y^2) + atan2(y, x)/3").unwrap();
        let a = e.eval(0.123, -4.56).unwrap();
        let b = e.clone().eval(0.123, -4.56).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
