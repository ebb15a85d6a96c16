//! Scalar expressions in the plane variables `x`, `y` (and the path
//! parameter `t`).
//!
//! Grammar, highest binding last:
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | power
//! power    := primary ('^' exponent)?
//! exponent := '-'? INTEGER ('^' exponent)?
//! primary  := NUMBER | 'pi' | VAR | FUNC '(' expr (',' expr)* ')' | '(' expr ')'
//! VAR      := 'x' | 'y'            (or 't' for path parametrizations)
//! FUNC     := 'sin' | 'cos' | 'exp' | 'log' | 'atan2' | 'sqrt' | 'abs'
//! ```
//!
//! Exponents are integer constants (`2^3^2` folds to `2^9`), so powers of
//! negative bases stay real. There is no implicit multiplication.

mod eval;
mod lexer;
mod parser;

use std::fmt;
use std::sync::Arc;

pub use eval::{Env, EvalError};
pub use parser::ParseError;

/// Free variables an expression may reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
    T,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::T => "t",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Atan2,
    Sqrt,
    Abs,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Sin,
        Func::Cos,
        Func::Exp,
        Func::Log,
        Func::Atan2,
        Func::Sqrt,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Atan2 => "atan2",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Atan2 => 2,
            _ => 1,
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Func::ALL.iter().copied().find(|f| f.name() == name)
    }
}

/// Expression tree node.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    /// Non-negative numeric literal.
    Num(f64),
    Pi,
    Var(Var),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, i32),
    Call(Func, Vec<Node>),
}

impl Node {
    pub fn num(v: f64) -> Node {
        if v < 0.0 {
            Node::Neg(Box::new(Node::Num(-v)))
        } else {
            Node::Num(v)
        }
    }

    pub fn var(v: Var) -> Node {
        Node::Var(v)
    }

    pub fn add(a: Node, b: Node) -> Node {
        Node::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Node, b: Node) -> Node {
        Node::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Node, b: Node) -> Node {
        Node::Mul(Box::new(a), Box::new(b))
    }

    pub fn div(a: Node, b: Node) -> Node {
        Node::Div(Box::new(a), Box::new(b))
    }

    pub fn neg(a: Node) -> Node {
        Node::Neg(Box::new(a))
    }

    pub fn pow(a: Node, n: i32) -> Node {
        Node::Pow(Box::new(a), n)
    }

    pub fn call(f: Func, args: Vec<Node>) -> Node {
        Node::Call(f, args)
    }

    fn uses(&self, v: Var) -> bool {
        match self {
            Node::Num(_) | Node::Pi => false,
            Node::Var(w) => *w == v,
            Node::Neg(a) | Node::Pow(a, _) => a.uses(v),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.uses(v) || b.uses(v)
            }
            Node::Call(_, args) => args.iter().any(|a| a.uses(v)),
        }
    }
}

/// Fully parenthesized rendering that parses back to an identical tree.
impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Num(v) => write!(f, "{v}"),
            Node::Pi => f.write_str("pi"),
            Node::Var(v) => f.write_str(v.name()),
            Node::Neg(a) => write!(f, "(-{a})"),
            Node::Add(a, b) => write!(f, "({a} + {b})"),
            Node::Sub(a, b) => write!(f, "({a} - {b})"),
            Node::Mul(a, b) => write!(f, "({a} * {b})"),
            Node::Div(a, b) => write!(f, "({a} / {b})"),
            Node::Pow(a, n) => write!(f, "({a})^{n}"),
            Node::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// An immutable, cheaply clonable expression.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarExpr {
    root: Arc<Node>,
}

impl ScalarExpr {
    /// Parses an expression in `x` and `y`.
    pub fn parse(src: &str) -> Result<ScalarExpr, ParseError> {
        Self::parse_with_vars(src, &[Var::X, Var::Y])
    }

    /// Parses an expression in the path parameter `t`.
    pub fn parse_param(src: &str) -> Result<ScalarExpr, ParseError> {
        Self::parse_with_vars(src, &[Var::T])
    }

    pub fn parse_with_vars(src: &str, vars: &[Var]) -> Result<ScalarExpr, ParseError> {
        let node = parser::parse(src, vars)?;
        Ok(ScalarExpr::from_node(node))
    }

    pub fn from_node(node: Node) -> ScalarExpr {
        ScalarExpr {
            root: Arc::new(node),
        }
    }

    pub fn constant(v: f64) -> ScalarExpr {
        ScalarExpr::from_node(Node::num(v))
    }

    pub fn node(&self) -> &Node {
        &self.root
    }

    pub fn uses(&self, v: Var) -> bool {
        self.root.uses(v)
    }

    /// Evaluates at a point of the plane.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64, EvalError> {
        eval::eval(&self.root, &Env { x, y, t: 0.0 })
    }

    pub fn eval_env(&self, env: &Env) -> Result<f64, EvalError> {
        eval::eval(&self.root, env)
    }

    /// Value and derivative with respect to `t` (forward-mode).
    pub fn eval_t_with_derivative(&self, t: f64) -> Result<(f64, f64), EvalError> {
        eval::eval_dual(&self.root, t)
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

/// Shorthand for [`ScalarExpr::parse`].
pub fn parse_expr(src: &str) -> Result<ScalarExpr, ParseError> {
    ScalarExpr::parse(src)
}

/// Shorthand for [`ScalarExpr::eval`].
pub fn eval_expr(e: &ScalarExpr, x: f64, y: f64) -> Result<f64, EvalError> {
    e.eval(x, y)
}
