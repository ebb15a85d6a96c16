use super::lexer::{tokenize, Spanned, Tok};
use super::{Func, Node, Var};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("parse error at byte {offset}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        offset: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("parse error at byte {offset}: unknown identifier `{name}`")]
    UnknownIdentifier { offset: usize, name: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownIdentifier { offset, .. } => {
                *offset
            }
        }
    }
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    vars: &'a [Var],
}

pub(crate) fn parse(src: &str, vars: &[Var]) -> Result<Node, ParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0, vars };
    let node = p.expr()?;
    match p.peek() {
        Tok::End => Ok(node),
        _ => Err(p.unexpected(&["'+'", "'-'", "'*'", "'/'", "'^'", "end of input"])),
    }
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].offset
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&[what]))
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Node::add(lhs, self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Node::sub(lhs, self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Node::mul(lhs, self.unary()?);
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Node::div(lhs, self.unary()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Node::neg(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.primary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let n = self.exponent()?;
            return Ok(Node::pow(base, n));
        }
        Ok(base)
    }

    // Folds `a^b^c` right-associatively into one integer.
    fn exponent(&mut self) -> Result<i32, ParseError> {
        let start = self.offset();
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let lit = match self.peek() {
            Tok::Int(v) => *v,
            _ => return Err(self.unexpected(&["integer exponent"])),
        };
        self.bump();
        let mut value = i64::try_from(lit).ok();
        if *self.peek() == Tok::Caret {
            self.bump();
            let inner = self.exponent()?;
            value = match (value, u32::try_from(inner)) {
                (Some(b), Ok(e)) => b.checked_pow(e),
                // negative inner power of an integer is not an integer unless |b| == 1
                (Some(1), Err(_)) => Some(1),
                _ => None,
            };
        }
        let value = value.map(|v| if negative { -v } else { v });
        value
            .and_then(|v| i32::try_from(v).ok())
            .ok_or_else(|| ParseError::Syntax {
                offset: start,
                expected: vec!["integer exponent in i32 range".into()],
                found: "out-of-range exponent".into(),
            })
    }

    fn primary(&mut self) -> Result<Node, ParseError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Node::Num(v))
            }
            Tok::Int(v) => {
                self.bump();
                Ok(Node::Num(v as f64))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump();
                if name == "pi" {
                    return Ok(Node::Pi);
                }
                if let Some(v) = self.vars.iter().copied().find(|v| v.name() == name) {
                    return Ok(Node::Var(v));
                }
                if let Some(func) = Func::from_name(&name) {
                    return self.call(func);
                }
                Err(ParseError::UnknownIdentifier { offset, name })
            }
            _ => Err(self.unexpected(&["number", "identifier", "'('", "'-'"])),
        }
    }

    fn call(&mut self, func: Func) -> Result<Node, ParseError> {
        self.expect(Tok::LParen, "'('")?;
        let mut args = vec![self.expr()?];
        while args.len() < func.arity() {
            self.expect(Tok::Comma, "','")?;
            args.push(self.expr()?);
        }
        self.expect(Tok::RParen, "')'")?;
        Ok(Node::call(func, args))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const XY: &[Var] = &[Var::X, Var::Y];

    #[test]
    fn error_offsets_and_expected_sets() {
        let err = parse("x + * y", XY).unwrap_err();
        assert_eq!(err.offset(), 4);
        assert_eq!(
            err.to_string(),
            "parse error at byte 4: expected number or identifier or '(' or '-', found '*'"
        );

        let err = parse("2 x", XY).unwrap_err();
        assert_eq!(err.offset(), 2);
        assert!(err.to_string().contains("end of input"));

        let err = parse("sin(x", XY).unwrap_err();
        assert_eq!(err.offset(), 5);

        let err = parse("atan2(y)", XY).unwrap_err();
        assert!(err.to_string().contains("','"));
    }

    #[test]
    fn unknown_identifier() {
        let err = parse("2*foo(x)", XY).unwrap_err();
        assert_eq!(
            err,
            ParseError::UnknownIdentifier {
                offset: 2,
                name: "foo".into()
            }
        );
    }

    #[test]
    fn exponent_must_be_integer() {
        assert!(parse("x^y", XY).is_err());
        assert!(parse("x^1.5", XY).is_err());
        assert!(parse("x^(2)", XY).is_err());
        assert_eq!(parse("x^2^3", XY).unwrap(), Node::pow(Node::Var(Var::X), 8));
        assert_eq!(parse("x^-2", XY).unwrap(), Node::pow(Node::Var(Var::X), -2));
        assert!(parse("x^99999999999", XY).is_err());
    }
}
