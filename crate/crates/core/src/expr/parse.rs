//! Recursive-descent parser for the expression grammar.
//!
//! Grammar: rationals `p/q`, symbols `[A-Za-z][A-Za-z0-9]*`, derivative
//! atoms `E_u`, `xi1_tx`, operators `+ - * / ^`, `exp(...)`, parentheses.
//! Exponents after `^` are exact rational literals, optionally
//! parenthesized and signed: `x^2`, `h^(1/2)`, `E^(-1)`.
//!
//! Identifier meaning is delegated to a [`Resolver`]: the plain [`parse`]
//! treats every identifier (including underscore names) as an opaque
//! symbol, while a declaration context resolves derivative atoms, jet
//! coordinates, and undeclared-symbol errors.

use super::{Expr, Rat};
use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("syntax error at {line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

/// Maps identifiers (and call-style identifiers) to expressions.
pub trait Resolver {
    /// Resolve a bare identifier such as `x`, `E_u` or `xi1_tx`.
    fn resolve_symbol(&self, name: &str) -> Result<Expr, String>;

    /// Resolve a call `name(arg)`.  `exp` is handled by the parser itself;
    /// returning `Ok(None)` reports an unknown-function error.
    fn resolve_call(&self, _name: &str, _arg: Expr) -> Result<Option<Expr>, String> {
        Ok(None)
    }
}

/// Context-free resolver: every identifier is an opaque symbol.
struct Opaque;

impl Resolver for Opaque {
    fn resolve_symbol(&self, name: &str) -> Result<Expr, String> {
        Ok(Expr::sym(name))
    }
}

/// Parse with opaque symbol resolution.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    parse_with(text, &Opaque)
}

/// Parse with a declaration-aware resolver.
pub fn parse_with(text: &str, resolver: &dyn Resolver) -> Result<Expr, ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        resolver,
    };
    let e = p.expression()?;
    p.expect_eof()?;
    Ok(e)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        let tok = if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_ascii_digit() {
                    s.push(bump(&mut chars));
                } else {
                    break;
                }
            }
            Tok::Int(s.parse().expect("digits"))
        } else if c.is_ascii_alphabetic() {
            let mut s = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_ascii_alphanumeric() || d == '_' {
                    s.push(bump(&mut chars));
                } else {
                    break;
                }
            }
            Tok::Ident(s)
        } else {
            let t = match c {
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                '^' => Tok::Caret,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => {
                    return Err(ParseError {
                        line: tline,
                        col: tcol,
                        msg: format!("unexpected character `{c}`"),
                    })
                }
            };
            bump(&mut chars);
            t
        };
        out.push(Spanned {
            tok,
            line: tline,
            col: tcol,
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Spanned>,
    pos: usize,
    resolver: &'a dyn Resolver,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Spanned {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Spanned {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, at: &Spanned, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            line: at.line,
            col: at.col,
            msg: msg.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        let t = self.next();
        if t.tok == tok {
            Ok(())
        } else {
            self.error(&t, format!("expected {what}"))
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        let t = self.peek().clone();
        if t.tok == Tok::Eof {
            Ok(())
        } else {
            self.error(&t, "unexpected trailing input")
        }
    }

    fn expression(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.next();
                    terms.push(self.term()?);
                }
                Tok::Minus => {
                    self.next();
                    terms.push(self.term()?.neg());
                }
                _ => break,
            }
        }
        Ok(Expr::sum(terms))
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.unary()?];
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.next();
                    factors.push(self.unary()?);
                }
                Tok::Slash => {
                    self.next();
                    let d = self.unary()?;
                    factors.push(Expr::pow(d, Rat::new((-1).into(), 1.into())));
                }
                _ => break,
            }
        }
        Ok(Expr::prod(factors))
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek().tok == Tok::Minus {
            self.next();
            return Ok(self.unary()?.neg());
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.peek().tok == Tok::Caret {
            self.next();
            let exp = self.exponent()?;
            return Ok(Expr::pow(base, exp));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<Rat, ParseError> {
        let t = self.next();
        match t.tok {
            Tok::Int(n) => Ok(Rat::from_integer(n)),
            Tok::LParen => {
                let sign = if self.peek().tok == Tok::Minus {
                    self.next();
                    -1
                } else {
                    1
                };
                let t2 = self.next();
                let num = match t2.tok {
                    Tok::Int(n) => n,
                    _ => return self.error(&t2, "expected integer in exponent"),
                };
                let den = if self.peek().tok == Tok::Slash {
                    self.next();
                    let t3 = self.next();
                    match t3.tok {
                        Tok::Int(n) => n,
                        _ => return self.error(&t3, "expected integer denominator"),
                    }
                } else {
                    BigInt::from(1)
                };
                self.expect(Tok::RParen, "`)` after exponent")?;
                Ok(Rat::new(num * BigInt::from(sign), den))
            }
            _ => self.error(&t, "expected rational exponent"),
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let t = self.next();
        match t.tok {
            Tok::Int(n) => Ok(Expr::Rat(Rat::from_integer(n))),
            Tok::LParen => {
                let e = self.expression()?;
                let closing = self.next();
                if closing.tok != Tok::RParen {
                    return self.error(&t, "unbalanced parenthesis");
                }
                Ok(e)
            }
            Tok::Ident(ref name) => {
                let name = name.clone();
                if self.peek().tok == Tok::LParen {
                    self.next();
                    let arg = self.expression()?;
                    self.expect(Tok::RParen, "`)` closing call")?;
                    if name == "exp" {
                        return Ok(Expr::exp(arg));
                    }
                    return match self.resolver.resolve_call(&name, arg) {
                        Ok(Some(e)) => Ok(e),
                        Ok(None) => self.error(&t, format!("unknown function `{name}`")),
                        Err(msg) => self.error(&t, msg),
                    };
                }
                match self.resolver.resolve_symbol(&name) {
                    Ok(e) => Ok(e),
                    Err(msg) => self.error(&t, msg),
                }
            }
            _ => self.error(&t, "expected a value"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{rat, Expr};
    use super::parse;

    #[test]
    fn direct_syntax_mapping() {
        let e = parse("u_t - E*u_xx").unwrap();
        assert_eq!(
            e,
            Expr::sym("u_t") - Expr::sym("E") * Expr::sym("u_xx")
        );
        let p = parse("h^(1/2)*x").unwrap();
        assert_eq!(p, Expr::pow(Expr::sym("h"), rat(1, 2)) * Expr::sym("x"));
    }

    #[test]
    fn unbalanced_parenthesis_is_a_syntax_error() {
        let err = parse("2*(t").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.msg.contains("unbalanced") || err.msg.contains("expected"));
    }

    #[test]
    fn rationals_and_division_fold() {
        assert_eq!(parse("1/2").unwrap(), Expr::rat(1, 2));
        assert_eq!(parse("x/2").unwrap(), Expr::rat(1, 2) * Expr::sym("x"));
        assert_eq!(parse("4/2").unwrap(), Expr::int(2));
    }

    #[test]
    fn print_parse_round_trip_on_canonical_text() {
        let samples = [
            "u_t - E*u_xx",
            "2 + x + x^2",
            "x*h^(1/2)",
            "exp(-u)",
            "-2/3*y + exp(2*u)*x",
            "(1 + x)^(-2)",
        ];
        for s in samples {
            let e = parse(s).unwrap();
            let printed = e.to_string();
            let back = parse(&printed).unwrap();
            assert_eq!(e, back, "round-trip failed for `{s}` -> `{printed}`");
        }
    }
}
