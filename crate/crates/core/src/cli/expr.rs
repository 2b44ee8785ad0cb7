//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr  := term (("+" | "-") term)*
//! term  := unary ("*" unary)*
//! unary := "-" unary | power
//! power := atom ("^" INT)?
//! atom  := INT ("/" INT)? | NAME | "d" "(" NAME ")" | "(" expr ")"
//! ```
//!
//! Division is only allowed between integer literals.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graded_algebra::{AlgElement, GradedAlgebra, Q};

/// Position of a token in the spec file, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl Pos {
    fn error(self, message: impl Into<String>) -> Error {
        Error::SyntaxError {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Number(Q),
    Var(String, Pos),
    /// `d(name)`, a one-form symbol.
    Diff(String, Pos),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Sym(char),
    End,
}

struct Lexer {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

fn lex(src: &str, origin: Pos) -> Result<Lexer> {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    let pos = |i: usize| Pos {
        line: origin.line,
        column: origin.column + i,
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            toks.push((Tok::Int(digits.parse().expect("digits")), pos(start)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            toks.push((Tok::Name(chars[start..i].iter().collect()), pos(start)));
        } else if "+-*/^()".contains(c) {
            toks.push((Tok::Sym(c), pos(i)));
            i += 1;
        } else {
            return Err(pos(i).error(format!("unexpected character `{c}`")));
        }
    }
    toks.push((Tok::End, pos(chars.len())));
    Ok(Lexer { toks, at: 0 })
}

impl Lexer {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.pos().error(format!("expected `{c}`")))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while self.eat('*') {
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        if *self.peek() == Tok::Sym('/') {
            return Err(self.pos().error("division is only allowed between integer literals"));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat('^') {
            let p = self.pos();
            return match self.bump().0 {
                Tok::Int(n) => {
                    let e = u32::try_from(n).map_err(|_| p.error("exponent too large"))?;
                    Ok(Expr::Pow(Box::new(base), e))
                }
                _ => Err(p.error("expected a nonnegative integer exponent")),
            };
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let (tok, p) = self.bump();
        match tok {
            Tok::Int(n) => {
                if self.eat('/') {
                    let dp = self.pos();
                    match self.bump().0 {
                        Tok::Int(d) if !d.is_zero() => Ok(Expr::Number(Q::new(n, d))),
                        Tok::Int(_) => Err(dp.error("division by zero")),
                        _ => Err(dp.error("division is only allowed between integer literals")),
                    }
                } else {
                    Ok(Expr::Number(Q::from_integer(n)))
                }
            }
            Tok::Name(name) if name == "d" && *self.peek() == Tok::Sym('(') => {
                self.bump();
                let np = self.pos();
                let Tok::Name(inner) = self.bump().0 else {
                    return Err(np.error("expected a generator name inside d(...)"));
                };
                self.expect(')')?;
                Ok(Expr::Diff(inner, np))
            }
            Tok::Name(name) => Ok(Expr::Var(name, p)),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::End => Err(p.error("unexpected end of expression")),
            Tok::Sym(c) => Err(p.error(format!("unexpected `{c}`"))),
        }
    }
}

/// Parse `src`, which starts at `origin` in the enclosing file.
pub fn parse_expr(src: &str, origin: Pos) -> Result<Expr> {
    let mut lx = lex(src, origin)?;
    let e = lx.expr()?;
    if *lx.peek() != Tok::End {
        return Err(lx.pos().error("trailing input"));
    }
    Ok(e)
}

/// Evaluate in `alg`; `var` and `diff` resolve names to positions.
pub fn evaluate(
    e: &Expr,
    alg: &GradedAlgebra,
    var: &dyn Fn(&str, Pos) -> Result<usize>,
    diff: &dyn Fn(&str, Pos) -> Result<usize>,
) -> Result<AlgElement> {
    let rec = |x: &Expr| evaluate(x, alg, var, diff);
    Ok(match e {
        Expr::Number(c) => {
            if c.is_zero() {
                AlgElement::zero()
            } else if c.is_one() {
                AlgElement::one()
            } else {
                AlgElement::constant(c.clone())
            }
        }
        Expr::Var(name, p) => alg.var(var(name, *p)?),
        Expr::Diff(name, p) => alg.var(diff(name, *p)?),
        Expr::Add(a, b) => &rec(a)? + &rec(b)?,
        Expr::Sub(a, b) => &rec(a)? - &rec(b)?,
        Expr::Mul(a, b) => alg.mul(&rec(a)?, &rec(b)?),
        Expr::Neg(a) => -&rec(a)?,
        Expr::Pow(a, n) => alg.pow(&rec(a)?, *n),
    })
}
