//! A small expression language for smooth radial coefficients.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?          exponent must not depend on r
//! atom  := number | 'r' | 'pi' | 'exp' '(' expr ')' | 'sqrt' '(' expr ')' | '(' expr ')'
//! ```
//!
//! Evaluation carries the first two derivatives in `r` alongside the value,
//! so `σ'` and `σ''` are exact rather than finite-differenced.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};

/// A value together with its first and second derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub const fn constant(v: f64) -> Self {
        Jet { v, d1: 0.0, d2: 0.0 }
    }

    pub const fn variable(r: f64) -> Self {
        Jet { v: r, d1: 1.0, d2: 0.0 }
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        Jet {
            v: e,
            d1: e * self.d1,
            d2: e * (self.d2 + self.d1 * self.d1),
        }
    }

    pub fn powf(self, p: f64) -> Self {
        if p == 0.0 {
            return Jet::constant(1.0);
        }
        let (f, f1, f2) = if p.fract() == 0.0 && p.abs() < 1e9 {
            let n = p as i32;
            let f2 = if n == 1 {
                0.0
            } else {
                p * (p - 1.0) * self.v.powi(n - 2)
            };
            (self.v.powi(n), p * self.v.powi(n - 1), f2)
        } else {
            (
                self.v.powf(p),
                p * self.v.powf(p - 1.0),
                p * (p - 1.0) * self.v.powf(p - 2.0),
            )
        };
        Jet {
            v: f,
            d1: f1 * self.d1,
            d2: f2 * self.d1 * self.d1 + f1 * self.d2,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet {
            v: self.v + o.v,
            d1: self.d1 + o.d1,
            d2: self.d2 + o.d2,
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet {
            v: self.v - o.v,
            d1: self.d1 - o.d1,
            d2: self.d2 - o.d2,
        }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet {
            v: -self.v,
            d1: -self.d1,
            d2: -self.d2,
        }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        let q = self.v / o.v;
        let q1 = (self.d1 - q * o.d1) / o.v;
        let q2 = (self.d2 - 2.0 * q1 * o.d1 - q * o.d2) / o.v;
        Jet { v: q, d1: q1, d2: q2 }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Num(f64),
    R,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, f64),
    Exp(Box<Node>),
}

impl Node {
    fn eval(&self, r: Jet) -> Jet {
        match self {
            Node::Num(c) => Jet::constant(*c),
            Node::R => r,
            Node::Neg(a) => -a.eval(r),
            Node::Add(a, b) => a.eval(r) + b.eval(r),
            Node::Sub(a, b) => a.eval(r) - b.eval(r),
            Node::Mul(a, b) => a.eval(r) * b.eval(r),
            Node::Div(a, b) => a.eval(r) / b.eval(r),
            Node::Pow(a, p) => a.eval(r).powf(*p),
            Node::Exp(a) => a.eval(r).exp(),
        }
    }

    fn depends_on_r(&self) -> bool {
        match self {
            Node::Num(_) => false,
            Node::R => true,
            Node::Neg(a) | Node::Pow(a, _) | Node::Exp(a) => a.depends_on_r(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.depends_on_r() || b.depends_on_r()
            }
        }
    }
}

/// A parsed expression in `r`. Keeps its source text for display and
/// serialization.
#[derive(Clone, Debug)]
pub struct Expr {
    source: Arc<str>,
    root: Arc<Node>,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root
    }
}

impl Expr {
    pub fn parse(source: &str) -> Result<Self> {
        let mut p = Parser {
            src: source.as_bytes(),
            pos: 0,
        };
        let root = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(Expr {
            source: source.into(),
            root: Arc::new(root),
        })
    }

    /// The constant expression `c`.
    pub fn constant(c: f64) -> Self {
        Expr {
            source: format_number(c).into(),
            root: Arc::new(Node::Num(c)),
        }
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Value, first and second derivative at `r`.
    pub fn eval(&self, r: f64) -> Jet {
        self.root.eval(Jet::variable(r))
    }

    /// Whether the expression is independent of `r`.
    pub fn is_constant(&self) -> bool {
        !self.root.depends_on_r()
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

fn format_number(c: f64) -> String {
    format!("{c:?}")
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Parse {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat(b'-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let at = self.pos;
            let exponent = self.unary()?;
            if exponent.depends_on_r() {
                return Err(Error::Parse {
                    offset: at,
                    message: "exponent must not depend on r".into(),
                });
            }
            let p = exponent.eval(Jet::constant(0.0)).v;
            if !p.is_finite() {
                return Err(Error::Parse {
                    offset: at,
                    message: "exponent is not finite".into(),
                });
            }
            return Ok(Node::Pow(Box::new(base), p));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                match word {
                    "r" => Ok(Node::R),
                    "pi" => Ok(Node::Num(std::f64::consts::PI)),
                    "exp" | "sqrt" => {
                        self.expect(b'(')?;
                        let arg = self.expr()?;
                        self.expect(b')')?;
                        Ok(if word == "exp" {
                            Node::Exp(Box::new(arg))
                        } else {
                            Node::Pow(Box::new(arg), 0.5)
                        })
                    }
                    _ => {
                        self.pos = start;
                        Err(self.error(&format!("unknown identifier '{word}'")))
                    }
                }
            }
            Some(_) => Err(self.error("expected a number, r, a function or '('")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.src.get(self.pos), Some(b'e') | Some(b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            let before = self.pos;
            digits(self);
            if self.pos == before {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        text.parse::<f64>().map(Node::Num).map_err(|_| Error::Parse {
            offset: start,
            message: format!("malformed number '{text}'"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * (1.0 + b.abs())
    }

    #[test]
    fn linear_profile() {
        let e = Expr::parse("2 - r").unwrap();
        let j = e.eval(0.25);
        assert_eq!((j.v, j.d1, j.d2), (1.75, -1.0, 0.0));
        assert!(!e.is_constant());
    }

    #[test]
    fn precedence_and_associativity() {
        let e = Expr::parse("1 + 2 * 3 ^ 2 / 4 - -1").unwrap();
        assert!(close(e.eval(0.0).v, 1.0 + 2.0 * 9.0 / 4.0 + 1.0));
        let e = Expr::parse("2^3^2").unwrap();
        assert!(close(e.eval(0.0).v, 512.0));
        let e = Expr::parse("-r^2").unwrap();
        assert!(close(e.eval(3.0).v, -9.0));
        assert!(Expr::parse("8 - 2 - 1").unwrap().eval(0.0).v == 5.0);
    }

    #[test]
    fn analytic_derivatives() {
        let e = Expr::parse("exp(-r^2) * sqrt(1 + r) / (3 - r)").unwrap();
        let f = |r: f64| (-r * r).exp() * (1.0 + r).sqrt() / (3.0 - r);
        for r in [0.1, 0.4, 0.9] {
            let j = e.eval(r);
            let h = 1e-4;
            let d1 = (f(r + h) - f(r - h)) / (2.0 * h);
            let d2 = (f(r + h) - 2.0 * f(r) + f(r - h)) / (h * h);
            assert!(close(j.v, f(r)));
            assert!((j.d1 - d1).abs() < 1e-7);
            assert!((j.d2 - d2).abs() < 1e-5);
        }
    }

    #[test]
    fn rational_exponents() {
        let e = Expr::parse("(1 + r)^(3/2)").unwrap();
        let j = e.eval(0.44);
        assert!(close(j.v, 1.44f64.powf(1.5)));
        assert!(close(j.d1, 1.5 * 1.2));
        assert!(close(j.d2, 0.75 / 1.2));
    }

    #[test]
    fn constants_and_numbers() {
        assert!(Expr::parse("3").unwrap().is_constant());
        assert!(close(Expr::parse("1.5e-1 * pi").unwrap().eval(0.0).v, 0.15 * std::f64::consts::PI));
        assert_eq!(Expr::constant(0.25).source(), "0.25");
    }

    #[test]
    fn parse_errors_carry_offsets() {
        let err = Expr::parse("2 * (r + 1").unwrap_err();
        assert!(matches!(err, Error::Parse { offset: 10, .. }), "{err:?}");
        let err = Expr::parse("2 + cos(r)").unwrap_err();
        assert!(matches!(err, Error::Parse { offset: 4, .. }), "{err:?}");
        assert!(Expr::parse("r ^ r").is_err());
        assert!(Expr::parse("").is_err());
        assert!(Expr::parse("1 2").is_err());
    }
}
