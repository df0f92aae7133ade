//! Closed-form scalar functions of chart coordinates.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' exponent)?
//! exponent:= '-'? INT ('^' exponent)? | '(' exponent ')'
//! atom    := NUMBER | IDENT | FUNC '(' sum ')' | '(' sum ')'
//! FUNC    := sinh | cosh | tanh | exp | ln | sqrt
//! ```
//!
//! Exponents are integers; a chained `2^3` exponent is folded to `8` at parse
//! time, which makes `^` right-associative. Identifiers must be chart
//! coordinates or named constants supplied to the parser; constants are
//! substituted as literals.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::jet::{checked_div, checked_ln, checked_powi, checked_sqrt, DomainError, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 6] = [
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Exp,
        Func::Ln,
        Func::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// AST node. Constants are non-negative; a negative literal is `Neg(Const)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var(usize),
    Neg(Box<Node>),
    Func(Func, Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Pow(Box<Node>, i32),
}

impl Node {
    pub fn constant(v: f64) -> Node {
        if v < 0.0 {
            Node::Neg(Box::new(Node::Const(-v)))
        } else {
            // drops the sign of −0, which would render as `-0`
            Node::Const(v.abs())
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Node::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Node::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Node::Neg(_) => 3,
            Node::Pow(..) => 4,
            Node::Const(_) | Node::Var(_) | Node::Func(..) => 5,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Const(_) | Node::Var(_) => 1,
            Node::Neg(a) | Node::Func(_, a) | Node::Pow(a, _) => 1 + a.depth(),
            Node::Bin(_, a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Whether coordinate `idx` occurs anywhere in the tree.
    pub fn uses_var(&self, idx: usize) -> bool {
        match self {
            Node::Const(_) => false,
            Node::Var(i) => *i == idx,
            Node::Neg(a) | Node::Func(_, a) | Node::Pow(a, _) => a.uses_var(idx),
            Node::Bin(_, a, b) => a.uses_var(idx) || b.uses_var(idx),
        }
    }

    pub fn eval<S: Scalar>(&self, p: &[S]) -> Result<S, DomainError> {
        let v = match self {
            Node::Const(c) => S::cst(*c),
            Node::Var(i) => p[*i],
            Node::Neg(a) => -a.eval(p)?,
            Node::Func(f, a) => {
                let x = a.eval(p)?;
                match f {
                    Func::Sinh => x.sinh(),
                    Func::Cosh => x.cosh(),
                    Func::Tanh => x.tanh(),
                    Func::Exp => x.exp(),
                    Func::Ln => checked_ln(x)?,
                    Func::Sqrt => checked_sqrt(x)?,
                }
            }
            Node::Bin(op, a, b) => {
                let (x, y) = (a.eval(p)?, b.eval(p)?);
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => checked_div(x, y)?,
                }
            }
            Node::Pow(a, k) => checked_powi(a.eval(p)?, *k)?,
        };
        if !v.value().is_finite() {
            return Err(DomainError::NonFinite("expression evaluation"));
        }
        Ok(v)
    }

    fn render(&self, names: &[String], min_prec: u8, out: &mut String) {
        let wrap = self.prec() < min_prec;
        if wrap {
            out.push('(');
        }
        match self {
            Node::Const(c) => out.push_str(&format!("{c}")),
            Node::Var(i) => out.push_str(&names[*i]),
            Node::Neg(a) => {
                out.push('-');
                a.render(names, 3, out);
            }
            Node::Func(f, a) => {
                out.push_str(f.name());
                out.push('(');
                a.render(names, 0, out);
                out.push(')');
            }
            Node::Bin(op, a, b) => {
                let (sym, lp, rp) = match op {
                    BinOp::Add => (" + ", 1, 2),
                    BinOp::Sub => (" - ", 1, 2),
                    BinOp::Mul => ("*", 2, 3),
                    BinOp::Div => ("/", 2, 3),
                };
                a.render(names, lp, out);
                out.push_str(sym);
                b.render(names, rp, out);
            }
            Node::Pow(a, k) => {
                a.render(names, 5, out);
                out.push_str(&format!("^{k}"));
            }
        }
        if wrap {
            out.push(')');
        }
    }
}

/// A parsed expression bound to the coordinate list it was parsed over.
#[derive(Debug, Clone)]
pub struct Expr {
    root: Node,
    coords: Arc<[String]>,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root
    }
}

impl Expr {
    pub fn from_node(root: Node, coords: &[String]) -> Expr {
        Expr {
            root,
            coords: coords.into(),
        }
    }

    pub fn constant(v: f64, coords: &[String]) -> Expr {
        Expr::from_node(Node::constant(v), coords)
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn coordinates(&self) -> &[String] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.root, Node::Const(c) if c == 0.0)
    }

    pub fn eval<S: Scalar>(&self, point: &[S]) -> Result<S, ExprError> {
        if point.len() != self.coords.len() {
            return Err(ExprError::Arity {
                expected: self.coords.len(),
                got: point.len(),
            });
        }
        Ok(self.root.eval(point)?)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.root.render(&self.coords, 0, &mut s);
        f.write_str(&s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("parse error at byte {offset}: {message} (expected {expected})")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
    pub expected: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("unknown variable `{name}` (coordinates: {})", coordinates.join(", "))]
    UnknownVariable {
        name: String,
        coordinates: Vec<String>,
    },
    #[error("expression takes {expected} coordinates, got {got}")]
    Arity { expected: usize, got: usize },
    #[error(transparent)]
    Domain(#[from] DomainError),
}

pub fn parse(text: &str, coordinates: &[String]) -> Result<Expr, ExprError> {
    parse_with_constants(text, coordinates, &BTreeMap::new())
}

/// Parse with named constants that are substituted as literals.
pub fn parse_with_constants(
    text: &str,
    coordinates: &[String],
    constants: &BTreeMap<String, f64>,
) -> Result<Expr, ExprError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        coords: coordinates,
        constants,
    };
    let root = p.sum()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input", "operator or end of input"));
    }
    Ok(Expr::from_node(root, coordinates))
}

/// Convenience for owned coordinate lists given as `&str`.
pub fn coords(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    coords: &'a [String],
    constants: &'a BTreeMap<String, f64>,
}

impl<'a> Parser<'a> {
    fn error(&self, message: &str, expected: &str) -> ExprError {
        ExprError::Parse(ParseError {
            offset: self.pos.min(self.src.len()),
            message: message.to_string(),
            expected: expected.to_string(),
        })
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

    fn sum(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.product()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn product(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Node, ExprError> {
        if self.eat(b'-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ExprError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let k = self.exponent()?;
            return Ok(Node::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i32, ExprError> {
        if self.eat(b'(') {
            let k = self.exponent()?;
            if !self.eat(b')') {
                return Err(self.error("unclosed exponent", "`)`"));
            }
            return Ok(k);
        }
        let neg = self.eat(b'-');
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("exponent must be an integer literal", "integer"));
        }
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'.' | b'e' | b'E') {
            return Err(self.error("exponent must be an integer literal", "integer"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let mut k: i32 = text.parse().map_err(|_| {
            let mut e = self.error("exponent out of range", "integer");
            if let ExprError::Parse(p) = &mut e {
                p.offset = start;
            }
            e
        })?;
        if neg {
            k = -k;
        }
        if self.eat(b'^') {
            let at = self.pos;
            let e = self.exponent()?;
            k = u32::try_from(e)
                .ok()
                .and_then(|e| k.checked_pow(e))
                .ok_or_else(|| {
                    let mut err = self.error("folded exponent out of range", "small exponent");
                    if let ExprError::Parse(p) = &mut err {
                        p.offset = at;
                    }
                    err
                })?;
        }
        Ok(k)
    }

    fn number(&mut self) -> Result<Node, ExprError> {
        let start = self.pos;
        let s = self.src;
        let digits = |p: &mut usize| {
            let b = *p;
            while *p < s.len() && s[*p].is_ascii_digit() {
                *p += 1;
            }
            *p > b
        };
        let mut p = self.pos;
        let int = digits(&mut p);
        let mut frac = false;
        if p < s.len() && s[p] == b'.' {
            p += 1;
            frac = digits(&mut p);
        }
        if !int && !frac {
            return Err(self.error("malformed number", "digits"));
        }
        if p < s.len() && (s[p] == b'e' || s[p] == b'E') {
            let mut q = p + 1;
            if q < s.len() && (s[q] == b'+' || s[q] == b'-') {
                q += 1;
            }
            if digits(&mut q) {
                p = q;
            } else {
                self.pos = q;
                return Err(self.error("malformed exponent in number", "digits"));
            }
        }
        self.pos = p;
        let text = std::str::from_utf8(&s[start..p]).unwrap();
        let v: f64 = text.parse().map_err(|_| {
            let mut e = self.error("malformed number", "number");
            if let ExprError::Parse(pe) = &mut e {
                pe.offset = start;
            }
            e
        })?;
        Ok(Node::Const(v))
    }

    fn atom(&mut self) -> Result<Node, ExprError> {
        match self.peek() {
            None => Err(self.error("unexpected end of input", "operand")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.sum()?;
                if !self.eat(b')') {
                    return Err(self.error("unclosed parenthesis", "`)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                if let Some(f) = Func::from_name(name) {
                    if !self.eat(b'(') {
                        return Err(self.error(
                            "function application requires parentheses",
                            "`(`",
                        ));
                    }
                    let arg = self.sum()?;
                    if !self.eat(b')') {
                        return Err(self.error("unclosed function argument", "`)`"));
                    }
                    return Ok(Node::Func(f, Box::new(arg)));
                }
                if let Some(i) = self.coords.iter().position(|c| c == name) {
                    return Ok(Node::Var(i));
                }
                if let Some(&v) = self.constants.get(name) {
                    if !v.is_finite() {
                        return Err(self.error("non-finite named constant", "finite value"));
                    }
                    return Ok(Node::constant(v));
                }
                Err(ExprError::UnknownVariable {
                    name: name.to_string(),
                    coordinates: self.coords.to_vec(),
                })
            }
            Some(_) => Err(self.error("unexpected character", "operand")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{seed, Jet};

    fn xyz() -> Vec<String> {
        coords(&["x", "y", "z"])
    }

    #[test]
    fn sinh_of_product() {
        let e = parse("sinh(2*z)", &xyz()).unwrap();
        let want = Node::Func(
            Func::Sinh,
            Box::new(Node::Bin(
                BinOp::Mul,
                Box::new(Node::Const(2.0)),
                Box::new(Node::Var(2)),
            )),
        );
        assert_eq!(e.root(), &want);
        let again = parse(&e.to_string(), &xyz()).unwrap();
        assert_eq!(again, e);
    }

    #[test]
    fn named_constant_substitution() {
        let cs = coords(&["x1", "x2", "y1", "y2", "z"]);
        let mut k = BTreeMap::new();
        k.insert("c".to_string(), 1.0);
        let e = parse_with_constants("(c + x1^2 + x2^2)/z", &cs, &k).unwrap();
        assert_eq!(e.eval(&[1.0, 2.0, 0.0, 0.0, 2.0]).unwrap(), 3.0);
        k.insert("c".to_string(), -2.0);
        let e = parse_with_constants("c*x1", &cs, &k).unwrap();
        assert_eq!(e.to_string(), "-2*x1");
        assert_eq!(parse(&e.to_string(), &cs).unwrap(), e);
    }

    #[test]
    fn truncated_input_offset() {
        match parse("x +", &xyz()) {
            Err(ExprError::Parse(p)) => assert_eq!(p.offset, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_identifiers_rejected() {
        match parse("x + w", &xyz()) {
            Err(ExprError::UnknownVariable { name, coordinates }) => {
                assert_eq!(name, "w");
                assert_eq!(coordinates.len(), 3);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("sinh z", &xyz()), Err(ExprError::Parse(_))));
        assert!(matches!(parse("x^1.5", &xyz()), Err(ExprError::Parse(_))));
        assert!(matches!(parse("(x", &xyz()), Err(ExprError::Parse(_))));
        assert!(matches!(parse("x $ y", &xyz()), Err(ExprError::Parse(_))));
    }

    #[test]
    fn precedence_and_associativity() {
        let c = xyz();
        let ev = |s: &str| parse(s, &c).unwrap().eval(&[2.0, 3.0, 5.0]).unwrap();
        assert_eq!(ev("x - y - z"), -6.0);
        assert_eq!(ev("x / y / z"), 2.0 / 3.0 / 5.0);
        assert_eq!(ev("-x^2"), -4.0);
        assert_eq!(ev("x^3^2"), 512.0);
        assert_eq!(ev("x^0"), 1.0);
        assert_eq!(ev("x^-1"), 0.5);
        assert_eq!(ev("2 + 3 * x ^ 2"), 14.0);
        assert_eq!(ev(" ( x + y ) * z "), 25.0);
        assert_eq!(ev("1.5e1 + .5"), 15.5);
    }

    #[test]
    fn negative_zero_constant_round_trips() {
        let e = Expr::from_node(Node::constant(-0.0), &xyz());
        assert_eq!(e.to_string(), "0");
        assert_eq!(parse(&e.to_string(), &xyz()).unwrap().root(), e.root());
    }

    #[test]
    fn cosh_at_zero() {
        let e = parse("cosh(2*z)", &xyz()).unwrap();
        assert_eq!(e.eval(&[0.3, 0.1, 0.0]).unwrap(), 1.0);
    }

    #[test]
    fn sinh_reference_value() {
        let e = parse("sinh(2*z)", &xyz()).unwrap();
        // sinh(1) to 17 significant digits
        let reference = 1.175_201_193_643_801_4;
        assert!((e.eval(&[0.0, 0.0, 0.5]).unwrap() - reference).abs() < 1e-12);
    }

    #[test]
    fn quotient_derivative() {
        let c = coords(&["x", "z"]);
        let e = parse("(1 + x^2)/z", &c).unwrap();
        let p = seed(&[2.0, 1.0], 1).unwrap();
        let v: Jet<f64> = e.eval(&p).unwrap();
        assert_eq!(v.re, 5.0);
        assert_eq!(v.du, -5.0);
        let h = 1e-6;
        let fd = (e.eval(&[2.0, 1.0 + h]).unwrap() - e.eval(&[2.0, 1.0 - h]).unwrap()) / (2.0 * h);
        assert!((fd + 5.0).abs() < 1e-6);
    }

    #[test]
    fn domain_errors_propagate() {
        let e = parse("ln(x) + 1/y", &xyz()).unwrap();
        assert!(matches!(
            e.eval(&[-1.0, 1.0, 0.0]),
            Err(ExprError::Domain(_))
        ));
        assert!(matches!(
            e.eval(&[1.0, 0.0, 0.0]),
            Err(ExprError::Domain(_))
        ));
        assert!(matches!(e.eval(&[1.0, 1.0]), Err(ExprError::Arity { .. })));
    }
}
