//! Nestable forward-mode dual numbers.
//!
//! A [`Jet<T>`] carries a value and one directional derivative over the
//! scalar type `T`. Nesting gives higher orders: `Jet<Jet<f64>>` seeded in
//! directions `u` (outer) and `v` (inner) carries `∂_u ∂_v f` in
//! `du.du`. Everything in the geometry engine is written against the
//! [`Scalar`] trait so the same code runs on plain `f64` and on any nesting
//! depth.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Smallest denominator magnitude accepted by checked division.
pub const DIV_GUARD: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("division by {0:e} (|denominator| must exceed {DIV_GUARD:e})")]
    Division(f64),
    #[error("logarithm of non-positive value {0}")]
    Logarithm(f64),
    #[error("square root of {0} (argument must be positive when derivatives are carried)")]
    SquareRoot(f64),
    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),
}

/// Scalar type usable by the expression evaluator and the tensor engine.
pub trait Scalar:
    Copy
    + fmt::Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Nesting depth: 0 for `f64`, `T::ORDER + 1` for `Jet<T>`.
    const ORDER: usize;

    fn cst(v: f64) -> Self;
    fn value(&self) -> f64;
    fn scale(self, k: f64) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn tanh(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn powi(self, k: i32) -> Self;

    fn zero() -> Self {
        Self::cst(0.0)
    }

    fn one() -> Self {
        Self::cst(1.0)
    }

    fn square(self) -> Self {
        self * self
    }
}

impl Scalar for f64 {
    const ORDER: usize = 0;

    fn cst(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn powi(self, k: i32) -> Self {
        f64::powi(self, k)
    }
}

/// First-order dual number over `T`.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Jet<T> {
    pub re: T,
    pub du: T,
}

pub type Jet1 = Jet<f64>;
pub type Jet2 = Jet<Jet1>;
pub type Jet3 = Jet<Jet2>;

impl<T: Scalar> Jet<T> {
    pub fn new(re: T, du: T) -> Self {
        Jet { re, du }
    }

    pub fn constant(re: T) -> Self {
        Jet { re, du: T::zero() }
    }

    pub fn variable(re: T) -> Self {
        Jet { re, du: T::one() }
    }

    // f(re) with derivative f'(re)
    fn chain(self, f: T, df: T) -> Self {
        Jet {
            re: f,
            du: df * self.du,
        }
    }
}

impl<T: Scalar> Add for Jet<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Jet {
            re: self.re + o.re,
            du: self.du + o.du,
        }
    }
}

impl<T: Scalar> Sub for Jet<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Jet {
            re: self.re - o.re,
            du: self.du - o.du,
        }
    }
}

impl<T: Scalar> Mul for Jet<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Jet {
            re: self.re * o.re,
            du: self.re * o.du + self.du * o.re,
        }
    }
}

impl<T: Scalar> Div for Jet<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q = self.re / o.re;
        Jet {
            re: q,
            du: (self.du - q * o.du) / o.re,
        }
    }
}

impl<T: Scalar> Neg for Jet<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Jet {
            re: -self.re,
            du: -self.du,
        }
    }
}

impl<T: Scalar> Scalar for Jet<T> {
    const ORDER: usize = T::ORDER + 1;

    fn cst(v: f64) -> Self {
        Jet::constant(T::cst(v))
    }
    fn value(&self) -> f64 {
        self.re.value()
    }
    fn scale(self, k: f64) -> Self {
        Jet {
            re: self.re.scale(k),
            du: self.du.scale(k),
        }
    }
    fn sinh(self) -> Self {
        self.chain(self.re.sinh(), self.re.cosh())
    }
    fn cosh(self) -> Self {
        self.chain(self.re.cosh(), self.re.sinh())
    }
    fn tanh(self) -> Self {
        let t = self.re.tanh();
        self.chain(t, T::one() - t * t)
    }
    fn exp(self) -> Self {
        let e = self.re.exp();
        self.chain(e, e)
    }
    fn ln(self) -> Self {
        self.chain(self.re.ln(), T::one() / self.re)
    }
    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        self.chain(s, T::cst(0.5) / s)
    }
    fn powi(self, k: i32) -> Self {
        if k == 0 {
            return Jet::cst(1.0);
        }
        let d = self.re.powi(k - 1).scale(k as f64);
        self.chain(self.re.powi(k), d)
    }
}

/// The operation set of [`jet_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JetOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    PowInt(i32),
    Sqrt,
    Exp,
    Ln,
    Sinh,
    Cosh,
    Tanh,
}

pub fn checked_div<S: Scalar>(a: S, b: S) -> Result<S, DomainError> {
    if b.value().abs() <= DIV_GUARD || !b.value().is_finite() {
        return Err(DomainError::Division(b.value()));
    }
    Ok(a / b)
}

pub fn checked_ln<S: Scalar>(a: S) -> Result<S, DomainError> {
    if !(a.value() > 0.0) {
        return Err(DomainError::Logarithm(a.value()));
    }
    Ok(a.ln())
}

pub fn checked_sqrt<S: Scalar>(a: S) -> Result<S, DomainError> {
    let v = a.value();
    let ok = if S::ORDER == 0 { v >= 0.0 } else { v > 0.0 };
    if !ok {
        return Err(DomainError::SquareRoot(v));
    }
    Ok(a.sqrt())
}

pub fn checked_powi<S: Scalar>(a: S, k: i32) -> Result<S, DomainError> {
    if k < 0 && a.value().abs() <= DIV_GUARD {
        return Err(DomainError::Division(a.value()));
    }
    Ok(a.powi(k))
}

/// Apply `op` to `args` with the domain guards of the checked helpers.
///
/// Binary operations read `args[0]` and `args[1]`, unary ones `args[0]`.
pub fn jet_arith<S: Scalar>(op: JetOp, args: &[S]) -> Result<S, DomainError> {
    let a = args[0];
    let out = match op {
        JetOp::Add => a + args[1],
        JetOp::Sub => a - args[1],
        JetOp::Mul => a * args[1],
        JetOp::Div => checked_div(a, args[1])?,
        JetOp::Neg => -a,
        JetOp::PowInt(k) => checked_powi(a, k)?,
        JetOp::Sqrt => checked_sqrt(a)?,
        JetOp::Exp => a.exp(),
        JetOp::Ln => checked_ln(a)?,
        JetOp::Sinh => a.sinh(),
        JetOp::Cosh => a.cosh(),
        JetOp::Tanh => a.tanh(),
    };
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("seed direction {index} out of range for a {dim}-dimensional point")]
pub struct SeedError {
    pub index: usize,
    pub dim: usize,
}

/// Lift `point` one jet level, with a unit derivative on coordinate `index`.
///
/// Repeated application nests: `seed(&seed(p, v)?, u)?` carries the mixed
/// second derivative `∂_u ∂_v` in `du.du`.
pub fn seed<S: Scalar>(point: &[S], index: usize) -> Result<Vec<Jet<S>>, SeedError> {
    if index >= point.len() {
        return Err(SeedError {
            index,
            dim: point.len(),
        });
    }
    Ok(seed_unchecked(point, index))
}

pub(crate) fn seed_unchecked<S: Scalar>(point: &[S], index: usize) -> Vec<Jet<S>> {
    point
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            if i == index {
                Jet::variable(x)
            } else {
                Jet::constant(x)
            }
        })
        .collect()
}

/// Lift a point one level with no seeded direction.
pub fn lift<S: Scalar>(point: &[S]) -> Vec<Jet<S>> {
    point.iter().map(|&x| Jet::constant(x)).collect()
}

/// Split a vector of jets into value and derivative parts.
pub fn split<S: Scalar>(v: &[Jet<S>]) -> (Vec<S>, Vec<S>) {
    v.iter().map(|j| (j.re, j.du)).unzip()
}

/// Derivatives `[f, f', f'', f''']` of a univariate function at `x`,
/// obtained by seeding the same direction at three nesting levels.
pub fn derivatives3(f: impl Fn(Jet3) -> Jet3, x: f64) -> [f64; 4] {
    let x1 = Jet::variable(x);
    let x2 = Jet::new(x1, Jet::cst(1.0));
    let x3 = Jet::new(x2, Jet::cst(1.0));
    let y = f(x3);
    [y.re.re.re, y.re.re.du, y.re.du.du, y.du.du.du]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinh_of_double_argument() {
        let x = Jet::variable(0.0);
        let y = (x.scale(2.0)).sinh();
        assert_eq!(y.re, 0.0);
        assert_eq!(y.du, 2.0);
    }

    #[test]
    fn square_to_second_order() {
        let d = derivatives3(|x| x * x, 3.0);
        assert_eq!(d[0], 9.0);
        assert_eq!(d[1], 6.0);
        assert_eq!(d[2], 2.0);
        assert_eq!(d[3], 0.0);
    }

    #[test]
    fn cube_third_derivative() {
        let d = derivatives3(|z| z * z * z, 1.0);
        assert_eq!(d[3], 6.0);
        let d = derivatives3(|z| z.powi(3), 1.0);
        assert_eq!(d[3], 6.0);
    }

    #[test]
    fn cosh_matches_central_difference() {
        let z = 0.3;
        let h = 1e-5;
        let fd = ((2.0 * (z + h)).cosh() - (2.0 * (z - h)).cosh()) / (2.0 * h);
        let j = Jet::variable(z).scale(2.0).cosh();
        assert!(((j.du - fd) / fd).abs() < 1e-8);
    }

    #[test]
    fn seed_sets_unit_direction() {
        let s = seed(&[1.0, 2.0], 0).unwrap();
        assert_eq!(s[0], Jet::new(1.0, 1.0));
        assert_eq!(s[1], Jet::new(2.0, 0.0));
        assert!(seed(&[1.0, 2.0], 2).is_err());
    }

    #[test]
    fn nested_seed_mixed_coefficient() {
        let p = [2.0, 5.0];
        let inner = seed(&p, 1).unwrap();
        let outer = seed(&inner, 0).unwrap();
        let f = outer[0] * outer[1];
        assert_eq!(f.re.re, 10.0);
        assert_eq!(f.du.du, 1.0);
        assert_eq!(f.du.re, 5.0);
        assert_eq!(f.re.du, 2.0);
    }

    #[test]
    fn mixed_partials_commute() {
        let f = |v: &[Jet2]| (v[0] * v[1].sinh() + v[1].powi(3)).exp().scale(0.1);
        let p = [0.4, -0.7];
        let uv = f(&seed(&seed(&p, 1).unwrap(), 0).unwrap()).du.du;
        let vu = f(&seed(&seed(&p, 0).unwrap(), 1).unwrap()).du.du;
        assert!((uv - vu).abs() <= 1e-12 * uv.abs().max(1.0));
    }

    #[test]
    fn domain_guards() {
        assert!(matches!(
            checked_div(1.0, 0.0),
            Err(DomainError::Division(_))
        ));
        assert!(checked_ln(-1.0).is_err());
        assert!(checked_sqrt(0.0f64).is_ok());
        assert!(checked_sqrt(Jet1::cst(0.0)).is_err());
        assert!(checked_powi(0.0, -2).is_err());
        assert_eq!(jet_arith(JetOp::PowInt(0), &[0.0]).unwrap(), 1.0);
    }

    #[test]
    fn order_constants() {
        assert_eq!(f64::ORDER, 0);
        assert_eq!(Jet1::ORDER, 1);
        assert_eq!(Jet3::ORDER, 3);
    }
}
