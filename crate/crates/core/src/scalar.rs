//! Scalar coefficients: exact rationals and quadratic extension fields.
//!
//! Everything downstream (polynomials, mode operators, Gram matrices) is
//! generic over [`Scalar`].  The two instantiations that matter are the
//! big rationals themselves and [`Sqrt`], which adjoins one formal square
//! root to any base scalar.  Nesting `Sqrt<Sqrt<Q>>` gives the biquadratic
//! towers needed by realizations that mix `sqrt(2)` with a k-dependent
//! radical.  `f32`/`f64` satisfy the trait as well, but the verification
//! pipeline never uses them.


use num_traits::{Num, One, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};

use crate::Q;

/// Shorthand for the exact rational `n/d`.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

/// Shorthand for the exact integer rational `n`.
pub fn qi(n: i64) -> Q {
    Q::from_integer(n.into())
}

/// Field-like coefficients for the generic core.
///
/// `NumAssign` pulls in the ring operations plus `Zero`/`One`; `from_q`
/// embeds the rationals, which every instantiation must contain (for the
/// floating types the embedding is lossy, which is fine since they are not
/// used for verification).
pub trait Scalar:
    Clone + PartialEq + fmt::Debug + fmt::Display + num_traits::NumAssign + Neg<Output = Self>
{
    fn from_q(value: &Q) -> Self;

    fn from_int(value: i64) -> Self {
        Self::from_q(&qi(value))
    }
}

impl Scalar for Q {
    fn from_q(value: &Q) -> Self {
        value.clone()
    }
}

impl Scalar for f64 {
    fn from_q(value: &Q) -> Self {
        value.to_f64().expect("rational out of f64 range")
    }
}

impl Scalar for f32 {
    fn from_q(value: &Q) -> Self {
        value.to_f32().expect("rational out of f32 range")
    }
}

/// `a + b*sqrt(d)` over a base scalar field.
///
/// The radicand is carried per value; purely rational values leave it
/// unset so that `zero()`/`one()` exist without knowing `d`.  Mixing two
/// different radicands in one expression is a logic error and panics.
#[derive(Clone, Debug)]
pub struct Sqrt<F: Scalar> {
    a: F,
    b: F,
    d: Option<F>,
}

impl<F: Scalar> Sqrt<F> {
    pub fn new(a: F, b: F, d: F) -> Self {
        Sqrt { a, b, d: Some(d) }.normalized()
    }

    pub fn rational(a: F) -> Self {
        Sqrt { a, b: F::zero(), d: None }
    }

    /// The formal root itself, `sqrt(d)`.
    pub fn root(d: F) -> Self {
        Sqrt { a: F::zero(), b: F::one(), d: Some(d) }
    }

    pub fn rational_part(&self) -> &F {
        &self.a
    }

    pub fn root_part(&self) -> &F {
        &self.b
    }

    pub fn radicand(&self) -> Option<&F> {
        self.d.as_ref()
    }

    /// True if the value lies in the base field.
    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Extracts the base-field value, panicking if a root part remains.
    pub fn expect_rational(&self) -> F {
        assert!(self.is_rational(), "value has a nonzero sqrt part: {self}");
        self.a.clone()
    }

    fn normalized(mut self) -> Self {
        if self.b.is_zero() {
            self.d = None;
        }
        self
    }

    fn join(lhs: &Option<F>, rhs: &Option<F>) -> Option<F> {
        match (lhs, rhs) {
            (Some(x), Some(y)) => {
                assert!(x == y, "mismatched radicands: {x} vs {y}");
                Some(x.clone())
            }
            (Some(x), None) | (None, Some(x)) => Some(x.clone()),
            (None, None) => None,
        }
    }

    /// Conjugate `a - b*sqrt(d)`.
    pub fn conj(&self) -> Self {
        Sqrt { a: self.a.clone(), b: -self.b.clone(), d: self.d.clone() }.normalized()
    }

    /// Field norm `a^2 - b^2 d`.
    pub fn norm(&self) -> F {
        match &self.d {
            Some(d) => self.a.clone() * self.a.clone() - self.b.clone() * self.b.clone() * d.clone(),
            None => self.a.clone() * self.a.clone(),
        }
    }
}

impl<F: Scalar> PartialEq for Sqrt<F> {
    fn eq(&self, other: &Self) -> bool {
        if self.a != other.a {
            return false;
        }
        if self.b.is_zero() && other.b.is_zero() {
            return true;
        }
        Sqrt::join(&self.d, &other.d);
        self.b == other.b
    }
}

impl<F: Scalar> fmt::Display for Sqrt<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let d = self.d.as_ref().unwrap();
        if self.a.is_zero() {
            write!(f, "{}*sqrt({})", self.b, d)
        } else {
            write!(f, "{} + {}*sqrt({})", self.a, self.b, d)
        }
    }
}

impl<F: Scalar> Add for Sqrt<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let d = Sqrt::join(&self.d, &rhs.d);
        Sqrt { a: self.a + rhs.a, b: self.b + rhs.b, d }.normalized()
    }
}

impl<F: Scalar> Sub for Sqrt<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<F: Scalar> Neg for Sqrt<F> {
    type Output = Self;
    fn neg(self) -> Self {
        Sqrt { a: -self.a, b: -self.b, d: self.d }
    }
}

impl<F: Scalar> Mul for Sqrt<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let cross = self.a.clone() * rhs.b.clone() + self.b.clone() * rhs.a.clone();
        let mut plain = self.a * rhs.a;
        let bb = self.b * rhs.b;
        let d = if bb.is_zero() && cross.is_zero() {
            None
        } else {
            Sqrt::join(&self.d, &rhs.d)
        };
        if !bb.is_zero() {
            let dv = d.clone().expect("product of root parts needs a radicand");
            plain = plain + bb * dv;
        }
        Sqrt { a: plain, b: cross, d }.normalized()
    }
}

impl<F: Scalar> Div for Sqrt<F> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let n = rhs.norm();
        assert!(!n.is_zero(), "division by zero or by a zero divisor in Sqrt");
        let conj = rhs.conj();
        let num = self * conj;
        Sqrt { a: num.a / n.clone(), b: num.b / n, d: num.d }.normalized()
    }
}

impl<F: Scalar> Rem for Sqrt<F> {
    type Output = Self;
    fn rem(self, rhs: Self) -> Self {
        assert!(!rhs.is_zero(), "remainder by zero");
        Self::zero()
    }
}

impl<F: Scalar> AddAssign for Sqrt<F> {
    fn add_assign(&mut self, rhs: Self) {
        *self = self.clone() + rhs;
    }
}
impl<F: Scalar> SubAssign for Sqrt<F> {
    fn sub_assign(&mut self, rhs: Self) {
        *self = self.clone() - rhs;
    }
}
impl<F: Scalar> MulAssign for Sqrt<F> {
    fn mul_assign(&mut self, rhs: Self) {
        *self = self.clone() * rhs;
    }
}
impl<F: Scalar> DivAssign for Sqrt<F> {
    fn div_assign(&mut self, rhs: Self) {
        *self = self.clone() / rhs;
    }
}
impl<F: Scalar> RemAssign for Sqrt<F> {
    fn rem_assign(&mut self, rhs: Self) {
        *self = self.clone() % rhs;
    }
}

impl<F: Scalar> Zero for Sqrt<F> {
    fn zero() -> Self {
        Sqrt::rational(F::zero())
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl<F: Scalar> One for Sqrt<F> {
    fn one() -> Self {
        Sqrt::rational(F::one())
    }
}

impl<F: Scalar> Num for Sqrt<F> {
    type FromStrRadixErr = F::FromStrRadixErr;
    fn from_str_radix(str: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        F::from_str_radix(str, radix).map(Sqrt::rational)
    }
}

impl<F: Scalar> Scalar for Sqrt<F> {
    fn from_q(value: &Q) -> Self {
        Sqrt::rational(F::from_q(value))
    }
}

/// Exact Gaussian elimination solve of `A x = b` over any scalar field.
///
/// Returns `None` when `A` is singular.
pub fn solve_linear<S: Scalar>(a: &[Vec<S>], b: &[S]) -> Option<Vec<S>> {
    let n = a.len();
    assert!(a.iter().all(|row| row.len() == n) && b.len() == n);
    let mut m: Vec<Vec<S>> = a.to_vec();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = S::one() / m[col][col].clone();
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone() * inv.clone();
            for c in col..n {
                let sub = factor.clone() * m[col][c].clone();
                m[r][c] = m[r][c].clone() - sub;
            }
            let sub = factor * rhs[col].clone();
            rhs[r] = rhs[r].clone() - sub;
        }
    }
    let mut x = vec![S::zero(); n];
    for col in 0..n {
        x[col] = rhs[col].clone() / m[col][col].clone();
    }
    Some(x)
}

/// `binom(s, 2) = s(s-1)/2` for a rational argument.
pub fn binom2(s: &Q) -> Q {
    s * (s - Q::one()) / qi(2)
}
