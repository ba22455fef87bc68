//! Polynomial arithmetic: univariate polynomials and rational functions in
//! the level `k`, and sparse multivariate polynomials in `h`, `j`, `j'`
//! over a generic coefficient scalar.
//!
//! Determinant factors live in `MPoly<RatFn>` (coefficients are exact
//! rational functions of `k`); Gram-matrix entries live in `MPoly<Q>` with
//! `k` fixed.  Determinants of polynomial matrices use fraction-free
//! Bareiss elimination, whose interior divisions are exact.

use num_traits::{Num, One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};

use crate::scalar::{qi, Scalar};
use crate::Q;

/// Dense univariate polynomial in `k` over the rationals.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyK {
    coeffs: Vec<Q>, // coeffs[i] multiplies k^i; no trailing zeros
}

impl PolyK {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        PolyK { coeffs }
    }

    pub fn from_q(c: Q) -> Self {
        PolyK::new(vec![c])
    }

    pub fn var() -> Self {
        PolyK::new(vec![Q::zero(), Q::one()])
    }

    /// `c0 + c1*k` with integer shorthand.
    pub fn linear(c0: Q, c1: Q) -> Self {
        PolyK::new(vec![c0, c1])
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn leading(&self) -> Option<&Q> {
        self.coeffs.last()
    }

    pub fn eval(&self, k: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * k + c;
        }
        acc
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some(l) => {
                let l = l.clone();
                PolyK::new(self.coeffs.iter().map(|c| c / &l).collect())
            }
        }
    }

    /// Exact division with remainder over the rationals.
    pub fn divrem(&self, d: &PolyK) -> (PolyK, PolyK) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.degree().unwrap();
        let dl = d.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let mut quo = vec![Q::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() >= dd + 1 {
            let l = rem.last().unwrap().clone();
            if l.is_zero() {
                rem.pop();
                continue;
            }
            let shift = rem.len() - 1 - dd;
            let f = l / &dl;
            for i in 0..=dd {
                let sub = &f * &d.coeffs[i];
                rem[shift + i] -= sub;
            }
            quo[shift] = f;
            while rem.last().map_or(false, |c| c.is_zero()) {
                rem.pop();
            }
        }
        (PolyK::new(quo), PolyK::new(rem))
    }

    pub fn gcd(&self, other: &PolyK) -> PolyK {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn pow(&self, e: u32) -> PolyK {
        let mut acc = PolyK::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }
}

impl fmt::Display for PolyK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*k")?,
                _ => write!(f, "{c}*k^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for PolyK {
    type Output = PolyK;
    fn add(self, rhs: PolyK) -> PolyK {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![Q::zero(); n];
        for (i, c) in self.coeffs.into_iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in rhs.coeffs.into_iter().enumerate() {
            out[i] += c;
        }
        PolyK::new(out)
    }
}

impl Sub for PolyK {
    type Output = PolyK;
    fn sub(self, rhs: PolyK) -> PolyK {
        self + (-rhs)
    }
}

impl Neg for PolyK {
    type Output = PolyK;
    fn neg(self) -> PolyK {
        PolyK::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl Mul for PolyK {
    type Output = PolyK;
    fn mul(self, rhs: PolyK) -> PolyK {
        if self.is_zero() || rhs.is_zero() {
            return PolyK::zero();
        }
        let mut out = vec![Q::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        PolyK::new(out)
    }
}

impl Zero for PolyK {
    fn zero() -> Self {
        PolyK { coeffs: vec![] }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for PolyK {
    fn one() -> Self {
        PolyK::from_q(Q::one())
    }
}

/// Rational function of `k`: reduced quotient of two `PolyK`, monic
/// denominator.
#[derive(Clone, PartialEq, Debug)]
pub struct RatFn {
    num: PolyK,
    den: PolyK,
}

impl RatFn {
    pub fn new(num: PolyK, den: PolyK) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFn { num: PolyK::zero(), den: PolyK::one() };
        }
        let g = num.gcd(&den);
        let (num, r1) = num.divrem(&g);
        debug_assert!(r1.is_zero());
        let (den, r2) = den.divrem(&g);
        debug_assert!(r2.is_zero());
        let lead = den.leading().unwrap().clone();
        let num = PolyK::new(num.coeffs.iter().map(|c| c / &lead).collect());
        let den = den.monic();
        RatFn { num, den }
    }

    pub fn from_poly(p: PolyK) -> Self {
        RatFn { num: p, den: PolyK::one() }
    }

    pub fn from_q(c: Q) -> Self {
        RatFn::from_poly(PolyK::from_q(c))
    }

    pub fn k() -> Self {
        RatFn::from_poly(PolyK::var())
    }

    pub fn num(&self) -> &PolyK {
        &self.num
    }

    pub fn den(&self) -> &PolyK {
        &self.den
    }

    pub fn is_constant(&self) -> bool {
        self.den == PolyK::one() && self.num.degree().map_or(true, |d| d == 0)
    }

    pub fn has_pole_at(&self, k: &Q) -> bool {
        self.den.eval(k).is_zero()
    }

    pub fn eval(&self, k: &Q) -> Option<Q> {
        let d = self.den.eval(k);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(k) / d)
        }
    }

    pub fn recip(&self) -> RatFn {
        assert!(!self.is_zero(), "reciprocal of zero");
        RatFn::new(self.den.clone(), self.num.clone())
    }

    pub fn mul_q(&self, c: Q) -> RatFn {
        self.clone() * RatFn::from_q(c)
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == PolyK::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl Add for RatFn {
    type Output = RatFn;
    fn add(self, rhs: RatFn) -> RatFn {
        RatFn::new(
            self.num.clone() * rhs.den.clone() + rhs.num.clone() * self.den.clone(),
            self.den * rhs.den,
        )
    }
}
impl Sub for RatFn {
    type Output = RatFn;
    fn sub(self, rhs: RatFn) -> RatFn {
        self + (-rhs)
    }
}
impl Neg for RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        RatFn { num: -self.num, den: self.den }
    }
}
impl Mul for RatFn {
    type Output = RatFn;
    fn mul(self, rhs: RatFn) -> RatFn {
        RatFn::new(self.num * rhs.num, self.den * rhs.den)
    }
}
impl Div for RatFn {
    type Output = RatFn;
    fn div(self, rhs: RatFn) -> RatFn {
        assert!(!rhs.is_zero(), "division by zero rational function");
        RatFn::new(self.num * rhs.den, self.den * rhs.num)
    }
}
impl Rem for RatFn {
    type Output = RatFn;
    fn rem(self, rhs: RatFn) -> RatFn {
        assert!(!rhs.is_zero());
        RatFn::from_q(Q::zero())
    }
}

impl AddAssign for RatFn {
    fn add_assign(&mut self, rhs: Self) {
        *self = self.clone() + rhs;
    }
}
impl SubAssign for RatFn {
    fn sub_assign(&mut self, rhs: Self) {
        *self = self.clone() - rhs;
    }
}
impl MulAssign for RatFn {
    fn mul_assign(&mut self, rhs: Self) {
        *self = self.clone() * rhs;
    }
}
impl DivAssign for RatFn {
    fn div_assign(&mut self, rhs: Self) {
        *self = self.clone() / rhs;
    }
}
impl RemAssign for RatFn {
    fn rem_assign(&mut self, rhs: Self) {
        *self = self.clone() % rhs;
    }
}

impl Zero for RatFn {
    fn zero() -> Self {
        RatFn::from_q(Q::zero())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}
impl One for RatFn {
    fn one() -> Self {
        RatFn::from_q(Q::one())
    }
}
impl Num for RatFn {
    type FromStrRadixErr = <Q as Num>::FromStrRadixErr;
    fn from_str_radix(str: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        Q::from_str_radix(str, radix).map(RatFn::from_q)
    }
}
impl Scalar for RatFn {
    fn from_q(value: &Q) -> Self {
        RatFn::from_q(value.clone())
    }
}

/// Variables of the multivariate layer, in lex-priority order.
pub const MVARS: [&str; 3] = ["h", "j", "j'"];
pub const VH: usize = 0;
pub const VJ: usize = 1;
pub const VJP: usize = 2;

/// Monomial exponents `(h, j, j')`; array order gives lex order with
/// `h > j > j'`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Mono(pub [u16; 3]);

impl Mono {
    pub fn unit() -> Self {
        Mono([0, 0, 0])
    }
    pub fn var(v: usize) -> Self {
        let mut m = [0, 0, 0];
        m[v] = 1;
        Mono(m)
    }
    pub fn mul(&self, other: &Mono) -> Mono {
        Mono([self.0[0] + other.0[0], self.0[1] + other.0[1], self.0[2] + other.0[2]])
    }
    pub fn divides(&self, other: &Mono) -> bool {
        (0..3).all(|i| self.0[i] <= other.0[i])
    }
    pub fn div(&self, other: &Mono) -> Mono {
        Mono([self.0[0] - other.0[0], self.0[1] - other.0[1], self.0[2] - other.0[2]])
    }
}

/// Sparse multivariate polynomial in `h, j, j'` over a scalar field.
#[derive(Clone, PartialEq, Debug)]
pub struct MPoly<C: Scalar> {
    terms: BTreeMap<Mono, C>,
}

impl<C: Scalar> MPoly<C> {
    pub fn zero() -> Self {
        MPoly { terms: BTreeMap::new() }
    }

    pub fn constant(c: C) -> Self {
        let mut p = MPoly::zero();
        p.add_term(Mono::unit(), c);
        p
    }

    pub fn one() -> Self {
        MPoly::constant(C::one())
    }

    pub fn var(v: usize) -> Self {
        let mut p = MPoly::zero();
        p.add_term(Mono::var(v), C::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Mono, c: C) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(C::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Leading term under lex order `h > j > j'`.
    pub fn leading(&self) -> Option<(&Mono, &C)> {
        self.terms.iter().next_back()
    }

    pub fn coeff(&self, m: &Mono) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn degree_in(&self, v: usize) -> u16 {
        self.terms.keys().map(|m| m.0[v]).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return MPoly::zero();
        }
        let mut out = MPoly::zero();
        for (m, a) in &self.terms {
            out.add_term(*m, a.clone() * c.clone());
        }
        out
    }

    /// Divides by the lex-leading coefficient; reports the coefficient.
    pub fn monic(&self) -> (Self, C) {
        match self.leading() {
            None => (self.clone(), C::one()),
            Some((_, l)) => {
                let l = l.clone();
                let inv = C::one() / l.clone();
                (self.scale(&inv), l)
            }
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = MPoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = MPoly::zero();
        for (m, c) in &self.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = MPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1.clone() * c2.clone());
            }
        }
        out
    }

    /// Exact division; `None` if `other` does not divide `self`.
    pub fn exact_div(&self, other: &Self) -> Option<Self> {
        let (lm, lc) = other.leading()?;
        let (lm, lc) = (*lm, lc.clone());
        let mut rem = self.clone();
        let mut quo = MPoly::zero();
        while let Some((rm, rc)) = rem.leading() {
            if !lm.divides(rm) {
                return None;
            }
            let qm = rm.div(&lm);
            let qc = rc.clone() / lc.clone();
            let mut t = MPoly::zero();
            t.add_term(qm, qc);
            rem = rem.sub(&t.mul(other));
            quo = quo.add(&t);
        }
        Some(quo)
    }

    /// Substitutes scalars for all variables.
    pub fn eval(&self, vals: &[C; 3]) -> C {
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for v in 0..3 {
                for _ in 0..m.0[v] {
                    t *= vals[v].clone();
                }
            }
            acc += t;
        }
        acc
    }

    /// Maps coefficients into another scalar, dropping zeros.
    pub fn map_coeffs<D: Scalar>(&self, f: impl Fn(&C) -> D) -> MPoly<D> {
        let mut out = MPoly::zero();
        for (m, c) in &self.terms {
            out.add_term(*m, f(c));
        }
        out
    }
}

impl<C: Scalar> fmt::Display for MPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut head = format!("({c})");
            for v in 0..3 {
                match m.0[v] {
                    0 => {}
                    1 => head.push_str(&format!("*{}", MVARS[v])),
                    e => head.push_str(&format!("*{}^{}", MVARS[v], e)),
                }
            }
            write!(f, "{head}")?;
        }
        Ok(())
    }
}

/// Fraction-free Bareiss determinant of a square polynomial matrix.
///
/// All interior divisions are exact in `MPoly<C>`.
pub fn det_bareiss<C: Scalar>(mat: &[Vec<MPoly<C>>]) -> MPoly<C> {
    let n = mat.len();
    if n == 0 {
        return MPoly::one();
    }
    assert!(mat.iter().all(|row| row.len() == n));
    let mut a: Vec<Vec<MPoly<C>>> = mat.to_vec();
    let mut prev = MPoly::<C>::one();
    let mut sign_flip = false;
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign_flip = !sign_flip;
                }
                None => return MPoly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = a[i][j].mul(&a[k][k]).sub(&a[i][k].mul(&a[k][j]));
                a[i][j] = t
                    .exact_div(&prev)
                    .expect("Bareiss interior division must be exact");
            }
            a[i][k] = MPoly::zero();
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if sign_flip {
        det.neg()
    } else {
        det
    }
}

/// `k + c` as a rational function, for constants like `k + h_vee`.
pub fn k_plus(c: Q) -> RatFn {
    RatFn::from_poly(PolyK::linear(c, Q::one()))
}

/// Convenience: integer-coefficient `PolyK` from i64 values.
pub fn polyk(coeffs: &[i64]) -> PolyK {
    PolyK::new(coeffs.iter().map(|&c| qi(c)).collect())
}
