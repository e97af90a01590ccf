//! Sparse multivariate polynomials over the rationals in jet variables
//! `x_i^(j)`.
//!
//! A [`Poly`] only carries the variables it mentions, so the chain of
//! inclusions `A ⊂ A_1 ⊂ A_2 ⊂ …` costs nothing: membership in a particular
//! ring is a structural check done by [`crate::jetring::JetRing`].
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], whose ordering is
//! graded lexicographic over the `(base, order)` variable order. Printing
//! walks the map from the largest monomial down.

mod parse;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub use parse::{parse, parse_monomial, parse_with, VarStyle};

/// Exact rational coefficient.
pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// The jet variable `x_base^(order)`. Base-ring variables are the ones with
/// `order == 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JetVar {
    pub base: u32,
    pub order: u32,
}

impl JetVar {
    pub fn new(base: u32, order: u32) -> Self {
        assert!(base >= 1, "jet variable base index starts at 1");
        JetVar { base, order }
    }

    /// The base-ring variable `x_base = x_base^(0)`.
    pub fn base_var(base: u32) -> Self {
        JetVar::new(base, 0)
    }

    pub fn with_order(self, order: u32) -> Self {
        JetVar { order, ..self }
    }
}

impl fmt::Display for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}^({})", self.base, self.order)
    }
}

/// A monomial as a sorted exponent list with no zero exponents.
///
/// Also used as a plain exponent map (multi-index) over jet variables, e.g.
/// for the `α` of `∂^α`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    exps: Vec<(JetVar, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { exps: Vec::new() }
    }

    pub fn var(v: JetVar) -> Self {
        Monomial { exps: vec![(v, 1)] }
    }

    pub fn var_pow(v: JetVar, e: u32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial { exps: vec![(v, e)] }
        }
    }

    /// Builds a monomial from arbitrary `(variable, exponent)` pairs;
    /// repeated variables are merged and zero exponents dropped.
    pub fn from_pairs<I: IntoIterator<Item = (JetVar, u32)>>(pairs: I) -> Self {
        let mut map: BTreeMap<JetVar, u32> = BTreeMap::new();
        for (v, e) in pairs {
            *map.entry(v).or_insert(0) += e;
        }
        Monomial {
            exps: map.into_iter().filter(|&(_, e)| e > 0).collect(),
        }
    }

    /// Product of the given variables, with repetition.
    pub fn from_vars<I: IntoIterator<Item = JetVar>>(vars: I) -> Self {
        Monomial::from_pairs(vars.into_iter().map(|v| (v, 1)))
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, v: JetVar) -> u32 {
        match self.exps.binary_search_by(|(w, _)| w.cmp(&v)) {
            Ok(idx) => self.exps[idx].1,
            Err(_) => 0,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (JetVar, u32)> + '_ {
        self.exps.iter().copied()
    }

    pub fn vars(&self) -> impl Iterator<Item = JetVar> + '_ {
        self.exps.iter().map(|&(v, _)| v)
    }

    /// Canonical factor list: every variable repeated by its exponent, in
    /// variable order.
    pub fn factors(&self) -> Vec<JetVar> {
        let mut out = Vec::with_capacity(self.degree() as usize);
        for &(v, e) in &self.exps {
            for _ in 0..e {
                out.push(v);
            }
        }
        out
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.exps.len() + other.exps.len());
        let (mut i, mut j) = (0, 0);
        while i < self.exps.len() && j < other.exps.len() {
            let (a, ea) = self.exps[i];
            let (b, eb) = other.exps[j];
            match a.cmp(&b) {
                Ordering::Less => {
                    out.push((a, ea));
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((b, eb));
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a, ea + eb));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.exps[i..]);
        out.extend_from_slice(&other.exps[j..]);
        Monomial { exps: out }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().all(|&(v, e)| other.exponent(v) >= e)
    }

    /// `self / other`, or `None` when `other` does not divide `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if !other.divides(self) {
            return None;
        }
        let exps = self
            .exps
            .iter()
            .filter_map(|&(v, e)| {
                let rest = e - other.exponent(v);
                (rest > 0).then_some((v, rest))
            })
            .collect();
        Some(Monomial { exps })
    }

    /// Applies `f` to every variable, merging collisions.
    pub fn map_vars(&self, mut f: impl FnMut(JetVar) -> JetVar) -> Monomial {
        Monomial::from_pairs(self.exps.iter().map(|&(v, e)| (f(v), e)))
    }

    /// Multi-index factorial `α! = ∏ α_v!`.
    pub fn factorial(&self) -> BigInt {
        self.exps
            .iter()
            .fold(BigInt::one(), |acc, &(_, e)| acc * factorial(e))
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: higher total degree is larger; ties go to the
    /// monomial with the larger exponent at the first variable (in
    /// `(base, order)` order) where the two differ.
    fn cmp(&self, other: &Self) -> Ordering {
        let by_degree = self.degree().cmp(&other.degree());
        if by_degree != Ordering::Equal {
            return by_degree;
        }
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.exps.get(i), other.exps.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(a, ea)), Some(&(b, eb))) => match a.cmp(&b) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(&eb);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return write!(f, "1");
        }
        for (idx, &(v, e)) in self.exps.iter().enumerate() {
            if idx > 0 {
                write!(f, "*")?;
            }
            write!(f, "{v}")?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

pub fn factorial(n: u32) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn falling_factorial(n: u32, k: u32) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i))
}

/// Sparse polynomial with exact rational coefficients. Zero coefficients are
/// never stored, so structural equality is polynomial equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::term(c, Monomial::one())
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn monomial(m: Monomial) -> Self {
        Poly::term(Rational::one(), m)
    }

    pub fn var(v: JetVar) -> Self {
        Poly::monomial(Monomial::var(v))
    }

    /// Collects `(coefficient, monomial)` pairs, summing duplicates.
    pub fn from_terms<I: IntoIterator<Item = (Rational, Monomial)>>(terms: I) -> Self {
        let mut p = Poly::zero();
        for (c, m) in terms {
            p.add_term(c, m);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// The constant coefficient, if the polynomial is a constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Sorted, deduplicated list of the variables that occur.
    pub fn variables(&self) -> Vec<JetVar> {
        let mut vars: Vec<JetVar> = self.terms.keys().flat_map(|m| m.vars()).collect();
        vars.sort();
        vars.dedup();
        vars
    }

    pub fn add_term(&mut self, c: Rational, m: Monomial) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: &Rational, other: &Poly) {
        if c.is_zero() {
            return;
        }
        for (m, a) in &other.terms {
            self.add_term(c * a, m.clone());
        }
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        if m.is_one() {
            return self.clone();
        }
        Poly {
            terms: self.terms.iter().map(|(k, a)| (k.mul(m), a.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Iterated partial derivative `∂^α f`. Partials commute, so the order
    /// of differentiation is irrelevant.
    pub fn partial(&self, alpha: &Monomial) -> Poly {
        self.partial_with(alpha, falling_factorial)
    }

    /// Divided partial `(1/α!) ∂^α f`, the Taylor coefficient operator.
    pub fn divided_partial(&self, alpha: &Monomial) -> Poly {
        self.partial_with(alpha, binomial)
    }

    fn partial_with(&self, alpha: &Monomial, weight: fn(u32, u32) -> BigInt) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let Some(rest) = m.div(alpha) else { continue };
            let w = alpha
                .iter()
                .fold(BigInt::one(), |acc, (v, a)| acc * weight(m.exponent(v), a));
            out.add_term(c * Rational::from_integer(w), rest);
        }
        out
    }

    /// Renames variables term by term.
    pub fn map_vars(&self, mut f: impl FnMut(JetVar) -> JetVar) -> Poly {
        Poly::from_terms(
            self.terms
                .iter()
                .map(|(m, c)| (c.clone(), m.map_vars(&mut f))),
        )
    }
}

impl From<Monomial> for Poly {
    fn from(m: Monomial) -> Self {
        Poly::monomial(m)
    }
}

impl From<JetVar> for Poly {
    fn from(v: JetVar) -> Self {
        Poly::var(v)
    }
}

impl From<Rational> for Poly {
    fn from(c: Rational) -> Self {
        Poly::constant(c)
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(c.clone(), m.clone());
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(-c, m.clone());
        }
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        self += &rhs;
        self
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(mut self, rhs: Poly) -> Poly {
        self -= &rhs;
        self
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ca * cb, ma.mul(mb));
            }
        }
        out
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, c: &Rational) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Poly {
    /// Canonical text: terms from the largest monomial down, unit
    /// coefficients suppressed, `0` for the zero polynomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            match (idx, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let abs = c.abs();
            if m.is_one() {
                write_rational(f, &abs)?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write_rational(f, &abs)?;
                write!(f, "*{m}")?;
            }
        }
        Ok(())
    }
}

/// All monomials of total degree `min_degree..=max_degree` in the given
/// variables, in ascending graded-lex order.
pub fn monomials_in(vars: &[JetVar], min_degree: u32, max_degree: u32) -> Vec<Monomial> {
    let mut vars = vars.to_vec();
    vars.sort();
    vars.dedup();
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(
        vars: &[JetVar],
        remaining: u32,
        current: &mut Vec<(JetVar, u32)>,
        out: &mut Vec<Monomial>,
    ) {
        let Some((&v, rest)) = vars.split_first() else {
            out.push(Monomial::from_pairs(current.iter().copied()));
            return;
        };
        for e in 0..=remaining {
            if e > 0 {
                current.push((v, e));
            }
            rec(rest, remaining - e, current, out);
            if e > 0 {
                current.pop();
            }
        }
    }
    rec(&vars, max_degree, &mut current, &mut out);
    out.retain(|m| m.degree() >= min_degree);
    out.sort();
    out
}

/// The jet variables `x_i^(j)`, `1 ≤ i ≤ s`, `0 ≤ j ≤ n`, in variable order.
pub fn jet_vars(s: u32, n: u32) -> Vec<JetVar> {
    (1..=s)
        .flat_map(|i| (0..=n).map(move |j| JetVar::new(i, j)))
        .collect()
}

/// Monomials of degree `1..=m` in the `s(n+1)` jet variables of `A_n`.
pub fn monomials_up_to(s: u32, n: u32, m: u32) -> Vec<Monomial> {
    monomials_in(&jet_vars(s, n), 1, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: u32) -> Poly {
        Poly::var(JetVar::base_var(i))
    }

    fn xj(i: u32, j: u32) -> Poly {
        Poly::var(JetVar::new(i, j))
    }

    fn mono(pairs: &[(u32, u32, u32)]) -> Monomial {
        Monomial::from_pairs(pairs.iter().map(|&(i, j, e)| (JetVar::new(i, j), e)))
    }

    #[test]
    fn additive_inverse() {
        assert!((&x(1) + &(-x(1))).is_zero());
    }

    #[test]
    fn difference_of_squares() {
        let lhs = &(&x(1) + &x(2)) * &(&x(1) - &x(2));
        let rhs = &(&x(1) * &x(1)) - &(&x(2) * &x(2));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn scale_by_half() {
        let two_x = xj(1, 1).scale(&int(2));
        assert_eq!(two_x.scale(&rat(1, 2)), xj(1, 1));
    }

    #[test]
    fn second_derivative_of_square() {
        let f = x(1).pow(2);
        assert_eq!(f.partial(&mono(&[(1, 0, 2)])), Poly::constant(int(2)));
    }

    #[test]
    fn mixed_partial_of_product() {
        // variables x_0, x_2 of the univariate jet ring: x1^(0), x1^(2)
        let f = &xj(1, 0) * &xj(1, 2);
        assert_eq!(f.partial(&mono(&[(1, 0, 1), (1, 2, 1)])), Poly::one());
    }

    #[test]
    fn partial_keeps_constant_factor() {
        let f = &xj(1, 1) * &xj(2, 0);
        assert_eq!(f.partial(&mono(&[(1, 1, 1)])), xj(2, 0));
    }

    #[test]
    fn divided_partials() {
        let f = x(1).pow(3);
        assert_eq!(f.divided_partial(&mono(&[(1, 0, 2)])), x(1).scale(&int(3)));

        let beta = mono(&[(1, 0, 2), (2, 0, 3), (1, 2, 1)]);
        assert_eq!(Poly::monomial(beta.clone()).divided_partial(&beta), Poly::one());

        // x1^2 x2 -> (1/(1!1!)) d/dx1 d/dx2 = 2 x1
        let g = &x(1).pow(2) * &x(2);
        assert_eq!(
            g.divided_partial(&mono(&[(1, 0, 1), (2, 0, 1)])),
            x(1).scale(&int(2))
        );
    }

    #[test]
    fn divided_partial_outside_support_vanishes() {
        let f = x(1).pow(2);
        assert!(f.divided_partial(&mono(&[(1, 0, 3)])).is_zero());
        assert!(f.divided_partial(&mono(&[(2, 0, 1)])).is_zero());
    }

    #[test]
    fn graded_lex_print_order() {
        let f = &(&xj(1, 1) * &xj(2, 0)) + &(&xj(1, 0) * &xj(2, 1));
        assert_eq!(f.to_string(), "x1^(0)*x2^(1) + x1^(1)*x2^(0)");
        let g = &x(1).pow(2) - &x(1);
        assert_eq!(g.to_string(), "x1^(0)^2 - x1^(0)");
        let h = &Poly::constant(rat(-3, 2)) - &x(2);
        assert_eq!(h.to_string(), "-x2^(0) - 3/2");
        assert_eq!(Poly::zero().to_string(), "0");
    }

    #[test]
    fn univariate_monomials() {
        let ms = monomials_up_to(1, 0, 2);
        assert_eq!(ms, vec![mono(&[(1, 0, 1)]), mono(&[(1, 0, 2)])]);
    }

    #[test]
    fn monomial_count_two_vars_first_jets() {
        let ms = monomials_up_to(2, 1, 2);
        assert_eq!(ms.len(), 14);
        assert_eq!(ms.iter().filter(|m| m.degree() == 1).count(), 4);
        assert_eq!(ms.iter().filter(|m| m.degree() == 2).count(), 10);
        let mut dedup = ms.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), ms.len());
    }

    #[test]
    fn monomial_division() {
        let a = mono(&[(1, 0, 2), (2, 1, 1)]);
        let b = mono(&[(1, 0, 1)]);
        assert_eq!(a.div(&b), Some(mono(&[(1, 0, 1), (2, 1, 1)])));
        assert_eq!(b.div(&a), None);
        assert_eq!(a.div(&a), Some(Monomial::one()));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(2, 5), BigInt::zero());
        assert_eq!(factorial(5), BigInt::from(120));
    }
}
