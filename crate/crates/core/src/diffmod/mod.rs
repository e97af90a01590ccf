//! Finite presentations of the modules of order-`m` Kähler differentials.
//!
//! `Ω^(m)` of a polynomial ring (or a quotient `K[x]/I`) is presented as the
//! free module on the symbols `(dx)^α`, `1 ≤ |α| ≤ m`, modulo the rows
//! `(dx)^β · d^m(f)` for `f ∈ I`, `|β| ≤ m-1`. Symbol products are truncated
//! at degree `m`. Coefficients are plain polynomials; the quotient on the
//! coefficient side is represented by extra rows `g · (dx)^α`, `g ∈ I`.
//!
//! The tensor product `Ω^(m)_A ⊗ P_n` is presented on `(dx)^α ⊗ t^{-k}`,
//! `0 ≤ k ≤ n`, with `a ∈ A` acting as `γ_n^#(a)` and `t^i · t^{-k} = 0`
//! once the exponent becomes positive.

pub mod linsolve;
pub mod tensor_example;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::jetring::{JetRing, Jets};
use crate::mderiv::{Derivation, DerivationTarget};
use crate::ratpoly::{binomial, monomials_in, parse, parse_monomial, JetVar, Monomial, Poly, Rational, VarStyle};

/// A generator of the tensor presentation: `(dx)^symbol ⊗ t^{-t_neg}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TensorGen {
    pub symbol: Monomial,
    pub t_neg: u32,
}

impl TensorGen {
    pub fn new(symbol: Monomial, t_neg: u32) -> Self {
        TensorGen { symbol, t_neg }
    }
}

/// Element of a free module: generator → polynomial coefficient, zero
/// coefficients never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeElement<K: Ord> {
    coeffs: BTreeMap<K, Poly>,
}

impl<K: Ord> Default for FreeElement<K> {
    fn default() -> Self {
        FreeElement {
            coeffs: BTreeMap::new(),
        }
    }
}

/// Element of the free module on symbols `(dx)^α`.
pub type DiffElement = FreeElement<Monomial>;

/// Element of the free module on `(dx)^α ⊗ t^{-k}`.
pub type TensorElement = FreeElement<TensorGen>;

impl<K: Ord + Clone> FreeElement<K> {
    pub fn zero() -> Self {
        FreeElement::default()
    }

    pub fn generator(key: K) -> Self {
        FreeElement::term(key, Poly::one())
    }

    pub fn term(key: K, coeff: Poly) -> Self {
        let mut e = FreeElement::zero();
        e.add_term(key, &coeff);
        e
    }

    pub fn from_terms<I: IntoIterator<Item = (K, Poly)>>(terms: I) -> Self {
        let mut e = FreeElement::zero();
        for (k, c) in terms {
            e.add_term(k, &c);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, key: &K) -> Poly {
        self.coeffs.get(key).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&K, &Poly)> {
        self.coeffs.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.coeffs.keys()
    }

    pub fn add_term(&mut self, key: K, coeff: &Poly) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(key.clone()).or_default();
        *slot += coeff;
        if slot.is_zero() {
            self.coeffs.remove(&key);
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: &Rational, other: &FreeElement<K>) {
        for (k, p) in &other.coeffs {
            self.add_term(k.clone(), &p.scale(c));
        }
    }

    /// `self += p * other`.
    pub fn add_mul(&mut self, p: &Poly, other: &FreeElement<K>) {
        for (k, q) in &other.coeffs {
            self.add_term(k.clone(), &(p * q));
        }
    }

    pub fn mul_poly(&self, p: &Poly) -> Self {
        let mut out = FreeElement::zero();
        out.add_mul(p, self);
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(&Rational::one(), other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(&-Rational::one(), other);
        out
    }

    /// Sorted, deduplicated variables of all coefficients.
    pub fn variables(&self) -> Vec<JetVar> {
        let mut vars: Vec<JetVar> = self.coeffs.values().flat_map(Poly::variables).collect();
        vars.sort();
        vars.dedup();
        vars
    }
}

/// `(dx)^α` written as `d(x1^(0))*d(x2^(0))^2`.
pub struct Symbol<'a>(pub &'a Monomial);

impl fmt::Display for Symbol<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_one() {
            return write!(f, "1");
        }
        for (idx, (v, e)) in self.0.iter().enumerate() {
            if idx > 0 {
                write!(f, "*")?;
            }
            write!(f, "d({v})")?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for TensorGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", Symbol(&self.symbol))?;
        if self.t_neg > 0 {
            write!(f, " t^-{}", self.t_neg)?;
        }
        Ok(())
    }
}

impl fmt::Display for DiffElement {
    /// One `gen <symbol> : <poly>` line per nonzero coefficient.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, (k, p)) in self.coeffs.iter().rev().enumerate() {
            if idx > 0 {
                writeln!(f)?;
            }
            write!(f, "gen {} : {p}", Symbol(k))?;
        }
        Ok(())
    }
}

impl fmt::Display for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, (k, p)) in self.coeffs.iter().rev().enumerate() {
            if idx > 0 {
                writeln!(f)?;
            }
            write!(f, "gen {k} : {p}")?;
        }
        Ok(())
    }
}

fn parse_symbol(text: &str) -> Result<Monomial> {
    let bad = || Error::Format(format!("`{text}` is not a differential symbol"));
    let mut out = Monomial::one();
    for factor in text.split('*').map(str::trim) {
        let inner = factor.strip_prefix("d(").ok_or_else(bad)?;
        let mut depth = 1usize;
        let mut close = None;
        for (idx, ch) in inner.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth == 0 {
                        close = Some(idx);
                        break;
                    }
                }
                _ => {}
            }
        }
        let close = close.ok_or_else(bad)?;
        let var = parse_monomial(&inner[..close], VarStyle::Standard)?;
        if var.degree() != 1 {
            return Err(bad());
        }
        let rest = inner[close + 1..].trim();
        let e: u32 = match rest.strip_prefix('^') {
            Some(e) => e.trim().parse().map_err(|_| bad())?,
            None if rest.is_empty() => 1,
            None => return Err(bad()),
        };
        out = out.mul(&Monomial::from_pairs(var.iter().map(|(v, _)| (v, e))));
    }
    Ok(out)
}

fn split_gen_line(line: &str) -> Result<(&str, Poly)> {
    let body = line
        .strip_prefix("gen")
        .ok_or_else(|| Error::Format(format!("expected `gen <symbol> : <poly>`, got `{line}`")))?;
    let (key, poly) = body
        .rsplit_once(" : ")
        .ok_or_else(|| Error::Format(format!("expected `gen <symbol> : <poly>`, got `{line}`")))?;
    Ok((key.trim(), parse(poly)?))
}

impl DiffElement {
    pub fn parse(text: &str) -> Result<Self> {
        let mut e = DiffElement::zero();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (key, coeff) = split_gen_line(line)?;
            e.add_term(parse_symbol(key)?, &coeff);
        }
        Ok(e)
    }
}

impl TensorElement {
    pub fn parse(text: &str) -> Result<Self> {
        let mut e = TensorElement::zero();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (key, coeff) = split_gen_line(line)?;
            let (symbol, t_neg) = match key.rsplit_once(" t^-") {
                Some((sym, k)) => (
                    sym,
                    k.trim()
                        .parse()
                        .map_err(|_| Error::Format(format!("bad t-exponent in `{line}`")))?,
                ),
                None => (key, 0),
            };
            e.add_term(TensorGen::new(parse_symbol(symbol)?, t_neg), &coeff);
        }
        Ok(e)
    }
}

/// `Δ_α(x^β) = C(β, α) x^{β-α}` as a coefficient and cofactor.
fn divided_partial_monomial(beta: &Monomial, alpha: &Monomial) -> Option<(BigInt, Monomial)> {
    let rest = beta.div(alpha)?;
    let c = alpha
        .iter()
        .fold(BigInt::one(), |acc, (v, a)| acc * binomial(beta.exponent(v), a));
    Some((c, rest))
}

/// `d^m(f) = Σ_{1≤|α|≤m} Δ_α(f) (dx)^α`.
pub fn canonical_dm(f: &Poly, m: u32) -> DiffElement {
    let mut out = DiffElement::zero();
    for (beta, c) in f.terms() {
        let vars: Vec<JetVar> = beta.vars().collect();
        for alpha in monomials_in(&vars, 1, m.min(beta.degree())) {
            if let Some((k, rest)) = divided_partial_monomial(beta, &alpha) {
                let coeff = Poly::term(c * Rational::from_integer(k), rest);
                out.add_term(alpha, &coeff);
            }
        }
    }
    out
}

/// `(dx)^β · e`, dropping symbols of degree above `m`.
pub fn mul_symbol(beta: &Monomial, e: &DiffElement, m: u32) -> DiffElement {
    DiffElement::from_terms(
        e.terms()
            .map(|(k, p)| (k.mul(beta), p.clone()))
            .filter(|(k, _)| k.degree() <= m),
    )
}

/// `(dx)^β` symbols of degree `0..=m-1` over the given variables.
fn row_multipliers(vars: &[JetVar], m: u32) -> Vec<Monomial> {
    monomials_in(vars, 0, m - 1)
}

/// Finite presentation of `Ω^(m)` of `K[vars]/(ideal)`.
#[derive(Debug, Clone)]
pub struct DiffPresentation {
    pub m: u32,
    pub vars: Vec<JetVar>,
    pub ideal: Vec<Poly>,
    pub generators: Vec<Monomial>,
    /// `(dx)^β d^m(f)` for `f` in `ideal`, `|β| ≤ m-1`, grouped by `f`.
    pub relations: Vec<DiffElement>,
}

impl DiffPresentation {
    pub fn new(vars: Vec<JetVar>, ideal: Vec<Poly>, m: u32) -> Self {
        assert!(m >= 1, "differential order starts at 1");
        let generators = monomials_in(&vars, 1, m);
        let multipliers = row_multipliers(&vars, m);
        let mut relations = Vec::new();
        for f in &ideal {
            let dm = canonical_dm(f, m);
            for beta in &multipliers {
                relations.push(mul_symbol(beta, &dm, m));
            }
        }
        DiffPresentation {
            m,
            vars,
            ideal,
            generators,
            relations,
        }
    }

    /// `Ω^(m)` of `A_n` for the jet ring, with the jet ideal as relations.
    pub fn of_jet_ring(ring: &JetRing, m: u32) -> Self {
        DiffPresentation::new(ring.vars(), ring.jet_ideal_generators(), m)
    }

    /// The row `(dx)^β d^m(f_i)` for ideal generator `i`.
    pub fn relation(&self, i: usize, beta: &Monomial) -> DiffElement {
        mul_symbol(beta, &canonical_dm(&self.ideal[i], self.m), self.m)
    }

    /// `g · (dx)^α` for every ideal generator `g` and generator symbol `α`:
    /// the kernel of the coefficient map to the quotient ring.
    pub fn coefficient_rows(&self) -> Vec<DiffElement> {
        let mut rows = Vec::new();
        for g in &self.ideal {
            for alpha in &self.generators {
                rows.push(DiffElement::term(alpha.clone(), g.clone()));
            }
        }
        rows
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }
}

/// Converts `e ⊗ t^{-k}` for `e` with coefficients in `A` into the tensor
/// presentation: `c (dx)^α ⊗ t^{-k} = Σ_{i≤k} d_i(c) (dx)^α ⊗ t^{i-k}`.
pub fn tensor_with(e: &DiffElement, k: u32, jets: &mut Jets) -> Result<TensorElement> {
    if k > jets.order() {
        return Err(Error::JetOrderOutOfRange { j: k, n: jets.order() });
    }
    let mut out = TensorElement::zero();
    for (alpha, c) in e.terms() {
        let ds = jets.all(c)?;
        for i in 0..=k {
            out.add_term(TensorGen::new(alpha.clone(), k - i), &ds[i as usize]);
        }
    }
    Ok(out)
}

/// Finite presentation of `Ω^(m)_A ⊗ P_n` over `A_n`.
#[derive(Debug, Clone)]
pub struct TensorPresentation {
    pub ring: JetRing,
    pub m: u32,
    pub generators: Vec<TensorGen>,
    /// `f_β ⊗ t^{-k}`, grouped by relation, then `β`, then `k`.
    pub relations: Vec<TensorElement>,
}

impl TensorPresentation {
    pub fn new(ring: &JetRing, m: u32) -> Result<Self> {
        let base = DiffPresentation::new(ring.base_vars(), ring.relations().to_vec(), m);
        let generators = base
            .generators
            .iter()
            .flat_map(|a| (0..=ring.n).map(move |k| TensorGen::new(a.clone(), k)))
            .collect();
        let mut jets = Jets::new(ring.n);
        let mut relations = Vec::new();
        for row in &base.relations {
            for k in 0..=ring.n {
                relations.push(tensor_with(row, k, &mut jets)?);
            }
        }
        Ok(TensorPresentation {
            ring: ring.clone(),
            m,
            generators,
            relations,
        })
    }

    /// `g · gen` for every jet-ideal generator `g` and every generator.
    pub fn coefficient_rows(&self) -> Vec<TensorElement> {
        let mut rows = Vec::new();
        for g in self.ring.jet_ideal_generators() {
            for gen in &self.generators {
                rows.push(TensorElement::term(gen.clone(), g.clone()));
            }
        }
        rows
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }
}

/// Replaces every jet monomial of `p` by the matching symbol product.
fn symbolize(p: &Poly) -> DiffElement {
    DiffElement::from_terms(p.terms().map(|(m, c)| (m.clone(), Poly::constant(c.clone()))))
}

/// `φ_n^∨`, symbol by symbol: `c · (dx)^α ⊗ t^{-j} ↦ c · sym(d_j(x^α))`,
/// where `sym` turns the jet monomial `x^γ` into `(dx)^γ`. Coefficients
/// already live in `A_n` and pass through unchanged.
pub fn phi_vee(e: &TensorElement, ring: &JetRing) -> Result<DiffElement> {
    let mut jets = Jets::new(ring.n);
    let mut out = DiffElement::zero();
    for (gen, c) in e.terms() {
        ring.check_order(gen.t_neg)?;
        let image = symbolize(&jets.monomial(&gen.symbol)?[gen.t_neg as usize]);
        out.add_mul(c, &image);
    }
    Ok(out)
}

/// `φ_n^∨(d^m(f) ⊗ t^{-j}) = d^m(f^(j))` in `Ω^(m)` of `A_n`.
pub fn phi_vee_on_generator(f: &Poly, j: u32, ring: &JetRing, m: u32) -> Result<DiffElement> {
    let fj = crate::jetring::d(f, j, ring)?;
    Ok(canonical_dm(&fj, m))
}

/// Free ranks `C(v+m, m) - 1` of `Ω^(m)` of a polynomial ring in `v`
/// variables.
pub fn free_rank(vars: u32, m: u32) -> BigInt {
    binomial(vars + m, m) - 1
}

/// Rank of `Ω^(m)_A ⊗ P_n` for `A = K[x_1..x_s]`: `(n+1)(C(s+m,m)-1)`.
pub fn tensor_rank(s: u32, n: u32, m: u32) -> BigInt {
    free_rank(s, m) * BigInt::from(n + 1)
}

/// Rank of `Ω^(m)` of `A_n` for `A = K[x_1..x_s]`.
pub fn jet_rank(s: u32, n: u32, m: u32) -> BigInt {
    free_rank(s * (n + 1), m)
}

/// Both sides of the degree-2 expansion
/// `d^2(x^β) = Σ_{|α|=2} Δ_α(x^β) d^2(x^α) + (2-|β|) Σ_{|α|=1} Δ_α(x^β) d^2(x^α)`.
pub fn closed_m2_module_sides(beta: &Monomial) -> (DiffElement, DiffElement) {
    let lhs = canonical_dm(&Poly::monomial(beta.clone()), 2);
    let x_beta = Poly::monomial(beta.clone());
    let vars: Vec<JetVar> = beta.vars().collect();
    let mut rhs = DiffElement::zero();
    for alpha in monomials_in(&vars, 2, 2) {
        let coeff = x_beta.divided_partial(&alpha);
        rhs.add_mul(&coeff, &canonical_dm(&Poly::monomial(alpha), 2));
    }
    let correction = Rational::from_integer((2 - i64::from(beta.degree())).into());
    if !correction.is_zero() {
        for alpha in monomials_in(&vars, 1, 1) {
            let coeff = x_beta.divided_partial(&alpha).scale(&correction);
            rhs.add_mul(&coeff, &canonical_dm(&Poly::monomial(alpha), 2));
        }
    }
    (lhs, rhs)
}

/// Free-module values; monomials act on coefficients.
#[derive(Debug, Clone, Copy, Default)]
pub struct FreeTarget;

impl DerivationTarget for FreeTarget {
    type Value = DiffElement;

    fn zero(&self) -> DiffElement {
        DiffElement::zero()
    }

    fn add_scaled(&self, acc: &mut DiffElement, c: &Rational, v: &DiffElement) {
        acc.add_scaled(c, v);
    }

    fn act(&mut self, m: &Monomial, v: &DiffElement) -> Result<DiffElement> {
        Ok(v.mul_poly(&Poly::monomial(m.clone())))
    }
}

/// `d^m` as a [`Derivation`] into the free module on symbols.
#[derive(Debug, Clone)]
pub struct CanonicalDm {
    pub m: u32,
    target: FreeTarget,
}

impl CanonicalDm {
    pub fn new(m: u32) -> Self {
        CanonicalDm { m, target: FreeTarget }
    }
}

impl Derivation for CanonicalDm {
    type Target = FreeTarget;

    fn order(&self) -> u32 {
        self.m
    }

    fn target(&mut self) -> &mut FreeTarget {
        &mut self.target
    }

    fn apply(&mut self, f: &Poly) -> Result<DiffElement> {
        Ok(canonical_dm(f, self.m))
    }
}

/// Outcome of a bounded-degree membership search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    /// No combination with coefficients of degree `≤ d` exists.
    Infeasible,
    /// Coefficients `g_r`, one per relation, with `target = Σ g_r · r`.
    Feasible(Vec<Poly>),
}

impl Membership {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Membership::Feasible(_))
    }
}

/// Looks for polynomials `g_r` in `vars` of degree `≤ degree` with
/// `target = Σ g_r · relations[r]`, by comparing coefficients generator by
/// generator and monomial by monomial. A returned solution has been checked
/// by substitution.
pub fn bounded_nonmembership<K: Ord + Clone>(
    target: &FreeElement<K>,
    relations: &[FreeElement<K>],
    vars: &[JetVar],
    degree: u32,
) -> Membership {
    let multipliers = monomials_in(vars, 0, degree);
    let mut equations: BTreeMap<(K, Monomial), usize> = BTreeMap::new();
    let mut rows: Vec<BTreeMap<usize, Rational>> = Vec::new();
    let mut eq_index = |key: (K, Monomial), rows: &mut Vec<BTreeMap<usize, Rational>>| {
        *equations.entry(key).or_insert_with(|| {
            rows.push(BTreeMap::new());
            rows.len() - 1
        })
    };

    let columns = relations.len() * multipliers.len();
    for (r, rel) in relations.iter().enumerate() {
        for (u, mu) in multipliers.iter().enumerate() {
            let col = r * multipliers.len() + u;
            for (k, p) in rel.terms() {
                for (mono, c) in p.terms() {
                    let eq = eq_index((k.clone(), mono.mul(mu)), &mut rows);
                    let slot = rows[eq].entry(col).or_insert_with(Rational::zero);
                    *slot += c;
                }
            }
        }
    }
    let mut rhs = vec![Rational::zero(); rows.len()];
    for (k, p) in target.terms() {
        for (mono, c) in p.terms() {
            let eq = eq_index((k.clone(), mono.clone()), &mut rows);
            if eq >= rhs.len() {
                rhs.resize(eq + 1, Rational::zero());
            }
            rhs[eq] += c;
        }
    }

    let system = rows.into_iter().zip(rhs).collect();
    let Some(x) = linsolve::solve_sparse(system, columns) else {
        return Membership::Infeasible;
    };
    let coeffs: Vec<Poly> = (0..relations.len())
        .map(|r| {
            Poly::from_terms(
                multipliers
                    .iter()
                    .enumerate()
                    .map(|(u, mu)| (x[r * multipliers.len() + u].clone(), mu.clone())),
            )
        })
        .collect();

    let mut check = FreeElement::zero();
    for (g, rel) in coeffs.iter().zip(relations) {
        check.add_mul(g, rel);
    }
    assert!(check == *target, "linear solve produced a combination that does not reproduce the target");
    Membership::Feasible(coeffs)
}
