//! Hasse-Schmidt algebras `A_n` of `A = K[x_1..x_s]/I`, the universal
//! derivations `d_j : A → A_n`, and the truncated ring `B_n = A_n[t]/(t^{n+1})`.
//!
//! Quotients are carried as generator lists only. Nothing here reduces
//! modulo the jet ideal; callers that care about the quotient exhibit
//! explicit combinations of [`JetRing::jet_ideal_generators`].

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ratpoly::{jet_vars, parse, JetVar, Monomial, Poly, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JetRing {
    pub s: u32,
    pub n: u32,
    relations: Vec<Poly>,
}

impl JetRing {
    /// The jet algebra of the polynomial ring in `s` variables.
    pub fn new(s: u32, n: u32) -> Self {
        assert!(s >= 1, "a jet ring needs at least one base variable");
        JetRing {
            s,
            n,
            relations: Vec::new(),
        }
    }

    pub fn with_relations(s: u32, n: u32, relations: Vec<Poly>) -> Result<Self> {
        let ring = JetRing::new(s, n);
        for rel in &relations {
            let bad = rel.variables().into_iter().any(|v| v.order != 0 || v.base > s);
            if bad {
                return Err(Error::InvalidRelation {
                    relation: rel.to_string(),
                    s,
                });
            }
        }
        Ok(JetRing { relations, ..ring })
    }

    pub fn relations(&self) -> &[Poly] {
        &self.relations
    }

    /// The same base ring truncated at another order.
    pub fn at_order(&self, n: u32) -> JetRing {
        JetRing { n, ..self.clone() }
    }

    /// All `s(n+1)` jet variables of `A_n`, in variable order.
    pub fn vars(&self) -> Vec<JetVar> {
        jet_vars(self.s, self.n)
    }

    pub fn base_vars(&self) -> Vec<JetVar> {
        (1..=self.s).map(JetVar::base_var).collect()
    }

    pub fn contains_var(&self, v: JetVar) -> bool {
        v.base <= self.s && v.order <= self.n
    }

    /// Checks that `f` lives in `A_n`.
    pub fn check_member(&self, f: &Poly) -> Result<()> {
        for v in f.variables() {
            self.check_var(v)?;
        }
        Ok(())
    }

    pub fn check_var(&self, v: JetVar) -> Result<()> {
        if self.contains_var(v) {
            Ok(())
        } else {
            Err(Error::VariableOutsideRing {
                var: v,
                s: self.s,
                n: self.n,
            })
        }
    }

    /// Checks that `f` lives in the base ring `A`.
    pub fn check_base(&self, f: &Poly) -> Result<()> {
        for v in f.variables() {
            if v.order != 0 {
                return Err(Error::NotBaseVariable { var: v });
            }
            self.check_var(v)?;
        }
        Ok(())
    }

    pub fn check_order(&self, j: u32) -> Result<()> {
        if j > self.n {
            Err(Error::JetOrderOutOfRange { j, n: self.n })
        } else {
            Ok(())
        }
    }

    /// `{ d_j(f) : f relation, 0 ≤ j ≤ n }`, grouped by relation then `j`.
    pub fn jet_ideal_generators(&self) -> Vec<Poly> {
        let mut jets = Jets::new(self.n);
        let mut out = Vec::new();
        for rel in &self.relations {
            out.extend(jets.all(rel).expect("relations are validated on construction"));
        }
        out
    }
}

impl fmt::Display for JetRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ring s={} n={}", self.s, self.n)?;
        for rel in &self.relations {
            write!(f, "\nrel {rel}")?;
        }
        Ok(())
    }
}

/// Splits descriptor text into logical lines. Lines end at a newline or at
/// a ` / ` separator, so a whole spec fits on one command-line argument.
/// `#` starts a comment.
pub(crate) fn spec_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(|line| line.split_once('#').map_or(line, |(code, _)| code))
        .flat_map(|line| line.split(" / "))
        .map(str::trim)
        .filter(|line| !line.is_empty())
}

/// Reads `key=<u32>` from a whitespace-separated token.
pub(crate) fn key_value(token: &str, key: &str) -> Option<Result<u32>> {
    let value = token.strip_prefix(key)?.strip_prefix('=')?;
    Some(
        value
            .parse()
            .map_err(|_| Error::Format(format!("`{token}`: expected {key}=<non-negative integer>"))),
    )
}

impl FromStr for JetRing {
    type Err = Error;

    /// Accepts `ring s=<int> n=<int>` followed by `rel <poly>` lines. The
    /// leading `ring` keyword is optional.
    fn from_str(text: &str) -> Result<Self> {
        let mut lines = spec_lines(text);
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("empty ring descriptor".into()))?;
        let mut s = None;
        let mut n = None;
        for (idx, token) in header.split_whitespace().enumerate() {
            if idx == 0 && token == "ring" {
                continue;
            }
            if let Some(v) = key_value(token, "s") {
                s = Some(v?);
            } else if let Some(v) = key_value(token, "n") {
                n = Some(v?);
            } else {
                return Err(Error::Format(format!("unexpected token `{token}` in ring header")));
            }
        }
        let s = s.ok_or_else(|| Error::Format("ring descriptor is missing s=<int>".into()))?;
        let n = n.ok_or_else(|| Error::Format("ring descriptor is missing n=<int>".into()))?;
        if s == 0 {
            return Err(Error::Format("s must be at least 1".into()));
        }
        let mut relations = Vec::new();
        for line in lines {
            let body = line
                .strip_prefix("rel")
                .filter(|rest| rest.starts_with(char::is_whitespace))
                .ok_or_else(|| Error::Format(format!("expected `rel <poly>`, got `{line}`")))?;
            relations.push(parse(body)?);
        }
        JetRing::with_relations(s, n, relations)
    }
}

/// Memoized universal derivations `d_0..d_n` on base-ring monomials.
///
/// `d_j(x_i · m) = Σ_{a+b=j} x_i^(a) · d_b(m)`, splitting off the smallest
/// variable and caching every suffix monomial on the way.
#[derive(Debug, Clone)]
pub struct Jets {
    n: u32,
    cache: HashMap<Monomial, Vec<Poly>>,
}

impl Jets {
    pub fn new(n: u32) -> Self {
        Jets {
            n,
            cache: HashMap::new(),
        }
    }

    pub fn order(&self) -> u32 {
        self.n
    }

    /// `[d_0(m), …, d_n(m)]` for a monomial in base variables.
    pub fn monomial(&mut self, m: &Monomial) -> Result<&[Poly]> {
        if let Some(v) = m.vars().find(|v| v.order != 0) {
            return Err(Error::NotBaseVariable { var: v });
        }
        self.fill(m);
        Ok(&self.cache[m])
    }

    fn fill(&mut self, m: &Monomial) {
        if self.cache.contains_key(m) {
            return;
        }
        let n = self.n as usize;
        let value = match m.vars().next() {
            None => {
                let mut v = vec![Poly::zero(); n + 1];
                v[0] = Poly::one();
                v
            }
            Some(first) => {
                let rest = m
                    .div(&Monomial::var(first))
                    .expect("first variable divides the monomial");
                self.fill(&rest);
                let tail = &self.cache[&rest];
                let mut v = vec![Poly::zero(); n + 1];
                for (j, slot) in v.iter_mut().enumerate() {
                    for a in 0..=j {
                        let jet = Monomial::var(first.with_order(a as u32));
                        *slot += &tail[j - a].mul_monomial(&jet);
                    }
                }
                v
            }
        };
        self.cache.insert(m.clone(), value);
    }

    /// `[d_0(f), …, d_n(f)]` for a base-ring polynomial.
    pub fn all(&mut self, f: &Poly) -> Result<Vec<Poly>> {
        let mut out = vec![Poly::zero(); self.n as usize + 1];
        for (m, c) in f.terms() {
            let jets = self.monomial(m)?;
            for (slot, p) in out.iter_mut().zip(jets) {
                slot.add_scaled(c, p);
            }
        }
        Ok(out)
    }

    pub fn d(&mut self, f: &Poly, j: u32) -> Result<Poly> {
        if j > self.n {
            return Err(Error::JetOrderOutOfRange { j, n: self.n });
        }
        let mut out = Poly::zero();
        for (m, c) in f.terms() {
            out.add_scaled(c, &self.monomial(m)?[j as usize]);
        }
        Ok(out)
    }

    /// `γ_n^#(f) = Σ_j d_j(f) t^j`.
    pub fn gamma_sharp(&mut self, f: &Poly) -> Result<Series> {
        Ok(Series::from_coeffs(self.all(f)?))
    }
}

/// The `j`-th universal derivation `d_j : A → A_n`.
pub fn d(f: &Poly, j: u32, ring: &JetRing) -> Result<Poly> {
    ring.check_order(j)?;
    ring.check_base(f)?;
    Jets::new(j).d(f, j)
}

pub fn gamma_sharp(f: &Poly, ring: &JetRing) -> Result<Series> {
    ring.check_base(f)?;
    Jets::new(ring.n).gamma_sharp(f)
}

/// Element of `B_n = A_n[t]/(t^{n+1})`: coefficients of `t^0..t^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Series {
    coeffs: Vec<Poly>,
}

impl Series {
    pub fn zero(n: u32) -> Self {
        Series {
            coeffs: vec![Poly::zero(); n as usize + 1],
        }
    }

    pub fn one(n: u32) -> Self {
        Series::constant(Poly::one(), n)
    }

    /// `p · t^0`.
    pub fn constant(p: Poly, n: u32) -> Self {
        Series::monomial(p, 0, n)
    }

    /// `p · t^j`, or zero when `j > n`.
    pub fn monomial(p: Poly, j: u32, n: u32) -> Self {
        let mut s = Series::zero(n);
        if j <= n {
            s.coeffs[j as usize] = p;
        }
        s
    }

    pub fn from_coeffs(coeffs: Vec<Poly>) -> Self {
        assert!(!coeffs.is_empty(), "a series has at least the t^0 coefficient");
        Series { coeffs }
    }

    /// Truncation order `n`.
    pub fn n(&self) -> u32 {
        self.coeffs.len() as u32 - 1
    }

    pub fn coeff(&self, j: u32) -> &Poly {
        &self.coeffs[j as usize]
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Poly> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Poly::is_zero)
    }

    /// Multiplies every coefficient by `p ∈ A_n`.
    pub fn scale_poly(&self, p: &Poly) -> Series {
        Series {
            coeffs: self.coeffs.iter().map(|c| c * p).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Series {
        Series {
            coeffs: self.coeffs.iter().map(|p| p.scale(c)).collect(),
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: &Rational, other: &Series) {
        assert_eq!(self.n(), other.n(), "series truncation orders differ");
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            a.add_scaled(c, b);
        }
    }

    fn check_same(&self, other: &Series) {
        assert_eq!(self.n(), other.n(), "series truncation orders differ");
    }
}

impl Add<&Series> for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        self.check_same(rhs);
        Series {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub<&Series> for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        self.check_same(rhs);
        Series {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul<&Series> for &Series {
    type Output = Series;
    /// Truncated product: powers of `t` above `n` are dropped.
    fn mul(self, rhs: &Series) -> Series {
        self.check_same(rhs);
        let n = self.coeffs.len();
        let mut coeffs = vec![Poly::zero(); n];
        for (a, pa) in self.coeffs.iter().enumerate() {
            if pa.is_zero() {
                continue;
            }
            for (b, pb) in rhs.coeffs.iter().enumerate().take(n - a) {
                if !pb.is_zero() {
                    coeffs[a + b] += &(pa * pb);
                }
            }
        }
        Series { coeffs }
    }
}

impl fmt::Display for Series {
    /// `(c0) + (c1)*t + (c2)*t^2`, skipping zero coefficients.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match j {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*t")?,
                _ => write!(f, "({c})*t^{j}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// A jet multi-index `α` over the variables `x_i^(j)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JetIndex(pub Monomial);

impl JetIndex {
    pub fn alpha(&self) -> &Monomial {
        &self.0
    }

    /// `ᾱ`: jet orders collapsed onto the base variables.
    pub fn hat(&self) -> Monomial {
        self.0.map_vars(|v| v.with_order(0))
    }

    /// `λ_α = Σ j·α_i^j`.
    pub fn weight(&self) -> u32 {
        self.0.iter().map(|(v, e)| v.order * e).sum()
    }

    pub fn degree(&self) -> u32 {
        self.0.degree()
    }
}

/// Base monomial `x^β` from an exponent vector indexed by base variable.
pub fn base_monomial(beta: &[u32]) -> Monomial {
    Monomial::from_pairs(
        beta.iter()
            .enumerate()
            .map(|(i, &e)| (JetVar::base_var(i as u32 + 1), e)),
    )
}

/// Compositions of `j` into `parts` non-negative parts, none equal to `j`.
/// Empty for `j = 0`. Listed in reverse lexicographic order.
pub fn enumerate_gamma(parts: u32, j: u32) -> Vec<Vec<u32>> {
    fn rec(left: usize, remaining: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 1 {
            current.push(remaining);
            out.push(current.clone());
            current.pop();
            return;
        }
        for part in (0..=remaining).rev() {
            current.push(part);
            rec(left - 1, remaining - part, current, out);
            current.pop();
        }
    }
    if parts == 0 {
        return Vec::new();
    }
    let mut all = Vec::new();
    rec(parts as usize, j, &mut Vec::new(), &mut all);
    all.retain(|g| g.iter().all(|&p| p != j));
    all
}

/// `α_γ` with `x^(γ) = x^{α_γ}`: the `l`-th factor of the canonical factor
/// list of `x^β` gets jet order `γ_l`.
pub fn gamma_to_alpha(gamma: &[u32], beta: &[u32]) -> JetIndex {
    let factors = base_monomial(beta).factors();
    assert_eq!(factors.len(), gamma.len(), "γ must have |β| entries");
    JetIndex(Monomial::from_vars(
        factors.iter().zip(gamma).map(|(v, &g)| v.with_order(g)),
    ))
}

/// Closed form for the `j`-th jet of `x^β`:
/// `Σ_i β_i x_i^(j) x^{β-e_i} + Σ_{γ ∈ Γ^j} x^(γ)` for `j ≥ 1`, and `x^β`
/// itself for `j = 0`.
pub fn monomial_jet_formula(beta: &[u32], j: u32, ring: &JetRing) -> Result<Poly> {
    ring.check_order(j)?;
    if beta.len() > ring.s as usize && beta[ring.s as usize..].iter().any(|&e| e > 0) {
        let base = beta.iter().rposition(|&e| e > 0).unwrap() as u32 + 1;
        return Err(Error::VariableOutsideRing {
            var: JetVar::base_var(base),
            s: ring.s,
            n: ring.n,
        });
    }
    let x_beta = base_monomial(beta);
    if j == 0 {
        // Every factor at order 0: the first sum would count x^β once per factor.
        return Ok(Poly::monomial(x_beta));
    }
    let mut out = Poly::zero();
    for (v, e) in x_beta.iter() {
        let rest = x_beta.div(&Monomial::var(v)).expect("v divides x^β");
        let term = rest.mul(&Monomial::var(v.with_order(j)));
        out.add_term(Rational::from_integer(e.into()), term);
    }
    for gamma in enumerate_gamma(x_beta.degree(), j) {
        out.add_term(Rational::from_integer(1.into()), gamma_to_alpha(&gamma, beta).0);
    }
    Ok(out)
}

/// Both sides of `∂^α ∘ d_l = d_{l-λ_α} ∘ ∂^{ᾱ}` evaluated at `f`.
pub fn commute_check(alpha: &JetIndex, l: u32, f: &Poly, ring: &JetRing) -> Result<(Poly, Poly)> {
    ring.check_order(l)?;
    ring.check_base(f)?;
    for v in alpha.0.vars() {
        ring.check_var(v)?;
    }
    let weight = alpha.weight();
    if weight > l {
        return Err(Error::WeightExceedsOrder { weight, l });
    }
    let mut jets = Jets::new(l);
    let lhs = jets.d(f, l)?.partial(&alpha.0);
    let rhs = jets.d(&f.partial(&alpha.hat()), l - weight)?;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratpoly::{int, parse};

    fn p(text: &str) -> Poly {
        parse(text).unwrap()
    }

    #[test]
    fn first_jet_of_product() {
        let ring = JetRing::new(2, 1);
        assert_eq!(
            d(&p("x1*x2"), 1, &ring).unwrap().to_string(),
            "x1^(0)*x2^(1) + x1^(1)*x2^(0)"
        );
        assert_eq!(d(&p("x1^2"), 1, &ring).unwrap(), p("2*x1^(0)*x1^(1)"));
    }

    #[test]
    fn second_jet_of_square() {
        let ring = JetRing::new(1, 2);
        assert_eq!(
            d(&p("x1^2"), 2, &ring).unwrap(),
            p("2*x1^(0)*x1^(2) + x1^(1)^2")
        );
    }

    #[test]
    fn constants_and_order_zero() {
        let ring = JetRing::new(2, 3);
        for j in 1..=3 {
            assert!(d(&p("7/3"), j, &ring).unwrap().is_zero());
        }
        let f = p("x1^3*x2 - 4*x2 + 1");
        assert_eq!(d(&f, 0, &ring).unwrap(), f);
    }

    #[test]
    fn rejects_bad_input() {
        let ring = JetRing::new(1, 1);
        assert!(matches!(d(&p("x1"), 2, &ring), Err(Error::JetOrderOutOfRange { j: 2, n: 1 })));
        assert!(matches!(d(&p("x1^(1)"), 1, &ring), Err(Error::NotBaseVariable { .. })));
        assert!(matches!(d(&p("x2"), 1, &ring), Err(Error::VariableOutsideRing { .. })));
    }

    #[test]
    fn gamma_sharp_small() {
        let ring = JetRing::new(1, 1);
        let g = gamma_sharp(&p("x1"), &ring).unwrap();
        assert_eq!(g.coeffs(), &[p("x1^(0)"), p("x1^(1)")]);
        let g2 = gamma_sharp(&p("x1^2"), &ring).unwrap();
        assert_eq!(g2, &g * &g);
        assert_eq!(g2.coeffs(), &[p("x1^(0)^2"), p("2*x1^(0)*x1^(1)")]);
    }

    #[test]
    fn series_truncates() {
        let t = Series::monomial(Poly::one(), 1, 2);
        let t2 = &t * &t;
        assert_eq!(t2, Series::monomial(Poly::one(), 2, 2));
        assert!((&t2 * &t).is_zero());
        assert_eq!(t2.to_string(), "(1)*t^2");
    }

    #[test]
    fn gamma_enumeration() {
        assert!(enumerate_gamma(2, 1).is_empty());
        assert_eq!(enumerate_gamma(3, 2), vec![vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 1]]);
        assert_eq!(enumerate_gamma(2, 3), vec![vec![2, 1], vec![1, 2]]);
        assert!(enumerate_gamma(3, 0).is_empty());
    }

    #[test]
    fn gamma_to_alpha_counts_orders() {
        let a = gamma_to_alpha(&[1, 1, 0], &[3]);
        assert_eq!(a.0, Monomial::from_pairs([(JetVar::new(1, 1), 2), (JetVar::new(1, 0), 1)]));
        assert_eq!(gamma_to_alpha(&[0, 0], &[2]).0, Monomial::var_pow(JetVar::base_var(1), 2));
        assert_eq!(a.degree(), 3);
    }

    #[test]
    fn monomial_jet_formula_examples() {
        let ring = JetRing::new(2, 2);
        assert_eq!(monomial_jet_formula(&[2], 1, &ring).unwrap(), p("2*x1^(0)*x1^(1)"));
        assert_eq!(
            monomial_jet_formula(&[1, 1], 1, &ring).unwrap(),
            p("x1^(1)*x2^(0) + x1^(0)*x2^(1)")
        );
        assert_eq!(
            monomial_jet_formula(&[3], 2, &ring).unwrap(),
            p("3*x1^(2)*x1^(0)^2 + 3*x1^(1)^2*x1^(0)")
        );
        assert_eq!(monomial_jet_formula(&[2, 1], 0, &ring).unwrap(), p("x1^2*x2"));
    }

    #[test]
    fn jet_index_data() {
        let a = JetIndex(Monomial::from_pairs([(JetVar::new(1, 2), 1), (JetVar::new(2, 1), 2)]));
        assert_eq!(a.weight(), 4);
        assert_eq!(a.hat(), Monomial::from_pairs([(JetVar::base_var(1), 1), (JetVar::base_var(2), 2)]));
    }

    #[test]
    fn commutation_examples() {
        let ring = JetRing::new(1, 2);
        let alpha = JetIndex(Monomial::var(JetVar::new(1, 1)));
        let (lhs, rhs) = commute_check(&alpha, 2, &p("x1^2"), &ring).unwrap();
        assert_eq!(lhs, p("2*x1^(1)"));
        assert_eq!(rhs, lhs);

        let empty = JetIndex(Monomial::one());
        let (lhs, rhs) = commute_check(&empty, 2, &p("x1^3"), &ring).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, d(&p("x1^3"), 2, &ring).unwrap());

        let heavy = JetIndex(Monomial::var(JetVar::new(1, 2)));
        assert!(matches!(
            commute_check(&heavy, 1, &p("x1^2"), &ring),
            Err(Error::WeightExceedsOrder { weight: 2, l: 1 })
        ));
    }

    #[test]
    fn ring_text_round_trip() {
        let ring: JetRing = "ring s=2 n=1\nrel x1*x2".parse().unwrap();
        assert_eq!(ring.relations(), &[p("x1*x2")]);
        assert_eq!(ring.to_string().parse::<JetRing>().unwrap(), ring);
        let short: JetRing = "s=2 n=1 / rel x1*x2".parse().unwrap();
        assert_eq!(short, ring);
        assert!("s=2".parse::<JetRing>().is_err());
        assert!("ring s=1 n=1\nrel x1^(1)".parse::<JetRing>().is_err());
        assert!("ring s=1 n=1\nrel x2".parse::<JetRing>().is_err());
    }

    #[test]
    fn jet_ideal_of_example_quotient() {
        let ring: JetRing = "ring s=2 n=1\nrel x1*x2".parse().unwrap();
        assert_eq!(
            ring.jet_ideal_generators(),
            vec![p("x1^(0)*x2^(0)"), p("x1^(0)*x2^(1) + x1^(1)*x2^(0)")]
        );
    }

    #[test]
    fn scale_series_by_poly() {
        let ring = JetRing::new(1, 1);
        let g = gamma_sharp(&p("x1"), &ring).unwrap();
        let scaled = g.scale_poly(&p("2*x1^(1)"));
        assert_eq!(scaled.coeff(1), &p("2*x1^(1)^2"));
        assert_eq!(g.scale(&int(0)), Series::zero(1));
    }
}
