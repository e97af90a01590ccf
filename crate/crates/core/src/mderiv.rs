//! Order-`m` (Nakai) derivations.
//!
//! A derivation of order `m` on a polynomial ring is fixed by its values on
//! the monomials of degree `1..=m`; every other monomial is reached through
//! the product identity
//!
//! ```text
//! Δ(y_0 ⋯ y_m) = Σ_{s=1}^{m} (-1)^{s-1} Σ_{|S|=s} y_S · Δ(y_{S^c})
//! ```
//!
//! which only ever asks for `Δ` on strictly shorter products. [`Nakai`]
//! implements that extension for any codomain module described by a
//! [`DerivationTarget`].

use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::jetring::{key_value, spec_lines, JetRing, Jets, Series};
use crate::ratpoly::{monomials_in, parse_monomial, parse_with, JetVar, Monomial, Poly, Rational, VarStyle};

/// A codomain module for derivations: how values add and how domain
/// monomials act on them.
pub trait DerivationTarget {
    type Value: Clone + PartialEq + Debug;

    fn zero(&self) -> Self::Value;

    /// `acc += c * v`.
    fn add_scaled(&self, acc: &mut Self::Value, c: &Rational, v: &Self::Value);

    /// The module action `m · v` of a domain monomial.
    fn act(&mut self, m: &Monomial, v: &Self::Value) -> Result<Self::Value>;

    fn act_poly(&mut self, p: &Poly, v: &Self::Value) -> Result<Self::Value> {
        let mut out = self.zero();
        for (m, c) in p.terms() {
            let mv = self.act(m, v)?;
            self.add_scaled(&mut out, c, &mv);
        }
        Ok(out)
    }
}

/// Polynomial values; domain monomials act by multiplication.
#[derive(Debug, Clone, Copy, Default)]
pub struct PolyTarget;

impl DerivationTarget for PolyTarget {
    type Value = Poly;

    fn zero(&self) -> Poly {
        Poly::zero()
    }

    fn add_scaled(&self, acc: &mut Poly, c: &Rational, v: &Poly) {
        acc.add_scaled(c, v);
    }

    fn act(&mut self, m: &Monomial, v: &Poly) -> Result<Poly> {
        Ok(v.mul_monomial(m))
    }
}

/// Values in `A_n ⊗ B_n`, with `A` acting through `γ_n^#`.
#[derive(Debug, Clone)]
pub struct SeriesTarget {
    jets: Jets,
}

impl SeriesTarget {
    pub fn new(n: u32) -> Self {
        SeriesTarget { jets: Jets::new(n) }
    }

    pub fn jets(&mut self) -> &mut Jets {
        &mut self.jets
    }
}

impl DerivationTarget for SeriesTarget {
    type Value = Series;

    fn zero(&self) -> Series {
        Series::zero(self.jets.order())
    }

    fn add_scaled(&self, acc: &mut Series, c: &Rational, v: &Series) {
        acc.add_scaled(c, v);
    }

    fn act(&mut self, m: &Monomial, v: &Series) -> Result<Series> {
        let g = Series::from_coeffs(self.jets.monomial(m)?.to_vec());
        Ok(&g * v)
    }
}

/// Anything that can be evaluated as an order-`m` derivation and checked
/// against the product identity.
pub trait Derivation {
    type Target: DerivationTarget;

    fn order(&self) -> u32;

    fn target(&mut self) -> &mut Self::Target;

    fn apply(&mut self, f: &Poly) -> Result<<Self::Target as DerivationTarget>::Value>;
}

/// Value type of a derivation's target.
pub type ValueOf<D> = <<D as Derivation>::Target as DerivationTarget>::Value;

/// Both sides of the product identity for the `m+1` elements `xs`.
pub fn nakai_sides<D: Derivation>(d: &mut D, xs: &[Poly]) -> Result<(ValueOf<D>, ValueOf<D>)> {
    let k = d.order() as usize + 1;
    if xs.len() != k {
        return Err(Error::Arity {
            expected: k,
            got: xs.len(),
        });
    }
    let product = xs.iter().fold(Poly::one(), |acc, x| &acc * x);
    let lhs = d.apply(&product)?;

    let mut rhs = d.target().zero();
    for mask in 1..(1usize << k) - 1 {
        let mut chosen = Poly::one();
        let mut rest = Poly::one();
        for (idx, x) in xs.iter().enumerate() {
            if mask & (1 << idx) != 0 {
                chosen = &chosen * x;
            } else {
                rest = &rest * x;
            }
        }
        let sign = if mask.count_ones() % 2 == 1 {
            Rational::one()
        } else {
            -Rational::one()
        };
        let inner = d.apply(&rest)?;
        let term = d.target().act_poly(&chosen, &inner)?;
        d.target().add_scaled(&mut rhs, &sign, &term);
    }
    Ok((lhs, rhs))
}

pub fn nakai_check<D: Derivation>(d: &mut D, xs: &[Poly]) -> Result<bool> {
    let (lhs, rhs) = nakai_sides(d, xs)?;
    Ok(lhs == rhs)
}

/// Extends a table on monomials of degree `1..=m` to the whole ring.
///
/// A monomial of degree `d > m` is split into `m+1` factors: the first `m`
/// entries of its canonical factor list one by one, and the product of the
/// remaining `d - m` as the last factor.
pub struct Nakai<'a, T: DerivationTarget> {
    order: u32,
    domain: JetRing,
    base_only: bool,
    table: &'a BTreeMap<Monomial, T::Value>,
    target: T,
    memo: HashMap<Monomial, T::Value>,
}

impl<'a, T: DerivationTarget> Nakai<'a, T> {
    /// `base_only` restricts the domain to the order-0 variables of `domain`.
    pub fn new(
        order: u32,
        domain: JetRing,
        base_only: bool,
        table: &'a BTreeMap<Monomial, T::Value>,
        target: T,
    ) -> Self {
        Nakai {
            order,
            domain,
            base_only,
            table,
            target,
            memo: HashMap::new(),
        }
    }

    fn check_domain(&self, f: &Poly) -> Result<()> {
        if self.base_only {
            self.domain.check_base(f)
        } else {
            self.domain.check_member(f)
        }
    }

    fn lookup(&self, m: &Monomial) -> T::Value {
        self.table.get(m).cloned().unwrap_or_else(|| self.target.zero())
    }

    pub fn monomial(&mut self, m: &Monomial) -> Result<T::Value> {
        let degree = m.degree();
        if degree == 0 {
            return Ok(self.target.zero());
        }
        if degree <= self.order {
            return Ok(self.lookup(m));
        }
        if let Some(v) = self.memo.get(m) {
            return Ok(v.clone());
        }
        let factors = m.factors();
        let ys = self.split(&factors);
        let value = self.combine(&ys, |this, rest| {
            let mono = Monomial::from_vars(rest.iter().copied());
            this.monomial(&mono)
        })?;
        self.memo.insert(m.clone(), value.clone());
        Ok(value)
    }

    /// Evaluates along a caller-chosen factor order. Each split takes the
    /// first `m` factors of the list it is given, so a different order
    /// exercises different instances of the product identity. No memo.
    pub fn ordered(&mut self, factors: &[JetVar]) -> Result<T::Value> {
        if factors.len() <= self.order as usize {
            let m = Monomial::from_vars(factors.iter().copied());
            return Ok(if m.is_one() { self.target.zero() } else { self.lookup(&m) });
        }
        let ys = self.split(factors);
        self.combine(&ys, |this, rest| this.ordered(rest))
    }

    fn split(&self, factors: &[JetVar]) -> Vec<Vec<JetVar>> {
        let m = self.order as usize;
        let mut ys: Vec<Vec<JetVar>> = factors[..m].iter().map(|&v| vec![v]).collect();
        ys.push(factors[m..].to_vec());
        ys
    }

    fn combine(
        &mut self,
        ys: &[Vec<JetVar>],
        mut delta: impl FnMut(&mut Self, &[JetVar]) -> Result<T::Value>,
    ) -> Result<T::Value> {
        let k = ys.len();
        let mut acc = self.target.zero();
        for mask in 1..(1usize << k) - 1 {
            let mut chosen = Vec::new();
            let mut rest = Vec::new();
            for (idx, y) in ys.iter().enumerate() {
                if mask & (1 << idx) != 0 {
                    chosen.extend_from_slice(y);
                } else {
                    rest.extend_from_slice(y);
                }
            }
            let sign = if mask.count_ones() % 2 == 1 {
                Rational::one()
            } else {
                -Rational::one()
            };
            let inner = delta(self, &rest)?;
            let term = self.target.act(&Monomial::from_vars(chosen), &inner)?;
            self.target.add_scaled(&mut acc, &sign, &term);
        }
        Ok(acc)
    }

    pub fn eval(&mut self, f: &Poly) -> Result<T::Value> {
        self.check_domain(f)?;
        let mut out = self.target.zero();
        for (m, c) in f.terms() {
            let v = self.monomial(m)?;
            self.target.add_scaled(&mut out, c, &v);
        }
        Ok(out)
    }
}

impl<T: DerivationTarget> Derivation for Nakai<'_, T> {
    type Target = T;

    fn order(&self) -> u32 {
        self.order
    }

    fn target(&mut self) -> &mut T {
        &mut self.target
    }

    fn apply(&mut self, f: &Poly) -> Result<T::Value> {
        self.eval(f)
    }
}

/// An order-`m` derivation of `A_n` with polynomial values, stored as its
/// (sparse) table on monomials of degree `1..=m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MDeriv {
    order: u32,
    domain: JetRing,
    table: BTreeMap<Monomial, Poly>,
}

fn check_key(key: &Monomial, order: u32, domain: &JetRing) -> Result<()> {
    if key.degree() == 0 || key.degree() > order {
        return Err(Error::TableKey {
            key: key.to_string(),
            m: order,
        });
    }
    key.vars().try_for_each(|v| domain.check_var(v))
}

impl MDeriv {
    pub fn zero(order: u32, domain: JetRing) -> Self {
        assert!(order >= 1, "derivation order starts at 1");
        MDeriv {
            order,
            domain,
            table: BTreeMap::new(),
        }
    }

    /// Table form. Unlisted monomials of degree `1..=m` map to zero;
    /// repeated keys add up.
    pub fn from_table<I>(order: u32, domain: JetRing, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, Poly)>,
    {
        let mut d = MDeriv::zero(order, domain);
        for (key, value) in entries {
            check_key(&key, order, &d.domain)?;
            d.table.entry(key).or_default().add_scaled(&Rational::one(), &value);
        }
        d.table.retain(|_, v| !v.is_zero());
        Ok(d)
    }

    /// The literal operator `Σ c_α ∂^α`, tabulated on monomials of degree
    /// `1..=m`.
    pub fn from_partials(order: u32, domain: JetRing, spec: &[(Monomial, Rational)]) -> Result<Self> {
        for (alpha, _) in spec {
            let degree = alpha.degree();
            if degree == 0 {
                return Err(Error::ZeroOrderTerm);
            }
            if degree > order {
                return Err(Error::OperatorOrderTooHigh { degree, m: order });
            }
            alpha.vars().try_for_each(|v| domain.check_var(v))?;
        }
        let mut d = MDeriv::zero(order, domain);
        if spec.is_empty() {
            return Ok(d);
        }
        for tau in monomials_in(&d.domain.vars(), 1, order) {
            let x_tau = Poly::monomial(tau.clone());
            let mut value = Poly::zero();
            for (alpha, c) in spec {
                value.add_scaled(c, &x_tau.partial(alpha));
            }
            if !value.is_zero() {
                d.table.insert(tau, value);
            }
        }
        Ok(d)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn domain(&self) -> &JetRing {
        &self.domain
    }

    /// Nonzero table entries in ascending monomial order.
    pub fn table(&self) -> &BTreeMap<Monomial, Poly> {
        &self.table
    }

    pub fn table_value(&self, m: &Monomial) -> Poly {
        self.table.get(m).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_empty()
    }

    pub fn evaluator(&self) -> Nakai<'_, PolyTarget> {
        Nakai::new(self.order, self.domain.clone(), false, &self.table, PolyTarget)
    }

    pub fn eval(&self, f: &Poly) -> Result<Poly> {
        self.evaluator().eval(f)
    }

    /// `F · D`: the `A_n`-module action on values.
    pub fn scale_by(&self, f: &Poly) -> MDeriv {
        let table = self
            .table
            .iter()
            .map(|(k, v)| (k.clone(), v * f))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        MDeriv { table, ..self.clone() }
    }

    pub fn add(&self, other: &MDeriv) -> Result<MDeriv> {
        if self.order != other.order || self.domain != other.domain {
            return Err(Error::DomainMismatch {
                s: other.domain.s,
                n: other.domain.n,
                ring_s: self.domain.s,
                ring_n: self.domain.n,
            });
        }
        MDeriv::from_table(
            self.order,
            self.domain.clone(),
            self.table
                .iter()
                .chain(&other.table)
                .map(|(k, v)| (k.clone(), v.clone())),
        )
    }
}

/// Coefficients `F_α = D(x^α)` of an order-2 derivation in operator form
/// `D = Σ_{|α|≤2} F_α Δ_α` (with the degree correction below).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorDeriv {
    order: u32,
    coeffs: BTreeMap<Monomial, Poly>,
}

impl OperatorDeriv {
    pub fn new(order: u32, coeffs: BTreeMap<Monomial, Poly>) -> Result<Self> {
        for alpha in coeffs.keys() {
            if alpha.degree() == 0 {
                return Err(Error::ZeroOrderTerm);
            }
            if alpha.degree() > order {
                return Err(Error::OperatorOrderTooHigh {
                    degree: alpha.degree(),
                    m: order,
                });
            }
        }
        Ok(OperatorDeriv { order, coeffs })
    }

    pub fn from_mderiv(d: &MDeriv) -> Self {
        OperatorDeriv {
            order: d.order,
            coeffs: d.table.clone(),
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeff(&self, alpha: &Monomial) -> Poly {
        self.coeffs.get(alpha).cloned().unwrap_or_default()
    }
}

/// Sub-multi-indices of `beta` with total degree `degree`.
fn sub_indices(beta: &Monomial, degree: u32) -> Vec<Monomial> {
    let vars: Vec<JetVar> = beta.vars().collect();
    monomials_in(&vars, degree, degree)
        .into_iter()
        .filter(|a| a.divides(beta))
        .collect()
}

/// `D(x^β) = Σ_{|α|=2} F_α Δ_α(x^β) + (2 - |β|) Σ_{|α|=1} F_α Δ_α(x^β)`.
pub fn eval_operator_m2(op: &OperatorDeriv, beta: &Monomial) -> Result<Poly> {
    if op.order != 2 {
        return Err(Error::Unsupported(format!(
            "the closed operator formula is only available for m=2, got m={}",
            op.order
        )));
    }
    let x_beta = Poly::monomial(beta.clone());
    let mut out = Poly::zero();
    for alpha in sub_indices(beta, 2) {
        out += &(&op.coeff(&alpha) * &x_beta.divided_partial(&alpha));
    }
    let correction = Rational::from_integer((2 - i64::from(beta.degree())).into());
    if !correction.is_zero() {
        for alpha in sub_indices(beta, 1) {
            let term = &op.coeff(&alpha) * &x_beta.divided_partial(&alpha);
            out.add_scaled(&correction, &term);
        }
    }
    Ok(out)
}

/// `D(x^β)` from the product-identity extension, against the closed m=2
/// formula fed with `F_α = D(x^α)`.
pub fn closed_m2_sides(beta: &Monomial, d: &MDeriv) -> Result<(Poly, Poly)> {
    let lhs = d.eval(&Poly::monomial(beta.clone()))?;
    let rhs = eval_operator_m2(&OperatorDeriv::from_mderiv(d), beta)?;
    Ok((lhs, rhs))
}

pub fn closed_m2_check(beta: &Monomial, d: &MDeriv) -> Result<bool> {
    let (lhs, rhs) = closed_m2_sides(beta, d)?;
    Ok(lhs == rhs)
}

/// An order-`m` derivation `A → A_n ⊗ B_n` where `A` acts through `γ_n^#`,
/// stored by its values on base monomials of degree `1..=m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesDeriv {
    order: u32,
    ring: JetRing,
    table: BTreeMap<Monomial, Series>,
}

impl SeriesDeriv {
    pub fn zero(order: u32, ring: JetRing) -> Self {
        assert!(order >= 1, "derivation order starts at 1");
        SeriesDeriv {
            order,
            ring,
            table: BTreeMap::new(),
        }
    }

    pub fn from_table<I>(order: u32, ring: JetRing, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, Series)>,
    {
        let mut e = SeriesDeriv::zero(order, ring);
        let n = e.ring.n;
        for (key, value) in entries {
            check_key(&key, order, &e.ring.at_order(0))?;
            if value.n() != n {
                return Err(Error::Format(format!(
                    "series value for {key} has truncation order {}, expected {n}",
                    value.n()
                )));
            }
            let slot = e.table.entry(key).or_insert_with(|| Series::zero(n));
            slot.add_scaled(&Rational::one(), &value);
        }
        e.table.retain(|_, v| !v.is_zero());
        Ok(e)
    }

    /// `E = Σ_j E_j ⊗ t^j` from component tables `E_j` on base monomials.
    pub fn from_components(order: u32, ring: JetRing, components: &[MDeriv]) -> Result<Self> {
        let n = ring.n;
        if components.len() != n as usize + 1 {
            return Err(Error::Arity {
                expected: n as usize + 1,
                got: components.len(),
            });
        }
        let mut entries = Vec::new();
        for (j, comp) in components.iter().enumerate() {
            for (key, value) in comp.table() {
                entries.push((key.clone(), Series::monomial(value.clone(), j as u32, n)));
            }
        }
        SeriesDeriv::from_table(order, ring, entries)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn ring(&self) -> &JetRing {
        &self.ring
    }

    pub fn table(&self) -> &BTreeMap<Monomial, Series> {
        &self.table
    }

    pub fn table_value(&self, m: &Monomial) -> Series {
        self.table
            .get(m)
            .cloned()
            .unwrap_or_else(|| Series::zero(self.ring.n))
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_empty()
    }

    pub fn evaluator(&self) -> Nakai<'_, SeriesTarget> {
        Nakai::new(
            self.order,
            self.ring.clone(),
            true,
            &self.table,
            SeriesTarget::new(self.ring.n),
        )
    }

    pub fn eval(&self, f: &Poly) -> Result<Series> {
        self.evaluator().eval(f)
    }

    /// The coefficient of `t^j` in `E(f)`.
    pub fn component(&self, j: u32, f: &Poly) -> Result<Poly> {
        self.ring.check_order(j)?;
        Ok(self.eval(f)?.coeff(j).clone())
    }

    /// `F · E`: multiplies every value by `F ∈ A_n`.
    pub fn scale_by(&self, f: &Poly) -> SeriesDeriv {
        let table = self
            .table
            .iter()
            .map(|(k, v)| (k.clone(), v.scale_poly(f)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        SeriesDeriv { table, ..self.clone() }
    }
}

/// Parsed derivation text: `deriv m=<int>` followed by
/// `partial <var,var,...> <rational>` and `value <monomial> <poly>` lines.
/// Operator lines and table lines add up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivSpec {
    pub order: u32,
    pub partials: Vec<(Monomial, Rational)>,
    pub values: Vec<(Monomial, Poly)>,
}

fn header_order(line: Option<&str>, keyword: &str) -> Result<u32> {
    let line = line.ok_or_else(|| Error::Format(format!("empty spec, expected `{keyword} m=<int>`")))?;
    let mut tokens = line.split_whitespace();
    if tokens.next() != Some(keyword) {
        return Err(Error::Format(format!("expected `{keyword} m=<int>`, got `{line}`")));
    }
    let order = match tokens.next().and_then(|t| key_value(t, "m")) {
        Some(v) => v?,
        None => return Err(Error::Format(format!("expected `{keyword} m=<int>`, got `{line}`"))),
    };
    if order == 0 {
        return Err(Error::Format("derivation order m must be at least 1".into()));
    }
    if let Some(extra) = tokens.next() {
        return Err(Error::Format(format!("unexpected `{extra}` after m=<int>")));
    }
    Ok(order)
}

fn parse_rational(text: &str) -> Result<Rational> {
    let p = parse_with(text, VarStyle::Standard)?;
    p.as_constant()
        .ok_or_else(|| Error::Format(format!("`{text}` is not a rational number")))
}

impl DerivSpec {
    pub fn parse(text: &str, style: VarStyle) -> Result<Self> {
        let mut lines = spec_lines(text);
        let order = header_order(lines.next(), "deriv")?;
        let mut spec = DerivSpec {
            order,
            partials: Vec::new(),
            values: Vec::new(),
        };
        for line in lines {
            let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match keyword {
                "partial" => {
                    let (vars, coeff) = rest
                        .rsplit_once(char::is_whitespace)
                        .ok_or_else(|| Error::Format(format!("expected `partial <vars> <rational>`, got `{line}`")))?;
                    let mut alpha = Monomial::one();
                    for var in vars.split(',').map(str::trim).filter(|v| !v.is_empty()) {
                        alpha = alpha.mul(&parse_monomial(var, style)?);
                    }
                    spec.partials.push((alpha, parse_rational(coeff)?));
                }
                "value" => {
                    let (key, value) = rest
                        .split_once(char::is_whitespace)
                        .ok_or_else(|| Error::Format(format!("expected `value <monomial> <poly>`, got `{line}`")))?;
                    spec.values.push((parse_monomial(key, style)?, parse_with(value, style)?));
                }
                _ => return Err(Error::Format(format!("unknown derivation line `{line}`"))),
            }
        }
        Ok(spec)
    }

    pub fn build(&self, domain: JetRing) -> Result<MDeriv> {
        let op = MDeriv::from_partials(self.order, domain.clone(), &self.partials)?;
        let tab = MDeriv::from_table(self.order, domain, self.values.iter().cloned())?;
        op.add(&tab)
    }
}

/// Parsed series-derivation text: `sderiv m=<int>` followed by
/// `value <base-monomial> <j> <poly>` lines giving the `t^j` coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesDerivSpec {
    pub order: u32,
    pub values: Vec<(Monomial, u32, Poly)>,
}

impl SeriesDerivSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = spec_lines(text);
        let order = header_order(lines.next(), "sderiv")?;
        let mut values = Vec::new();
        for line in lines {
            let bad = || Error::Format(format!("expected `value <monomial> <j> <poly>`, got `{line}`"));
            let rest = line.strip_prefix("value").ok_or_else(bad)?.trim_start();
            let (key, rest) = rest.split_once(char::is_whitespace).ok_or_else(bad)?;
            let (j, value) = rest.trim_start().split_once(char::is_whitespace).ok_or_else(bad)?;
            let j: u32 = j.parse().map_err(|_| bad())?;
            values.push((parse_monomial(key, VarStyle::Standard)?, j, parse_with(value, VarStyle::Standard)?));
        }
        Ok(SeriesDerivSpec { order, values })
    }

    pub fn build(&self, ring: JetRing) -> Result<SeriesDeriv> {
        let n = ring.n;
        let mut entries = Vec::new();
        for (key, j, value) in &self.values {
            ring.check_order(*j)?;
            ring.check_member(value)?;
            entries.push((key.clone(), Series::monomial(value.clone(), *j, n)));
        }
        SeriesDeriv::from_table(self.order, ring, entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratpoly::{int, parse, rat};

    fn p(text: &str) -> Poly {
        parse(text).unwrap()
    }

    fn x(i: u32) -> JetVar {
        JetVar::base_var(i)
    }

    fn mono(text: &str) -> Monomial {
        parse_monomial(text, VarStyle::Standard).unwrap()
    }

    fn half_second(domain: JetRing) -> MDeriv {
        MDeriv::from_partials(2, domain, &[(Monomial::var_pow(x(1), 2), rat(1, 2))]).unwrap()
    }

    #[test]
    fn cube_from_square_table() {
        let d = MDeriv::from_table(2, JetRing::new(1, 0), [(mono("x1^2"), Poly::one())]).unwrap();
        assert_eq!(d.eval(&p("x1^3")).unwrap(), p("3*x1"));
        assert_eq!(d, half_second(JetRing::new(1, 0)));
        assert!(d.eval(&p("5")).unwrap().is_zero());
    }

    #[test]
    fn half_second_derivative_of_powers() {
        let d = half_second(JetRing::new(1, 0));
        for k in 1..=7u32 {
            let expected = Poly::monomial(Monomial::var_pow(x(1), k.saturating_sub(2)))
                .scale(&Rational::from_integer((k * k.saturating_sub(1) / 2).into()));
            let expected = if k < 2 { Poly::zero() } else { expected };
            assert_eq!(d.eval(&Poly::monomial(Monomial::var_pow(x(1), k))).unwrap(), expected);
        }
    }

    #[test]
    fn tabulated_partials() {
        let d = half_second(JetRing::new(1, 0));
        assert_eq!(d.table_value(&mono("x1")), Poly::zero());
        assert_eq!(d.table_value(&mono("x1^2")), Poly::one());
        let none = MDeriv::from_partials(2, JetRing::new(1, 0), &[]).unwrap();
        assert!(none.is_zero());
    }

    #[test]
    fn partial_spec_rejections() {
        let ring = JetRing::new(1, 0);
        assert!(matches!(
            MDeriv::from_partials(2, ring.clone(), &[(Monomial::one(), int(1))]),
            Err(Error::ZeroOrderTerm)
        ));
        assert!(matches!(
            MDeriv::from_partials(2, ring.clone(), &[(Monomial::var_pow(x(1), 3), int(1))]),
            Err(Error::OperatorOrderTooHigh { degree: 3, m: 2 })
        ));
        assert!(matches!(
            MDeriv::from_partials(2, ring, &[(Monomial::var(x(2)), int(1))]),
            Err(Error::VariableOutsideRing { .. })
        ));
    }

    #[test]
    fn eval_rejects_outside_domain() {
        let d = half_second(JetRing::new(1, 0));
        assert!(matches!(d.eval(&p("x1^(1)")), Err(Error::VariableOutsideRing { .. })));
    }

    #[test]
    fn nakai_on_triple_x() {
        let d = half_second(JetRing::new(1, 0));
        let xs = vec![p("x1"), p("x1"), p("x1")];
        let mut ev = d.evaluator();
        let (lhs, rhs) = nakai_sides(&mut ev, &xs).unwrap();
        assert_eq!(lhs, p("3*x1"));
        assert_eq!(rhs, lhs);
        assert!(matches!(
            nakai_check(&mut ev, &xs[..2]),
            Err(Error::Arity { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn order_one_is_leibniz() {
        let d = MDeriv::from_partials(1, JetRing::new(2, 0), &[(Monomial::var(x(1)), int(1))]).unwrap();
        let mut ev = d.evaluator();
        assert!(nakai_check(&mut ev, &[p("x1^2*x2 + 1"), p("x1 - x2^3")]).unwrap());
        assert_eq!(ev.eval(&p("x1^3*x2")).unwrap(), p("3*x1^2*x2"));
    }

    #[test]
    fn zero_derivation_passes() {
        let d = MDeriv::zero(3, JetRing::new(2, 1));
        let xs = vec![p("x1 + 2"), p("x2^(1)"), p("x1*x2"), p("3")];
        assert!(nakai_check(&mut d.evaluator(), &xs).unwrap());
    }

    #[test]
    fn operator_formula_examples() {
        let d = half_second(JetRing::new(1, 0));
        let op = OperatorDeriv::from_mderiv(&d);
        assert_eq!(eval_operator_m2(&op, &mono("x1^3")).unwrap(), p("3*x1"));
        assert!(closed_m2_check(&mono("x1^4"), &d).unwrap());
        assert_eq!(d.eval(&p("x1^4")).unwrap(), p("6*x1^2"));

        let ring = JetRing::new(2, 0);
        let e = MDeriv::from_table(2, ring, [(mono("x1"), p("x2 + 1")), (mono("x2"), p("7"))]).unwrap();
        let op = OperatorDeriv::from_mderiv(&e);
        assert_eq!(eval_operator_m2(&op, &mono("x1")).unwrap(), p("x2 + 1"));
        assert!(closed_m2_check(&mono("x1*x2"), &e).unwrap());
        assert!(closed_m2_check(&mono("x1^2*x2^3"), &e).unwrap());

        let cubic = MDeriv::zero(3, JetRing::new(1, 0));
        assert!(eval_operator_m2(&OperatorDeriv::from_mderiv(&cubic), &mono("x1")).is_err());
    }

    #[test]
    fn permuted_split_agrees() {
        let ring = JetRing::new(2, 1);
        let d = MDeriv::from_table(
            2,
            ring,
            [
                (mono("x1"), p("x2^(1)")),
                (mono("x1*x2^(1)"), p("1/3")),
                (mono("x2^2"), p("x1 - 2")),
                (mono("x1^(1)*x2"), p("x1^(1)")),
            ],
        )
        .unwrap();
        let m = mono("x1^2*x1^(1)*x2^2*x2^(1)");
        let canonical = d.eval(&Poly::monomial(m.clone())).unwrap();
        let mut factors = m.factors();
        factors.reverse();
        assert_eq!(d.evaluator().ordered(&factors).unwrap(), canonical);
        factors.rotate_left(2);
        assert_eq!(d.evaluator().ordered(&factors).unwrap(), canonical);
    }

    #[test]
    fn module_action_on_values() {
        let d = half_second(JetRing::new(1, 1));
        let f = p("x1^(1) + 2");
        let scaled = d.scale_by(&f);
        let g = p("x1^3*x1^(1)");
        assert_eq!(scaled.eval(&g).unwrap(), &d.eval(&g).unwrap() * &f);
    }

    #[test]
    fn series_values_use_gamma_action() {
        // E(x1) = t, E(x1^2) = 0 at n=1, m=1: E(x1^2) = 2 γ(x1) t = 2 x1^(0) t
        let ring = JetRing::new(1, 1);
        let e = SeriesDeriv::from_table(1, ring, [(mono("x1"), Series::monomial(Poly::one(), 1, 1))]).unwrap();
        let v = e.eval(&p("x1^2")).unwrap();
        assert_eq!(v.coeffs(), &[Poly::zero(), p("2*x1")]);
        assert_eq!(e.component(1, &p("x1^2")).unwrap(), p("2*x1"));
        assert!(e.eval(&p("x1^(1)")).is_err());
    }

    #[test]
    fn spec_comments_are_ignored() {
        let text = "# header\nderiv m=2\npartial x1,x1 1/2  # half the square\n";
        let spec = DerivSpec::parse(text, VarStyle::Standard).unwrap();
        assert_eq!(spec.partials, vec![(mono("x1^2"), rat(1, 2))]);
    }

    #[test]
    fn deriv_spec_text() {
        let spec = DerivSpec::parse("deriv m=2 / partial x2,x2 1/2", VarStyle::UnivariateJets).unwrap();
        assert_eq!(spec.order, 2);
        assert_eq!(spec.partials, vec![(Monomial::var_pow(JetVar::new(1, 2), 2), rat(1, 2))]);
        let d = spec.build(JetRing::new(1, 2)).unwrap();
        assert_eq!(d.table().len(), 1);

        let table = DerivSpec::parse("deriv m=2\nvalue x1^2 1\nvalue x1*x2 x1 - 1", VarStyle::Standard).unwrap();
        let d = table.build(JetRing::new(2, 0)).unwrap();
        assert_eq!(d.table_value(&mono("x1*x2")), p("x1 - 1"));

        assert!(DerivSpec::parse("deriv m=0", VarStyle::Standard).is_err());
        assert!(DerivSpec::parse("derive m=2", VarStyle::Standard).is_err());
        assert!(DerivSpec::parse("deriv m=2\nfoo", VarStyle::Standard).is_err());
        assert!(DerivSpec::parse("deriv m=2\npartial x1 x2", VarStyle::Standard).is_err());
    }

    #[test]
    fn series_spec_text() {
        let spec = SeriesDerivSpec::parse("sderiv m=2\nvalue x1 1 x1^(1)\nvalue x1^2 0 3").unwrap();
        let e = spec.build(JetRing::new(1, 1)).unwrap();
        assert_eq!(e.table_value(&mono("x1")).coeff(1), &p("x1^(1)"));
        assert_eq!(e.table_value(&mono("x1^2")).coeff(0), &p("3"));
        assert!(SeriesDerivSpec::parse("sderiv m=2\nvalue x1 2 1").unwrap().build(JetRing::new(1, 1)).is_err());
    }
}
