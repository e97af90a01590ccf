//! The map `φ_n : Der^m(A_n, M) → Der^m(A, M ⊗ B_n)`,
//! `D ↦ (a ↦ Σ_j D(d_j(a)) t^j)`, its explicit section, and the kernel
//! test for order-2 derivations of `A_n` with `A = K[x]`.

use crate::error::{Error, Result};
use crate::jetring::{JetRing, Jets, Series};
use crate::mderiv::{Derivation, MDeriv, Nakai, PolyTarget, SeriesDeriv, SeriesTarget};
use crate::ratpoly::{monomials_in, monomials_up_to, JetVar, Monomial, Poly, Rational};

/// Where a monomial of degree `1..=m` in the jet variables falls in the
/// section formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stratum {
    /// Only order-0 variables.
    Pure,
    /// `x_i^(j) · (x_i)^{a_i} ⋯ (x_s)^{a_s}` with `j ≥ 1`.
    Jet { i: u32, j: u32 },
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeltaSets {
    pub s: u32,
    pub n: u32,
    pub m: u32,
}

impl DeltaSets {
    pub fn new(s: u32, n: u32, m: u32) -> Self {
        DeltaSets { s, n, m }
    }

    pub fn all(&self) -> Vec<Monomial> {
        monomials_up_to(self.s, self.n, self.m)
    }

    pub fn pure(&self) -> Vec<Monomial> {
        monomials_up_to(self.s, 0, self.m)
    }

    pub fn stratum(&self, i: u32, j: u32) -> Vec<Monomial> {
        if i == 0 || i > self.s || j == 0 || j > self.n {
            return Vec::new();
        }
        let tail: Vec<JetVar> = (i..=self.s).map(JetVar::base_var).collect();
        let head = Monomial::var(JetVar::new(i, j));
        monomials_in(&tail, 0, self.m - 1)
            .into_iter()
            .map(|m| m.mul(&head))
            .collect()
    }

    pub fn classify(&self, mono: &Monomial) -> Stratum {
        classify(mono)
    }
}

pub fn classify(mono: &Monomial) -> Stratum {
    let jets: Vec<(JetVar, u32)> = mono.iter().filter(|(v, _)| v.order > 0).collect();
    match jets.as_slice() {
        [] => Stratum::Pure,
        [(v, 1)] => {
            let lowest = mono.vars().filter(|w| w.order == 0).map(|w| w.base).min();
            if lowest.is_none_or(|b| b >= v.base) {
                Stratum::Jet { i: v.base, j: v.order }
            } else {
                Stratum::Other
            }
        }
        _ => Stratum::Other,
    }
}

fn check_domain(d: &MDeriv, ring: &JetRing) -> Result<()> {
    let dom = d.domain();
    if dom.s != ring.s || dom.n != ring.n {
        return Err(Error::DomainMismatch {
            s: dom.s,
            n: dom.n,
            ring_s: ring.s,
            ring_n: ring.n,
        });
    }
    Ok(())
}

/// `φ_n(D)(a) = Σ_j D(d_j(a)) t^j` for a single base element `a`.
pub fn phi_value(d: &MDeriv, a: &Poly, ring: &JetRing) -> Result<Series> {
    check_domain(d, ring)?;
    ring.check_base(a)?;
    let mut ev = d.evaluator();
    let jets = Jets::new(ring.n).all(a)?;
    let coeffs = jets.iter().map(|p| ev.eval(p)).collect::<Result<Vec<_>>>()?;
    Ok(Series::from_coeffs(coeffs))
}

/// `φ_n(D)` evaluated straight from its definition on every input, with
/// no table in between.
pub struct PhiDirect<'a> {
    ring: JetRing,
    order: u32,
    ev: Nakai<'a, PolyTarget>,
    target: SeriesTarget,
}

impl<'a> PhiDirect<'a> {
    pub fn new(d: &'a MDeriv, ring: &JetRing) -> Result<Self> {
        check_domain(d, ring)?;
        Ok(PhiDirect {
            ring: ring.clone(),
            order: d.order(),
            ev: d.evaluator(),
            target: SeriesTarget::new(ring.n),
        })
    }
}

impl Derivation for PhiDirect<'_> {
    type Target = SeriesTarget;

    fn order(&self) -> u32 {
        self.order
    }

    fn target(&mut self) -> &mut SeriesTarget {
        &mut self.target
    }

    fn apply(&mut self, f: &Poly) -> Result<Series> {
        self.ring.check_base(f)?;
        let jets = self.target.jets().all(f)?;
        let coeffs = jets.iter().map(|p| self.ev.eval(p)).collect::<Result<Vec<_>>>()?;
        Ok(Series::from_coeffs(coeffs))
    }
}

/// `φ_n(D)`, tabulated on the base monomials of degree `1..=m`.
pub fn phi_apply(d: &MDeriv, ring: &JetRing) -> Result<SeriesDeriv> {
    check_domain(d, ring)?;
    let mut ev = d.evaluator();
    let mut jets = Jets::new(ring.n);
    let mut entries = Vec::new();
    for tau in monomials_up_to(ring.s, 0, d.order()) {
        let coeffs = jets
            .monomial(&tau)?
            .to_vec()
            .iter()
            .map(|p| ev.eval(p))
            .collect::<Result<Vec<_>>>()?;
        entries.push((tau, Series::from_coeffs(coeffs)));
    }
    SeriesDeriv::from_table(d.order(), ring.clone(), entries)
}

/// A preimage of `E` under `φ_n`:
///
/// ```text
/// D(x^α) = E_0(x^{α^0})                                       on pure monomials
/// D(x^α) = E_j(x_i^{a_i+1} x_{i+1}^{a_{i+1}} ⋯ x_s^{a_s}) / (a_i + 1)   for x_i^(j)·x_i^{a_i}⋯x_s^{a_s}
/// D(x^α) = 0                                                  otherwise
/// ```
pub fn phi_section(e: &SeriesDeriv) -> Result<MDeriv> {
    let ring = e.ring().clone();
    let sets = DeltaSets::new(ring.s, ring.n, e.order());
    let mut entries = Vec::new();
    for mono in sets.all() {
        let value = match classify(&mono) {
            Stratum::Pure => e.table_value(&mono).coeff(0).clone(),
            Stratum::Jet { i, j } => {
                let xi = JetVar::base_var(i);
                let a_i = mono.exponent(xi);
                let base = mono
                    .div(&Monomial::var(JetVar::new(i, j)))
                    .expect("jet factor divides the monomial")
                    .mul(&Monomial::var(xi));
                let weight = Rational::new(1.into(), (a_i + 1).into());
                e.table_value(&base).coeff(j).scale(&weight)
            }
            Stratum::Other => continue,
        };
        entries.push((mono, value));
    }
    MDeriv::from_table(e.order(), ring, entries)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// `F_{e_j} = D(x_j) = 0`.
    Linear,
    /// `Σ_{i=0}^{j} F_{e_i + e_{j-i}} = 0`.
    Quadratic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelFailure {
    pub condition: Condition,
    pub j: u32,
    pub value: Poly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelVerdict {
    pub member: bool,
    pub failure: Option<KernelFailure>,
}

/// `x_j` of the univariate jet ring, i.e. `x1^(j)`.
fn ux(j: u32) -> JetVar {
    JetVar::new(1, j)
}

/// The values `Σ_{i=0}^{j} D(x_i x_{j-i})`, `j = 0..=n`, that decide the
/// quadratic kernel conditions.
pub fn quadratic_sums(d: &MDeriv) -> Result<Vec<Poly>> {
    let n = d.domain().n;
    let mut ev = d.evaluator();
    (0..=n)
        .map(|j| {
            let mut sum = Poly::zero();
            for i in 0..=j {
                sum += &ev.eval(&Poly::monomial(Monomial::from_vars([ux(i), ux(j - i)])))?;
            }
            Ok(sum)
        })
        .collect()
}

/// Decides `D ∈ ker φ_n` for an order-2 derivation of `A_n`, `A = K[x]`,
/// through the linear conditions `D(x_j) = 0` and the quadratic sums.
pub fn kernel_membership_m2(d: &MDeriv) -> Result<KernelVerdict> {
    let dom = d.domain();
    if dom.s != 1 || d.order() != 2 {
        return Err(Error::Unsupported(format!(
            "kernel test needs s=1 and m=2, got s={} and m={}",
            dom.s,
            d.order()
        )));
    }
    let mut ev = d.evaluator();
    for j in 0..=dom.n {
        let value = ev.eval(&Poly::var(ux(j)))?;
        if !value.is_zero() {
            return Ok(KernelVerdict {
                member: false,
                failure: Some(KernelFailure {
                    condition: Condition::Linear,
                    j,
                    value,
                }),
            });
        }
    }
    for (j, value) in quadratic_sums(d)?.into_iter().enumerate() {
        if !value.is_zero() {
            return Ok(KernelVerdict {
                member: false,
                failure: Some(KernelFailure {
                    condition: Condition::Quadratic,
                    j: j as u32,
                    value,
                }),
            });
        }
    }
    Ok(KernelVerdict {
        member: true,
        failure: None,
    })
}

/// Operator terms of `D_k`:
/// `D_0 = 0`, `D_1 = ½∂²/∂x_1²`, `D_2 = D_1 - ½∂²/∂x_0∂x_2`,
/// `D_k = D_{k-1} + ∂²/∂x_0∂x_k - ∂²/∂x_1∂x_{k-1}`.
pub fn tower_partials(k: u32) -> Vec<(Monomial, Rational)> {
    let pair = |a: u32, b: u32| Monomial::from_vars([ux(a), ux(b)]);
    let mut spec = Vec::new();
    if k >= 1 {
        spec.push((pair(1, 1), Rational::new(1.into(), 2.into())));
    }
    if k >= 2 {
        spec.push((pair(0, 2), Rational::new((-1).into(), 2.into())));
    }
    for l in 3..=k {
        spec.push((pair(0, l), Rational::from_integer(1.into())));
        spec.push((pair(1, l - 1), Rational::from_integer((-1).into())));
    }
    spec
}

/// `D_k` on `A_k` of `K[x]`.
pub fn tower(k: u32) -> MDeriv {
    MDeriv::from_partials(2, JetRing::new(1, k), &tower_partials(k))
        .expect("tower terms have order 2 and live in A_k")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerMismatch {
    /// The lower level `j < k` being compared.
    pub j: u32,
    pub monomial: Monomial,
    pub upper: Poly,
    pub lower: Poly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerVerdict {
    pub compatible: bool,
    pub mismatch: Option<TowerMismatch>,
}

/// Compares `D_k` with `D_j` on every monomial of degree `1..=2` over
/// `x_0..x_j`, for all `j < k`.
pub fn tower_compatibility_check(k: u32) -> TowerVerdict {
    let top = tower(k);
    for j in 0..k {
        let lower = tower(j);
        for mono in monomials_up_to(1, j, 2) {
            let f = Poly::monomial(mono.clone());
            let a = top.eval(&f).expect("A_j sits inside A_k");
            let b = lower.eval(&f).expect("monomial over A_j");
            if a != b {
                return TowerVerdict {
                    compatible: false,
                    mismatch: Some(TowerMismatch {
                        j,
                        monomial: mono,
                        upper: a,
                        lower: b,
                    }),
                };
            }
        }
    }
    TowerVerdict {
        compatible: true,
        mismatch: None,
    }
}

/// `(1/m!) ∂^m / ∂x_n^m` on `A_n` of `K[x]`.
pub fn top_order_pure(m: u32, n: u32) -> MDeriv {
    let alpha = Monomial::var_pow(ux(n), m);
    let c = Rational::new(1.into(), crate::ratpoly::factorial(m));
    MDeriv::from_partials(m, JetRing::new(1, n), &[(alpha, c)]).expect("valid pure operator")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mderiv::nakai_check;
    use crate::ratpoly::{int, parse, parse_monomial, rat, VarStyle};

    fn p(text: &str) -> Poly {
        parse(text).unwrap()
    }

    fn mono(text: &str) -> Monomial {
        parse_monomial(text, VarStyle::Standard).unwrap()
    }

    #[test]
    fn worked_example_strata() {
        let sets = DeltaSets::new(2, 1, 2);
        let pure: Vec<String> = sets.pure().iter().map(ToString::to_string).collect();
        assert_eq!(pure.len(), 5);
        assert!(pure.contains(&"x1^(0)*x2^(0)".to_string()));
        let d11 = sets.stratum(1, 1);
        assert_eq!(
            d11,
            vec![mono("x1^(1)"), mono("x1^(1)*x2"), mono("x1*x1^(1)")]
        );
        assert_eq!(sets.stratum(2, 1), vec![mono("x2^(1)"), mono("x2*x2^(1)")]);
        assert_eq!(classify(&mono("x1*x2^(1)")), Stratum::Other);
        assert_eq!(classify(&mono("x1^(1)*x2^(1)")), Stratum::Other);
        assert_eq!(classify(&mono("x2*x1^(1)")), Stratum::Jet { i: 1, j: 1 });

        let all = sets.all();
        let mut covered = sets.pure();
        covered.extend(d11);
        covered.extend(sets.stratum(2, 1));
        assert!(covered.iter().all(|m| all.contains(m)));
        let mut dedup = covered.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), covered.len());
    }

    #[test]
    fn pure_top_order_operators_vanish() {
        for m in 2..=3 {
            for n in 1..=3 {
                let d = top_order_pure(m, n);
                assert!(!d.is_zero());
                assert!(phi_apply(&d, &JetRing::new(1, n)).unwrap().is_zero(), "m={m} n={n}");
            }
        }
    }

    #[test]
    fn order_one_matches_jet_derivative() {
        // D = ∂/∂x^(1) on A_1: φ(D)(x^2) = D(x0^2) + D(2 x0 x1) t = 2 x0 t
        let ring = JetRing::new(1, 1);
        let d = MDeriv::from_partials(1, ring.clone(), &[(mono("x1^(1)"), int(1))]).unwrap();
        let v = phi_value(&d, &p("x1^2"), &ring).unwrap();
        assert_eq!(v.coeffs(), &[Poly::zero(), p("2*x1")]);
    }

    #[test]
    fn phi_apply_domain_mismatch() {
        let d = MDeriv::zero(2, JetRing::new(1, 1));
        assert!(matches!(
            phi_apply(&d, &JetRing::new(1, 2)),
            Err(Error::DomainMismatch { .. })
        ));
    }

    #[test]
    fn section_worked_example() {
        let ring = JetRing::new(2, 1);
        let e1_x1 = p("x1^(1) + 2");
        let e1_x1sq = p("x2^(1)");
        let e1_x1x2 = p("x1*x2^(1)");
        let e = SeriesDeriv::from_table(
            2,
            ring.clone(),
            [
                (mono("x1"), Series::from_coeffs(vec![p("5"), e1_x1.clone()])),
                (mono("x1^2"), Series::monomial(e1_x1sq.clone(), 1, 1)),
                (mono("x1*x2"), Series::monomial(e1_x1x2.clone(), 1, 1)),
            ],
        )
        .unwrap();
        let d = phi_section(&e).unwrap();
        assert_eq!(d.table_value(&mono("x1^(1)")), e1_x1);
        assert_eq!(d.table_value(&mono("x1*x1^(1)")), e1_x1sq.scale(&rat(1, 2)));
        assert_eq!(d.table_value(&mono("x1^(1)*x2")), e1_x1x2);
        assert_eq!(d.table_value(&mono("x1")), p("5"));
        assert_eq!(phi_apply(&d, &ring).unwrap(), e);

        assert!(phi_section(&SeriesDeriv::zero(2, ring)).unwrap().is_zero());
    }

    #[test]
    fn phi_image_satisfies_product_identity() {
        let ring = JetRing::new(1, 2);
        let d = MDeriv::from_table(
            2,
            ring.clone(),
            [
                (mono("x1^(1)"), p("x1^(2)")),
                (mono("x1*x1^(2)"), p("3")),
                (mono("x1^(1)^2"), p("x1 - 1")),
            ],
        )
        .unwrap();
        let e = phi_apply(&d, &ring).unwrap();
        let xs = [p("x1^2 + 1"), p("x1"), p("2*x1^3 - x1")];
        assert!(nakai_check(&mut e.evaluator(), &xs).unwrap());
        // Table value and direct route agree.
        assert_eq!(e.eval(&p("x1^3")).unwrap(), phi_value(&d, &p("x1^3"), &ring).unwrap());
    }

    #[test]
    fn kernel_examples() {
        let d = MDeriv::from_partials(2, JetRing::new(1, 2), &[(Monomial::var_pow(ux(2), 2), rat(1, 2))]).unwrap();
        assert!(kernel_membership_m2(&d).unwrap().member);

        let mixed = MDeriv::from_partials(2, JetRing::new(1, 1), &[(Monomial::from_vars([ux(0), ux(1)]), int(1))]).unwrap();
        let verdict = kernel_membership_m2(&mixed).unwrap();
        assert!(!verdict.member);
        assert_eq!(
            verdict.failure,
            Some(KernelFailure {
                condition: Condition::Quadratic,
                j: 1,
                value: p("2")
            })
        );

        assert!(kernel_membership_m2(&MDeriv::zero(2, JetRing::new(1, 3))).unwrap().member);
        assert!(kernel_membership_m2(&MDeriv::zero(2, JetRing::new(2, 1))).is_err());
        assert!(kernel_membership_m2(&MDeriv::zero(3, JetRing::new(1, 1))).is_err());
    }

    #[test]
    fn tower_values() {
        let d2 = tower(2);
        assert_eq!(d2.eval(&p("x1^(0)*x1^(2)")).unwrap(), Poly::constant(rat(-1, 2)));
        assert_eq!(d2.eval(&p("x1^(1)^2")).unwrap(), Poly::one());
        assert_eq!(quadratic_sums(&d2).unwrap()[2], Poly::zero());

        let d3 = tower(3);
        assert_eq!(d3.eval(&p("2*x1^(0)*x1^(3)")).unwrap(), Poly::constant(int(2)));
        assert_eq!(d3.eval(&p("2*x1^(1)*x1^(2)")).unwrap(), Poly::constant(int(-2)));
        assert!(tower(0).is_zero());
    }

    #[test]
    fn tower_levels_lie_in_the_kernel() {
        for k in 0..=5 {
            let d = tower(k);
            assert!(kernel_membership_m2(&d).unwrap().member, "k={k}");
            assert!(phi_apply(&d, &JetRing::new(1, k)).unwrap().is_zero(), "k={k}");
        }
    }

    #[test]
    fn tower_restriction_to_lower_levels() {
        assert!(tower_compatibility_check(1).compatible);
        assert!(tower_compatibility_check(2).compatible);
        // From k = 3 on, the -∂²/∂x_1∂x_{k-1} term survives on A_{k-1}.
        let verdict = tower_compatibility_check(3);
        assert!(!verdict.compatible);
        let mismatch = verdict.mismatch.unwrap();
        assert_eq!(mismatch.j, 2);
        assert_eq!(mismatch.monomial, mono("x1^(1)*x1^(2)"));
        assert_eq!(mismatch.upper, Poly::constant(int(-1)));
        assert_eq!(mismatch.lower, Poly::zero());
    }
}
