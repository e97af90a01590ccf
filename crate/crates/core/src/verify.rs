//! Seeded identity suites with structured pass/fail reports.

use std::fmt::Display;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::diffmod::{closed_m2_module_sides, tensor_example, Membership};
use crate::error::Result;
use crate::jetring::{d, enumerate_gamma, monomial_jet_formula, base_monomial, commute_check, JetIndex, JetRing, Jets};
use crate::mderiv::{closed_m2_sides, nakai_sides, MDeriv, SeriesDeriv};
use crate::phimap::{
    kernel_membership_m2, phi_apply, phi_section, quadratic_sums, top_order_pure, tower, tower_compatibility_check,
    PhiDirect,
};
use crate::random;
use crate::ratpoly::{monomials_up_to, JetVar, Monomial, Poly, Rational};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 42;

pub const SUITES: &[&str] = &[
    "leibniz",
    "monomial-jets",
    "worked-example",
    "phi-nakai",
    "section",
    "kernel",
    "not-injective",
    "tower",
    "closed-m2",
    "commute",
    "tensor-example",
    "permutation",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub case: usize,
    pub inputs: String,
    pub expected: String,
    pub actual: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub cases: usize,
    pub passed: usize,
    pub failed: usize,
    pub first_failure: Option<Failure>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

struct Tally {
    report: SuiteReport,
}

impl Tally {
    fn new(suite: &str, seed: u64) -> Self {
        Tally {
            report: SuiteReport {
                suite: suite.to_string(),
                seed,
                cases: 0,
                passed: 0,
                failed: 0,
                first_failure: None,
            },
        }
    }

    fn record(&mut self, pass: bool, failure: impl FnOnce() -> (String, String, String)) {
        let case = self.report.cases;
        self.report.cases += 1;
        if pass {
            self.report.passed += 1;
            return;
        }
        self.report.failed += 1;
        if self.report.first_failure.is_none() {
            let (inputs, expected, actual) = failure();
            self.report.first_failure = Some(Failure {
                case,
                inputs,
                expected,
                actual,
            });
        }
    }

    /// Records `expected == actual`.
    fn eq<T: PartialEq + Display>(&mut self, inputs: impl FnOnce() -> String, expected: &T, actual: &T) {
        self.record(expected == actual, || (inputs(), expected.to_string(), actual.to_string()));
    }

    /// Records a computation that may fail; errors count as failures.
    fn check<T: PartialEq + Display>(&mut self, inputs: impl FnOnce() -> String, sides: Result<(T, T)>) {
        match sides {
            Ok((expected, actual)) => self.eq(inputs, &expected, &actual),
            Err(err) => self.record(false, || (inputs(), "a value".into(), format!("error: {err}"))),
        }
    }

    fn finish(self) -> SuiteReport {
        self.report
    }
}

/// Independent stream per suite.
fn rng_for(suite: &str, seed: u64) -> ChaCha8Rng {
    let salt = suite
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3));
    ChaCha8Rng::seed_from_u64(seed ^ salt)
}

struct ShowSeries<'a>(&'a [Poly]);

impl Display for ShowSeries<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for (idx, p) in self.0.iter().enumerate() {
            if idx > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

fn show_list(xs: &[Poly]) -> String {
    xs.iter().map(|x| format!("({x})")).collect::<Vec<_>>().join(", ")
}

fn show_table(d: &MDeriv) -> String {
    let entries: Vec<String> = d.table().iter().map(|(k, v)| format!("{k} -> {v}")).collect();
    format!("m={} s={} n={} {{{}}}", d.order(), d.domain().s, d.domain().n, entries.join(", "))
}

fn show_series_table(e: &SeriesDeriv) -> String {
    let entries: Vec<String> = e.table().iter().map(|(k, v)| format!("{k} -> {v}")).collect();
    format!("m={} s={} n={} {{{}}}", e.order(), e.ring().s, e.ring().n, entries.join(", "))
}

/// `d_j(fg)` against `Σ_{a+b=j} d_a(f) d_b(g)`.
pub fn leibniz(seed: u64) -> SuiteReport {
    let mut rng = rng_for("leibniz", seed);
    let mut tally = Tally::new("leibniz", seed);
    for _ in 0..300 {
        let s = rng.gen_range(1..=3);
        let n = rng.gen_range(0..=4);
        let j = rng.gen_range(0..=n);
        let ring = JetRing::new(s, n);
        let base = ring.base_vars();
        let f = random::poly(&mut rng, &base, 4, 3);
        let g = random::poly(&mut rng, &base, 4, 3);
        let mut jets = Jets::new(n);
        let lhs = jets.d(&(&f * &g), j);
        let rhs = (|| {
            let mut acc = Poly::zero();
            for a in 0..=j {
                acc += &(&jets.d(&f, a)? * &jets.d(&g, j - a)?);
            }
            Ok(acc)
        })();
        tally.check(
            || format!("s={s} n={n} j={j} f={f} g={g}"),
            lhs.and_then(|l| rhs.map(|r| (r, l))),
        );
    }
    tally.finish()
}

/// Closed jet formula against `d_j(x^β)` for every `1 ≤ |β| ≤ 5`, `s = 3`, `j ≤ 4`.
pub fn monomial_jets(seed: u64) -> SuiteReport {
    let mut tally = Tally::new("monomial-jets", seed);
    let ring = JetRing::new(3, 4);
    for beta in monomials_up_to(3, 0, 5) {
        let exps: Vec<u32> = (1..=3).map(|i| beta.exponent(JetVar::base_var(i))).collect();
        for j in 0..=4 {
            let sides = d(&Poly::monomial(base_monomial(&exps)), j, &ring)
                .and_then(|direct| Ok((direct, monomial_jet_formula(&exps, j, &ring)?)));
            tally.check(
                || format!("beta={exps:?} j={j} |Gamma|={}", enumerate_gamma(beta.degree(), j).len()),
                sides,
            );
        }
    }
    tally.finish()
}

/// The step-by-step evaluations of the section for `s = 2`, `n = 1`, `m = 2`
/// with random components `E_0`, `E_1`.
pub fn worked_example(seed: u64) -> SuiteReport {
    let mut rng = rng_for("worked-example", seed);
    let mut tally = Tally::new("worked-example", seed);
    let ring = JetRing::new(2, 1);
    let base = JetRing::new(2, 0);
    let vars = ring.vars();
    let p = |t: &str| crate::ratpoly::parse(t).expect("literal");
    for case in 0..20 {
        let e0 = random::mderiv(&mut rng, 2, &base, &vars);
        let e1 = random::mderiv(&mut rng, 2, &base, &vars);
        let e = SeriesDeriv::from_components(2, ring.clone(), &[e0.clone(), e1.clone()]).expect("components");
        let dd = match phi_section(&e) {
            Ok(dd) => dd,
            Err(err) => {
                tally.record(false, || (format!("case {case}"), "a section".into(), err.to_string()));
                continue;
            }
        };
        let ev = |q: &str| dd.eval(&p(q)).expect("A_1 element");
        let comp = |c: &MDeriv, q: &str| c.eval(&p(q)).expect("A element");
        let inputs = || format!("E0={} E1={}", show_table(&e0), show_table(&e1));
        // E(x1)
        tally.eq(inputs, &comp(&e0, "x1"), &ev("x1^(0)"));
        tally.eq(inputs, &comp(&e1, "x1"), &ev("x1^(1)"));
        // E(x1^2): D((x1^(0))^2) and 2 D(x1^(0) x1^(1))
        tally.eq(inputs, &comp(&e0, "x1^2"), &ev("x1^(0)^2"));
        tally.eq(inputs, &comp(&e1, "x1^2"), &ev("2*x1^(0)*x1^(1)"));
        // E(x1 x2): D(x1^(0) x2^(0)) and D(x1^(0) x2^(1) + x1^(1) x2^(0))
        tally.eq(inputs, &comp(&e0, "x1*x2"), &ev("x1^(0)*x2^(0)"));
        tally.eq(inputs, &comp(&e1, "x1*x2"), &ev("x1^(0)*x2^(1) + x1^(1)*x2^(0)"));
        // the whole image agrees with E on the remaining base monomials
        let image = phi_apply(&dd, &ring).expect("domain matches");
        for q in ["x1", "x2", "x1^2", "x1*x2", "x2^2"] {
            let m = crate::ratpoly::parse_monomial(q, crate::ratpoly::VarStyle::Standard).expect("literal");
            let want = e.table_value(&m);
            let got = image.table_value(&m);
            tally.eq(inputs, &ShowSeriesOwned(want), &ShowSeriesOwned(got));
        }
    }
    tally.finish()
}

#[derive(PartialEq)]
struct ShowSeriesOwned(crate::jetring::Series);

impl Display for ShowSeriesOwned {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", ShowSeries(self.0.coeffs()))
    }
}

/// `φ_n(D)`, evaluated from its definition, satisfies the product identity.
pub fn phi_nakai(seed: u64) -> SuiteReport {
    let mut rng = rng_for("phi-nakai", seed);
    let mut tally = Tally::new("phi-nakai", seed);
    for _ in 0..100 {
        let m = rng.gen_range(2..=3);
        let s = rng.gen_range(1..=2);
        let n = rng.gen_range(0..=2);
        let ring = JetRing::new(s, n);
        let dd = random::mderiv(&mut rng, m, &ring, &ring.vars());
        let mut phi = PhiDirect::new(&dd, &ring).expect("domain matches");
        let base = ring.base_vars();
        for _ in 0..20 {
            let xs: Vec<Poly> = (0..=m).map(|_| random::nonzero_poly(&mut rng, &base, 2, 2)).collect();
            let sides = nakai_sides(&mut phi, &xs).map(|(l, r)| (ShowSeriesOwned(r), ShowSeriesOwned(l)));
            tally.check(|| format!("D={} xs={}", show_table(&dd), show_list(&xs)), sides);
        }
    }
    tally.finish()
}

/// `φ_n(section(E)) = E` on base monomials of degree `1..=m`.
pub fn section(seed: u64) -> SuiteReport {
    let mut rng = rng_for("section", seed);
    let mut tally = Tally::new("section", seed);
    let shapes = [(1, 2, 2), (2, 1, 2), (2, 2, 3)];
    for case in 0..100 {
        let (s, n, m) = shapes[case % shapes.len()];
        let ring = JetRing::new(s, n);
        let e = random::series_deriv(&mut rng, m, &ring);
        let back = phi_section(&e).and_then(|dd| phi_apply(&dd, &ring));
        match back {
            Ok(back) => tally.record(back == e, || {
                (show_series_table(&e), show_series_table(&e), show_series_table(&back))
            }),
            Err(err) => tally.record(false, || (show_series_table(&e), "a section".into(), err.to_string())),
        }
    }
    tally.finish()
}

/// Random order-2 operator on `A_n` of `K[x]`, with the constant
/// coefficients of `∂²/∂x_0∂x_j` adjusted so that every quadratic sum
/// vanishes and no first-order term is present.
fn kernel_member<R: Rng>(rng: &mut R, n: u32) -> MDeriv {
    let ring = JetRing::new(1, n);
    let mut spec: Vec<(Monomial, Rational)> = random::operator(rng, 2, &ring, 3)
        .into_iter()
        .filter(|(a, _)| a.degree() == 2)
        .collect();
    let draft = MDeriv::from_partials(2, ring.clone(), &spec).expect("order-2 terms");
    let sums = quadratic_sums(&draft).expect("univariate");
    for (j, sum) in sums.iter().enumerate() {
        let c = sum.as_constant().expect("constant coefficients give constant sums");
        let alpha = Monomial::from_vars([JetVar::new(1, 0), JetVar::new(1, j as u32)]);
        spec.push((alpha, -c / Rational::from_integer(2.into())));
    }
    MDeriv::from_partials(2, ring, &spec).expect("order-2 terms")
}

/// Kernel conditions against the vanishing of `φ_n(D)` on `x` and `x²`.
pub fn kernel(seed: u64) -> SuiteReport {
    let mut rng = rng_for("kernel", seed);
    let mut tally = Tally::new("kernel", seed);
    for case in 0..200 {
        let n = rng.gen_range(0..=3);
        let ring = JetRing::new(1, n);
        let dd = if case % 2 == 0 {
            kernel_member(&mut rng, n)
        } else {
            let terms = rng.gen_range(1..=4);
            let spec = random::operator(&mut rng, 2, &ring, terms);
            MDeriv::from_partials(2, ring.clone(), &spec).expect("order-2 terms")
        };
        let verdict = kernel_membership_m2(&dd).map(|v| v.member);
        let vanishes = phi_apply(&dd, &ring).map(|e| {
            let x = Monomial::var(JetVar::base_var(1));
            let x2 = Monomial::var_pow(JetVar::base_var(1), 2);
            e.table_value(&x).is_zero() && e.table_value(&x2).is_zero()
        });
        match (verdict, vanishes) {
            (Ok(a), Ok(b)) => tally.record(a == b, || {
                (show_table(&dd), format!("phi(D) vanishes: {b}"), format!("kernel conditions: {a}"))
            }),
            (Err(err), _) | (_, Err(err)) => tally.record(false, || (show_table(&dd), "a verdict".into(), err.to_string())),
        }
    }
    tally.finish()
}

/// `φ_n((1/m!) ∂^m/∂x_n^m) = 0` for `m ∈ {2,3}`, `n ∈ {1,2,3}`.
pub fn not_injective(seed: u64) -> SuiteReport {
    let mut tally = Tally::new("not-injective", seed);
    for m in 2..=3 {
        for n in 1..=3 {
            let dd = top_order_pure(m, n);
            let result = phi_apply(&dd, &JetRing::new(1, n));
            match result {
                Ok(e) => tally.record(e.is_zero() && !dd.is_zero(), || {
                    (format!("m={m} n={n}"), "0".into(), show_series_table(&e))
                }),
                Err(err) => tally.record(false, || (format!("m={m} n={n}"), "0".into(), err.to_string())),
            }
        }
    }
    tally.finish()
}

/// For `k = 0..=5`: `D_k` restricts to `D_j` on `A_j`, lies in the kernel,
/// and `φ_k(D_k) = 0`; plus the displayed sums at `j = 2, 3`.
pub fn tower_suite(seed: u64) -> SuiteReport {
    let mut tally = Tally::new("tower", seed);
    for k in 0..=5 {
        let dk = tower(k);
        let compat = tower_compatibility_check(k);
        tally.record(compat.compatible, || {
            let mm = compat.mismatch.clone().expect("mismatch recorded");
            (
                format!("k={k} restricted to A_{} at {}", mm.j, mm.monomial),
                format!("D_{}({}) = {}", mm.j, mm.monomial, mm.lower),
                format!("D_{k}({}) = {}", mm.monomial, mm.upper),
            )
        });
        let member = kernel_membership_m2(&dk).map(|v| v.member).unwrap_or(false);
        tally.record(member, || (format!("k={k}"), "kernel member".into(), "not a member".into()));
        let zero = phi_apply(&dk, &JetRing::new(1, k)).map(|e| e.is_zero()).unwrap_or(false);
        tally.record(zero, || (format!("k={k}"), "phi(D_k) = 0".into(), "nonzero".into()));
    }
    let p = |t: &str| crate::ratpoly::parse(t).expect("literal");
    let int = |v: i64| Poly::constant(Rational::from_integer(v.into()));
    let d2 = tower(2);
    tally.eq(|| "2*D_2(x0*x2)".into(), &int(-1), &d2.eval(&p("2*x1^(0)*x1^(2)")).expect("A_2"));
    tally.eq(|| "D_2(x1^2)".into(), &int(1), &d2.eval(&p("x1^(1)^2")).expect("A_2"));
    let d3 = tower(3);
    tally.eq(|| "2*D_3(x0*x3)".into(), &int(2), &d3.eval(&p("2*x1^(0)*x1^(3)")).expect("A_3"));
    tally.eq(|| "2*D_3(x1*x2)".into(), &int(-2), &d3.eval(&p("2*x1^(1)*x1^(2)")).expect("A_3"));
    tally.finish()
}

/// Closed m=2 formula against the product-identity extension, and the
/// module form of the same expansion.
pub fn closed_m2(seed: u64) -> SuiteReport {
    let mut rng = rng_for("closed-m2", seed);
    let mut tally = Tally::new("closed-m2", seed);
    for case in 0..50 {
        let s = 1 + (case % 2) as u32;
        let ring = JetRing::new(s, 0);
        let codomain: Vec<JetVar> = ring.base_vars();
        let dd = random::mderiv(&mut rng, 2, &ring, &codomain);
        for beta in monomials_up_to(s, 0, 5) {
            tally.check(|| format!("D={} beta={beta}", show_table(&dd)), closed_m2_sides(&beta, &dd));
        }
    }
    for beta in monomials_up_to(2, 0, 5) {
        let (lhs, rhs) = closed_m2_module_sides(&beta);
        tally.record(lhs == rhs, || (format!("module form beta={beta}"), lhs.to_string(), rhs.to_string()));
    }
    tally.finish()
}

/// `∂^α ∘ d_l = d_{l-λ_α} ∘ ∂^{ᾱ}`.
pub fn commute(seed: u64) -> SuiteReport {
    let mut rng = rng_for("commute", seed);
    let mut tally = Tally::new("commute", seed);
    for case in 0..300 {
        let s = rng.gen_range(1..=2);
        let n = rng.gen_range(0..=4);
        let l = rng.gen_range(0..=n);
        let ring = JetRing::new(s, n);
        let alpha = if case % 5 == 0 {
            // single jet variable: the first-order corner
            let v = JetVar::new(rng.gen_range(1..=s), rng.gen_range(0..=l));
            Monomial::var(v)
        } else {
            random::jet_index(&mut rng, &ring, 3, l)
        };
        let f = random::poly(&mut rng, &ring.base_vars(), 4, 3);
        let idx = JetIndex(alpha.clone());
        tally.check(|| format!("s={s} n={n} l={l} alpha={alpha} f={f}"), commute_check(&idx, l, &f, &ring));
    }
    tally.finish()
}

/// The element `F` of the tensor presentation: certificate for its image,
/// and the bounded search against the tensor relation rows.
pub fn tensor_example_suite(seed: u64) -> SuiteReport {
    let mut tally = Tally::new("tensor-example", seed);
    match tensor_example::verify_certificate() {
        Ok(cert) => tally.record(cert.holds, || {
            ("phi(F)".into(), cert.combination.to_string(), cert.image.to_string())
        }),
        Err(err) => tally.record(false, || ("phi(F)".into(), "certificate".into(), err.to_string())),
    }
    match tensor_example::nonmembership(2) {
        Ok(result) => tally.record(result.relations_only == Membership::Infeasible, || {
            ("F against f_beta rows, degree 2".into(), "infeasible".into(), "feasible".into())
        }),
        Err(err) => tally.record(false, || ("F".into(), "infeasible".into(), err.to_string())),
    }
    tally.finish()
}

/// Factor-order independence of the product-identity extension.
pub fn permutation(seed: u64) -> SuiteReport {
    let mut rng = rng_for("permutation", seed);
    let mut tally = Tally::new("permutation", seed);
    for case in 0..200 {
        let m = 2 + (case % 2) as u32;
        let s = rng.gen_range(1..=2);
        let n = rng.gen_range(0..=1);
        let ring = JetRing::new(s, n);
        let dd = random::mderiv(&mut rng, m, &ring, &ring.vars());
        let degree = rng.gen_range(m + 1..=m + 4);
        let mono = random::monomial(&mut rng, &ring.vars(), degree);
        let canonical = dd.eval(&Poly::monomial(mono.clone())).expect("domain monomial");
        for _ in 0..2 {
            let mut factors = mono.factors();
            factors.shuffle(&mut rng);
            let permuted = dd.evaluator().ordered(&factors);
            tally.check(
                || format!("D={} factors={factors:?}", show_table(&dd)),
                permuted.map(|p| (canonical.clone(), p)),
            );
        }
    }
    tally.finish()
}

/// Runs one suite by name; `None` for an unknown name.
pub fn run_suite(name: &str, seed: u64) -> Option<SuiteReport> {
    Some(match name {
        "leibniz" => leibniz(seed),
        "monomial-jets" => monomial_jets(seed),
        "worked-example" => worked_example(seed),
        "phi-nakai" => phi_nakai(seed),
        "section" => section(seed),
        "kernel" => kernel(seed),
        "not-injective" => not_injective(seed),
        "tower" => tower_suite(seed),
        "closed-m2" => closed_m2(seed),
        "commute" => commute(seed),
        "tensor-example" => tensor_example_suite(seed),
        "permutation" => permutation(seed),
        _ => return None,
    })
}

pub fn run_all(seed: u64) -> Vec<SuiteReport> {
    SUITES
        .iter()
        .map(|name| run_suite(name, seed).expect("listed suite"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite() {
        assert!(run_suite("nope", 1).is_none());
    }

    #[test]
    fn reports_are_reproducible() {
        assert_eq!(commute(7), commute(7));
        assert_eq!(leibniz(7).cases, 300);
    }

    #[test]
    fn generated_kernel_members_are_members() {
        let mut rng = rng_for("kernel", 3);
        for n in 0..=3 {
            let dd = kernel_member(&mut rng, n);
            assert!(kernel_membership_m2(&dd).unwrap().member);
            assert!(phi_apply(&dd, &JetRing::new(1, n)).unwrap().is_zero());
        }
    }

    #[test]
    fn tower_reports_the_first_mismatch() {
        let report = tower_suite(DEFAULT_SEED);
        let failure = report.first_failure.expect("k = 3 is not compatible");
        assert!(failure.inputs.starts_with("k=3"));
    }
}
