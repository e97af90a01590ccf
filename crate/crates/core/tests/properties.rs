use hsjet::jetring::{enumerate_gamma, gamma_to_alpha, JetRing, Jets, Series};
use hsjet::mderiv::{nakai_check, Derivation, MDeriv};
use hsjet::phimap::{phi_apply, PhiDirect};
use hsjet::ratpoly::{int, parse, rat, JetVar, Monomial, Poly, Rational};
use proptest::prelude::*;

fn coeff() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(p, q)| rat(p, q))
}

/// Polynomials in the variables of `ring`, exponents `≤ 2` per variable.
fn poly_in(vars: Vec<JetVar>, max_terms: usize) -> impl Strategy<Value = Poly> {
    let k = vars.len();
    prop::collection::vec((coeff(), prop::collection::vec(0u32..=2, k)), 0..=max_terms).prop_map(move |terms| {
        Poly::from_terms(terms.into_iter().map(|(c, exps)| {
            (c, Monomial::from_pairs(vars.iter().copied().zip(exps)))
        }))
    })
}

fn small_ring() -> impl Strategy<Value = JetRing> {
    (1u32..=2, 0u32..=2).prop_map(|(s, n)| JetRing::new(s, n))
}

fn ring_and_polys(count: usize) -> impl Strategy<Value = (JetRing, Vec<Poly>)> {
    small_ring().prop_flat_map(move |ring| {
        let polys = prop::collection::vec(poly_in(ring.vars(), 3), count);
        (Just(ring), polys)
    })
}

fn base_ring_and_polys(count: usize) -> impl Strategy<Value = (JetRing, Vec<Poly>)> {
    small_ring().prop_flat_map(move |ring| {
        let polys = prop::collection::vec(poly_in(ring.base_vars(), 3), count);
        (Just(ring), polys)
    })
}

/// Table of an order-`m` derivation with values in the same ring.
fn mderiv_in(ring: JetRing, order: u32) -> impl Strategy<Value = MDeriv> {
    let keys = hsjet::ratpoly::monomials_up_to(ring.s, ring.n, order);
    let values = prop::collection::vec(prop::option::weighted(0.5, poly_in(ring.vars(), 2)), keys.len());
    values.prop_map(move |vals| {
        let entries = keys.iter().cloned().zip(vals).filter_map(|(k, v)| v.map(|v| (k, v)));
        MDeriv::from_table(order, ring.clone(), entries).unwrap()
    })
}

/// `∂/∂v` applied term by term.
fn single_partial(f: &Poly, v: JetVar) -> Poly {
    Poly::from_terms(f.terms().filter_map(|(m, c)| {
        let e = m.exponent(v);
        (e > 0).then(|| (c * int(i64::from(e)), m.div(&Monomial::var(v)).unwrap()))
    }))
}

/// `γ^#` by substituting `x_i ↦ Σ_j x_i^(j) t^j` and multiplying series.
fn substitution_oracle(f: &Poly, n: u32) -> Series {
    let mut out = Series::zero(n);
    for (m, c) in f.terms() {
        let mut term = Series::constant(Poly::constant(c.clone()), n);
        for (v, e) in m.iter() {
            let sub = Series::from_coeffs((0..=n).map(|j| Poly::var(v.with_order(j))).collect());
            for _ in 0..e {
                term = &term * &sub;
            }
        }
        out = &out + &term;
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn printed_polynomials_parse_back((_, ps) in ring_and_polys(1)) {
        let text = ps[0].to_string();
        prop_assert_eq!(parse(&text).unwrap(), ps[0].clone());
    }

    #[test]
    fn ring_axioms((_, ps) in ring_and_polys(3)) {
        let (a, b, c) = (&ps[0], &ps[1], &ps[2]);
        prop_assert_eq!(a * b, b * a);
        prop_assert_eq!(&(a * b) * c, a * &(b * c));
        prop_assert_eq!(a * &(b + c), &(a * b) + &(a * c));
        prop_assert_eq!(&(a + b) - b, a.clone());
        prop_assert_eq!(a * &Poly::one(), a.clone());
    }

    #[test]
    fn partials_match_repeated_single_derivatives(
        (ring, ps) in ring_and_polys(1),
        picks in prop::collection::vec(any::<prop::sample::Index>(), 0..=3),
    ) {
        let vars = ring.vars();
        let chosen: Vec<JetVar> = picks.iter().map(|i| vars[i.index(vars.len())]).collect();
        let alpha = Monomial::from_vars(chosen.iter().copied());
        let mut oracle = ps[0].clone();
        for v in &chosen {
            oracle = single_partial(&oracle, *v);
        }
        prop_assert_eq!(ps[0].partial(&alpha), oracle.clone());
        let divided = oracle.scale(&Rational::from_integer(alpha.factorial()).recip());
        prop_assert_eq!(ps[0].divided_partial(&alpha), divided);
        let mut reversed = ps[0].clone();
        for v in chosen.iter().rev() {
            reversed = single_partial(&reversed, *v);
        }
        prop_assert_eq!(reversed, oracle);
    }

    #[test]
    fn jets_match_substitution((ring, ps) in base_ring_and_polys(1)) {
        let mut jets = Jets::new(ring.n);
        prop_assert_eq!(jets.gamma_sharp(&ps[0]).unwrap(), substitution_oracle(&ps[0], ring.n));
    }

    #[test]
    fn gamma_sharp_is_multiplicative((ring, ps) in base_ring_and_polys(2)) {
        let mut jets = Jets::new(ring.n);
        let fg = jets.gamma_sharp(&(&ps[0] * &ps[1])).unwrap();
        let f = jets.gamma_sharp(&ps[0]).unwrap();
        let g = jets.gamma_sharp(&ps[1]).unwrap();
        prop_assert_eq!(fg, &f * &g);
        prop_assert_eq!(jets.gamma_sharp(&Poly::one()).unwrap(), Series::one(ring.n));
    }

    #[test]
    fn compositions_keep_degree_and_weight(beta in prop::collection::vec(0u32..=3, 1..=3), j in 0u32..=5) {
        let parts: u32 = beta.iter().sum();
        for gamma in enumerate_gamma(parts, j) {
            prop_assert_eq!(gamma.iter().sum::<u32>(), j);
            prop_assert!(gamma.iter().all(|&g| g != j));
            let alpha = gamma_to_alpha(&gamma, &beta);
            prop_assert_eq!(alpha.degree(), parts);
            prop_assert_eq!(alpha.weight(), j);
        }
    }

    #[test]
    fn derivation_is_linear(
        (d, ps, a, b) in small_ring().prop_flat_map(|ring| (
            mderiv_in(ring.clone(), 2),
            prop::collection::vec(poly_in(ring.vars(), 3), 2),
            coeff(),
            coeff(),
        ))
    ) {
        let combo = &ps[0].scale(&a) + &ps[1].scale(&b);
        let lhs = d.eval(&combo).unwrap();
        let rhs = &d.eval(&ps[0]).unwrap().scale(&a) + &d.eval(&ps[1]).unwrap().scale(&b);
        prop_assert_eq!(lhs, rhs);
        prop_assert!(d.eval(&Poly::one()).unwrap().is_zero());
    }

    #[test]
    fn extension_satisfies_product_identity(
        (d, xs) in small_ring().prop_flat_map(|ring| (
            mderiv_in(ring.clone(), 2),
            prop::collection::vec(poly_in(ring.vars(), 2), 3),
        ))
    ) {
        prop_assert!(nakai_check(&mut d.evaluator(), &xs).unwrap());
    }

    #[test]
    fn operator_tables_extend_to_the_operator(
        (ring, spec, ps) in small_ring().prop_flat_map(|ring| {
            let vars = ring.vars();
            let alpha = prop::collection::vec(prop::sample::select(vars.clone()), 1..=2)
                .prop_map(Monomial::from_vars);
            (
                Just(ring.clone()),
                prop::collection::vec((alpha, coeff()), 0..=3),
                prop::collection::vec(poly_in(vars, 3), 1),
            )
        })
    ) {
        let d = MDeriv::from_partials(2, ring, &spec).unwrap();
        let mut direct = Poly::zero();
        for (alpha, c) in &spec {
            direct.add_scaled(c, &ps[0].partial(alpha));
        }
        prop_assert_eq!(d.eval(&ps[0]).unwrap(), direct);
    }

    #[test]
    fn phi_is_linear_over_the_jet_ring(
        (ring, d, g, f) in small_ring().prop_flat_map(|ring| (
            Just(ring.clone()),
            mderiv_in(ring.clone(), 2),
            poly_in(ring.vars(), 2),
            poly_in(ring.base_vars(), 3),
        ))
    ) {
        let scaled = d.scale_by(&g);
        let lhs = PhiDirect::new(&scaled, &ring).unwrap().apply(&f).unwrap();
        let rhs = PhiDirect::new(&d, &ring).unwrap().apply(&f).unwrap().scale_poly(&g);
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(phi_apply(&scaled, &ring).unwrap(), phi_apply(&d, &ring).unwrap().scale_by(&g));
    }
}
