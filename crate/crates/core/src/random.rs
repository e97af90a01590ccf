//! Seeded generators for the randomized identity suites.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::jetring::{JetRing, Series};
use crate::mderiv::{MDeriv, SeriesDeriv};
use crate::ratpoly::{monomials_in, monomials_up_to, JetVar, Monomial, Poly, Rational};

/// Small nonzero rational `p/q` with `|p| ≤ 5`, `1 ≤ q ≤ 4`.
pub fn rational<R: Rng>(rng: &mut R) -> Rational {
    let mut p: i64 = rng.gen_range(1..=5);
    if rng.gen_bool(0.5) {
        p = -p;
    }
    let q: i64 = rng.gen_range(1..=4);
    Rational::new(p.into(), q.into())
}

/// Random monomial of degree exactly `degree` in `vars`.
pub fn monomial<R: Rng>(rng: &mut R, vars: &[JetVar], degree: u32) -> Monomial {
    Monomial::from_vars((0..degree).map(|_| *vars.choose(rng).expect("at least one variable")))
}

/// Up to `max_terms` terms of degree `0..=max_degree`.
pub fn poly<R: Rng>(rng: &mut R, vars: &[JetVar], max_degree: u32, max_terms: usize) -> Poly {
    let terms = rng.gen_range(1..=max_terms);
    Poly::from_terms((0..terms).map(|_| {
        let degree = rng.gen_range(0..=max_degree);
        (rational(rng), monomial(rng, vars, degree))
    }))
}

/// Like [`poly`] but never zero.
pub fn nonzero_poly<R: Rng>(rng: &mut R, vars: &[JetVar], max_degree: u32, max_terms: usize) -> Poly {
    loop {
        let p = poly(rng, vars, max_degree, max_terms);
        if !p.is_zero() {
            return p;
        }
    }
}

/// Random table on monomials of degree `1..=order` of `domain`, each entry
/// present with probability one half, with values of degree `≤ 1` in the
/// variables of `codomain`.
pub fn mderiv<R: Rng>(rng: &mut R, order: u32, domain: &JetRing, codomain: &[JetVar]) -> MDeriv {
    let mut entries = Vec::new();
    for m in monomials_up_to(domain.s, domain.n, order) {
        if rng.gen_bool(0.5) {
            entries.push((m, poly(rng, codomain, 1, 2)));
        }
    }
    MDeriv::from_table(order, domain.clone(), entries).expect("keys drawn from the domain")
}

/// Random `E : A → A_n ⊗ B_n` on base monomials of degree `1..=order`.
pub fn series_deriv<R: Rng>(rng: &mut R, order: u32, ring: &JetRing) -> SeriesDeriv {
    let vars = ring.vars();
    let entries: Vec<(Monomial, Series)> = monomials_up_to(ring.s, 0, order)
        .into_iter()
        .map(|m| {
            let coeffs = (0..=ring.n)
                .map(|_| if rng.gen_bool(0.7) { poly(rng, &vars, 1, 2) } else { Poly::zero() })
                .collect();
            (m, Series::from_coeffs(coeffs))
        })
        .collect();
    SeriesDeriv::from_table(order, ring.clone(), entries).expect("keys are base monomials")
}

/// Random constant-coefficient operator `Σ c_α ∂^α` with `1 ≤ |α| ≤ order`.
pub fn operator<R: Rng>(rng: &mut R, order: u32, domain: &JetRing, terms: usize) -> Vec<(Monomial, Rational)> {
    let alphas = monomials_in(&domain.vars(), 1, order);
    (0..terms)
        .map(|_| (alphas.choose(rng).expect("nonempty").clone(), rational(rng)))
        .collect()
}

/// Jet multi-index over `A_n` with `|α| ≤ max_degree` and weight `≤ max_weight`.
pub fn jet_index<R: Rng>(rng: &mut R, ring: &JetRing, max_degree: u32, max_weight: u32) -> Monomial {
    loop {
        let degree = rng.gen_range(0..=max_degree);
        let m = monomial(rng, &ring.vars(), degree);
        let weight: u32 = m.iter().map(|(v, e)| v.order * e).sum();
        if weight <= max_weight {
            return m;
        }
    }
}
