//! The element `F = 2 (dx_2)^2 ⊗ x_1^(0) x_1^(1) + ½ (dx_2)^2 ⊗ (x_1^(0))^2 t^{-1}`
//! of `Ω^(2)_A ⊗ P_1` for `A = K[x_1, x_2]/(x_1 x_2)`, whose image under
//! `φ_1^∨` lies in the relation module of `Ω^(2)_{A_1}`.

use super::{
    bounded_nonmembership, phi_vee, DiffElement, DiffPresentation, Membership, TensorElement, TensorGen,
    TensorPresentation,
};
use crate::error::Result;
use crate::jetring::JetRing;
use crate::ratpoly::{parse, JetVar, Monomial, Poly};

pub fn example_ring() -> JetRing {
    JetRing::with_relations(2, 1, vec![parse("x1*x2").expect("literal")]).expect("base relation")
}

pub fn example_element() -> TensorElement {
    let sq = Monomial::var_pow(JetVar::base_var(2), 2);
    TensorElement::from_terms([
        (TensorGen::new(sq.clone(), 0), parse("2*x1^(0)*x1^(1)").expect("literal")),
        (TensorGen::new(sq, 1), parse("1/2*x1^(0)^2").expect("literal")),
    ])
}

/// The symbol `d(x_2^(0))` used as the row multiplier `β_1`.
pub fn beta_one() -> Monomial {
    Monomial::var(JetVar::base_var(2))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub element: TensorElement,
    /// `φ_1^∨(F)`.
    pub image: DiffElement,
    /// `(dx_2^(0)) d^2(f_1)`, `f_1 = x_1^(0) x_2^(0)`.
    pub f1_row: DiffElement,
    /// `(dx_2^(0)) d^2(f_2)`, `f_2 = x_1^(0) x_2^(1) + x_1^(1) x_2^(0)`.
    pub f2_row: DiffElement,
    /// `x_1^(1) F^1 + x_1^(0) F^2`.
    pub combination: DiffElement,
    /// `image - combination`, a free-module element with coefficients in
    /// the jet ideal.
    pub residual: DiffElement,
    /// `(symbol, h_1, h_2)` with `residual = Σ (h_1 f_1 + h_2 f_2) · symbol`.
    pub ideal_multipliers: Vec<(Monomial, Poly, Poly)>,
    /// The image equals the combination modulo the jet ideal, as witnessed
    /// by `ideal_multipliers`.
    pub holds: bool,
}

/// Computes `φ_1^∨(F)`, the combination `x_1^(1) F^1 + x_1^(0) F^2`, and an
/// explicit witness that their difference has all coefficients in the jet
/// ideal `(f_1, f_2)`.
pub fn verify_certificate() -> Result<Certificate> {
    let ring = example_ring();
    let element = example_element();
    let image = phi_vee(&element, &ring)?;
    let pres = DiffPresentation::of_jet_ring(&ring, 2);
    let f1_row = pres.relation(0, &beta_one());
    let f2_row = pres.relation(1, &beta_one());
    let mut combination = DiffElement::zero();
    combination.add_mul(&parse("x1^(1)").expect("literal"), &f1_row);
    combination.add_mul(&parse("x1^(0)").expect("literal"), &f2_row);
    let residual = image.sub(&combination);

    let keys: Vec<Monomial> = residual.keys().cloned().collect();
    let mut rows = Vec::new();
    for key in &keys {
        for g in &pres.ideal {
            rows.push(DiffElement::term(key.clone(), g.clone()));
        }
    }
    let (ideal_multipliers, holds) = match bounded_nonmembership(&residual, &rows, &pres.vars, 2) {
        Membership::Feasible(g) => {
            let mults = keys
                .iter()
                .enumerate()
                .map(|(idx, key)| (key.clone(), g[2 * idx].clone(), g[2 * idx + 1].clone()))
                .collect();
            (mults, true)
        }
        Membership::Infeasible => (Vec::new(), false),
    };
    Ok(Certificate {
        element,
        image,
        f1_row,
        f2_row,
        combination,
        residual,
        ideal_multipliers,
        holds,
    })
}

/// Searches for `φ_1^∨(e)` inside the relation module of `Ω^(2)_{A_1}`,
/// including the coefficient rows of the jet ideal.
pub fn image_in_relations(e: &TensorElement, degree: u32) -> Result<Membership> {
    let ring = example_ring();
    let pres = DiffPresentation::of_jet_ring(&ring, 2);
    let image = phi_vee(e, &ring)?;
    let mut rows = pres.relations.clone();
    rows.extend(pres.coefficient_rows());
    Ok(bounded_nonmembership(&image, &rows, &pres.vars, degree))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonMembership {
    pub degree: u32,
    /// Against the rows `f_β ⊗ 1`, `f_β ⊗ t^{-1}` alone.
    pub relations_only: Membership,
    /// Against those rows together with `g · generator` for `g` in the
    /// jet ideal, i.e. with coefficients taken in `A_1` itself.
    pub with_coefficient_ideal: Membership,
    /// Number of rows of each kind, in the order of the returned vectors.
    pub relation_rows: usize,
    pub coefficient_rows: usize,
}

/// Bounded-degree search for `F` in the relation module of the tensor
/// presentation.
pub fn nonmembership(degree: u32) -> Result<NonMembership> {
    let ring = example_ring();
    let pres = TensorPresentation::new(&ring, 2)?;
    let target = example_element();
    let vars = ring.vars();
    let relations_only = bounded_nonmembership(&target, &pres.relations, &vars, degree);
    let coeff_rows = pres.coefficient_rows();
    let mut all = pres.relations.clone();
    all.extend(coeff_rows.iter().cloned());
    let with_coefficient_ideal = bounded_nonmembership(&target, &all, &vars, degree);
    Ok(NonMembership {
        degree,
        relations_only,
        with_coefficient_ideal,
        relation_rows: pres.relations.len(),
        coefficient_rows: coeff_rows.len(),
    })
}
