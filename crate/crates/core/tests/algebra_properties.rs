//! Steenrod algebra identities against the Milnor-basis and closure oracles.

mod common;

use common::properties;

#[test]
fn milnor_model_is_faithful() {
    properties::milnor_model_is_faithful(20).unwrap();
}

#[test]
fn adem_reduction_matches_milnor_products() {
    properties::adem_matches_milnor(20).unwrap();
}

#[test]
fn admissible_products_match_milnor_products() {
    properties::products_match_milnor(12).unwrap();
}

#[test]
fn conjugation_is_an_anti_involution() {
    properties::conjugation_properties(12).unwrap();
}

#[test]
fn coproduct_is_cartan_multiplicative_and_coassociative() {
    properties::coproduct_properties(8).unwrap();
}

#[test]
fn subalgebra_dimensions_by_closure() {
    properties::subalgebra_dimensions().unwrap();
}

#[test]
fn milnor_model_anchor_values() {
    use common::milnor::Milnor;
    let single = |r: &[u32]| Milnor([r.to_vec()].into_iter().collect());
    // Sq^2 Sq^2 = Sq^3 Sq^1 = Sq(1,1).
    assert_eq!(Milnor::word(&[2, 2]), single(&[1, 1]));
    // Sq^1 Sq^1 = 0.
    assert_eq!(Milnor::word(&[1, 1]), Milnor::default());
    // Sq^1 Sq^2 = Sq(3).
    assert_eq!(Milnor::word(&[1, 2]), single(&[3]));
}
