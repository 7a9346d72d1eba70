//! Algebra property checks; each returns the first counterexample.

use std::collections::BTreeSet;

use plcob::f2::{F2Matrix, F2Vector};
use plcob::steenrod::{
    adem_reduce, admissible_monomials, conjugate, coproduct, coproduct_element, product,
    AdmissibleMonomial, FiniteSubalgebra, SteenrodElement, TensorElement,
};

use super::milnor::Milnor;
use super::ClosureAlgebra;

fn to_milnor(x: &SteenrodElement) -> Milnor {
    let mut out = Milnor::default();
    for m in x.terms() {
        out.add(&Milnor::word(m.exponents()));
    }
    out
}

fn element(m: &AdmissibleMonomial) -> SteenrodElement {
    SteenrodElement::from(m.clone())
}

/// The admissible basis maps to linearly independent Milnor sums, so the
/// Milnor model is faithful in these degrees.
pub fn milnor_model_is_faithful(max: u32) -> Result<(), String> {
    for d in 0..=max {
        let images: Vec<Milnor> = admissible_monomials(d)
            .iter()
            .map(|m| Milnor::word(m.exponents()))
            .collect();
        let support: Vec<&Vec<u32>> = images
            .iter()
            .flat_map(|x| x.0.iter())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let rows = images
            .iter()
            .map(|x| {
                F2Vector::from_ones(
                    support.len(),
                    x.0.iter().map(|r| support.binary_search(&r).unwrap()),
                )
            })
            .collect();
        let rank = F2Matrix::from_rows(rows, support.len()).rank();
        if rank != images.len() {
            return Err(format!(
                "degree {d}: admissible images have rank {rank} of {}",
                images.len()
            ));
        }
    }
    Ok(())
}

/// `Sq^a Sq^b` reduced by Adem relations equals the Milnor product.
pub fn adem_matches_milnor(max: u32) -> Result<(), String> {
    for a in 0..=max {
        for b in 0..=max - a {
            let reduced = adem_reduce(&[a, b]);
            if to_milnor(&reduced) != Milnor::sq(a).mul(&Milnor::sq(b)) {
                return Err(format!("Sq{a} Sq{b} reduces to {reduced}"));
            }
        }
    }
    Ok(())
}

/// `product` agrees with the Milnor model on pairs of admissible monomials.
pub fn products_match_milnor(max: u32) -> Result<(), String> {
    for da in 0..=max {
        for db in 0..=max - da {
            for a in admissible_monomials(da) {
                for b in admissible_monomials(db) {
                    let p = product(&element(&a), &element(&b));
                    let expected = Milnor::word(a.exponents()).mul(&Milnor::word(b.exponents()));
                    if to_milnor(&p) != expected {
                        return Err(format!("{a} · {b} = {p}"));
                    }
                }
            }
        }
    }
    Ok(())
}

/// `χ` is an involution and an anti-homomorphism, and satisfies
/// `Σ Sq^i χ(Sq^{k-i}) = 0` for `k > 0`.
pub fn conjugation_properties(max: u32) -> Result<(), String> {
    for k in 1..=max {
        let mut sum = SteenrodElement::zero(k);
        for i in 0..=k {
            sum.add_assign(&product(
                &SteenrodElement::sq(i),
                &conjugate(&SteenrodElement::sq(k - i)),
            ));
        }
        if !sum.is_zero() {
            return Err(format!("Σ Sq^i χ(Sq^({k}-i)) = {sum}"));
        }
    }
    for d in 0..=max {
        for m in admissible_monomials(d) {
            let x = element(&m);
            if conjugate(&conjugate(&x)) != x {
                return Err(format!("χχ({m}) ≠ {m}"));
            }
        }
    }
    for da in 0..=max {
        for db in 0..=max - da {
            for a in admissible_monomials(da) {
                for b in admissible_monomials(db) {
                    let (x, y) = (element(&a), element(&b));
                    let lhs = conjugate(&product(&x, &y));
                    let rhs = product(&conjugate(&y), &conjugate(&x));
                    if lhs != rhs {
                        return Err(format!("χ({a} · {b}) ≠ χ({b}) χ({a})"));
                    }
                }
            }
        }
    }
    Ok(())
}

type Triple = (AdmissibleMonomial, AdmissibleMonomial, AdmissibleMonomial);

fn toggle(set: &mut BTreeSet<Triple>, t: Triple) {
    if !set.remove(&t) {
        set.insert(t);
    }
}

/// Cartan formula on `Sq^k`, multiplicativity of `Δ` and coassociativity.
pub fn coproduct_properties(max: u32) -> Result<(), String> {
    for k in 0..=max {
        let mut expected = TensorElement::zero();
        for i in 0..=k {
            expected.add_product(&SteenrodElement::sq(i), &SteenrodElement::sq(k - i));
        }
        let mut cartan = TensorElement::zero();
        for (l, r) in coproduct(k) {
            cartan.add_product(&l, &r);
        }
        if cartan != expected || coproduct_element(&SteenrodElement::sq(k)) != expected {
            return Err(format!("Δ Sq{k} is not Σ Sq^i ⊗ Sq^({k}-i)"));
        }
    }
    for da in 0..=max {
        for db in 0..=max - da {
            for a in admissible_monomials(da) {
                for b in admissible_monomials(db) {
                    let (x, y) = (element(&a), element(&b));
                    let lhs = coproduct_element(&product(&x, &y));
                    let rhs = coproduct_element(&x).mul(&coproduct_element(&y));
                    if lhs != rhs {
                        return Err(format!("Δ({a} · {b}) ≠ Δ({a}) Δ({b})"));
                    }
                }
            }
        }
    }
    for d in 0..=max {
        for m in admissible_monomials(d) {
            let delta = coproduct_element(&element(&m));
            let mut left = BTreeSet::new();
            let mut right = BTreeSet::new();
            for (a, b) in delta.terms() {
                for (a1, a2) in coproduct_element(&element(a)).terms() {
                    toggle(&mut left, (a1.clone(), a2.clone(), b.clone()));
                }
                for (b1, b2) in coproduct_element(&element(b)).terms() {
                    toggle(&mut right, (a.clone(), b1.clone(), b2.clone()));
                }
            }
            if left != right {
                return Err(format!("Δ is not coassociative on {m}"));
            }
        }
    }
    Ok(())
}

/// `dim A(n)` from the generator closure agrees with the library's basis.
pub fn subalgebra_dimensions() -> Result<(), String> {
    for (n, expected) in [(0, 2), (1, 8), (2, 64)] {
        let alg = ClosureAlgebra::new(n);
        let lib = FiniteSubalgebra::get(n);
        let (closure, library) = (alg.total_dim(), lib.total_dimension());
        if closure != expected || library != expected {
            return Err(format!(
                "A({n}): closure {closure}, library {library}, expected {expected}"
            ));
        }
        for d in 0..=lib.top_degree() {
            if alg.dim(d) != lib.dimension(d) {
                return Err(format!("A({n}) in degree {d}"));
            }
        }
    }
    Ok(())
}

/// Every check of the algebra property suite.
pub fn all() -> Vec<(&'static str, Result<(), String>)> {
    vec![
        (
            "milnor model faithful through degree 20",
            milnor_model_is_faithful(20),
        ),
        (
            "Adem reduction of Sq^a Sq^b, a + b <= 20",
            adem_matches_milnor(20),
        ),
        (
            "products of admissible monomials through degree 12",
            products_match_milnor(12),
        ),
        ("conjugation through degree 12", conjugation_properties(12)),
        (
            "Cartan and coassociativity through degree 8",
            coproduct_properties(8),
        ),
        (
            "dim A(1) = 8 and dim A(2) = 64 by closure",
            subalgebra_dimensions(),
        ),
    ]
}
