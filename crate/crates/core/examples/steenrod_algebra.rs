//! Adem relations, products, conjugation and the coproduct in the admissible basis.
//!
//! Usage: `cargo run --example steenrod_algebra -- [max_degree]`

use plcob::steenrod::{
    adem_reduce, admissible_monomials, conjugate, coproduct, product, FiniteSubalgebra,
    SteenrodElement,
};

fn main() {
    let max: u32 = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(8);
    for d in 0..=max {
        let basis: Vec<String> = admissible_monomials(d)
            .iter()
            .map(ToString::to_string)
            .collect();
        println!("degree {d:2}: {}", basis.join(", "));
    }
    println!("Sq2 Sq2 = {}", adem_reduce(&[2, 2]));
    println!(
        "Sq1 · Sq2 Sq1 = {}",
        product(&SteenrodElement::sq(1), &adem_reduce(&[2, 1]))
    );
    println!("χ(Sq4) = {}", conjugate(&SteenrodElement::sq(4)));
    let terms: Vec<String> = coproduct(3)
        .iter()
        .map(|(l, r)| format!("{l} ⊗ {r}"))
        .collect();
    println!("Δ Sq3 = {}", terms.join(" + "));
    for n in 0..=2 {
        let a = FiniteSubalgebra::get(n);
        println!(
            "A({n}): dimension {}, top degree {}",
            a.total_dimension(),
            a.top_degree()
        );
    }
}
