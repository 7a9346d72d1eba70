//! Serre generators of H^*(K(π, n); F₂) and Poincaré series of products.
//!
//! Usage: `cargo run --example serre_dims -- [max_degree]`

use plcob::graded::{em_dims, k1_factors, product_em_dims, serre_generators, EMSpaceSpec};

fn main() {
    let max: u32 = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(11);
    for spec in [EMSpaceSpec::mod2(2), EMSpaceSpec::integral(4)] {
        let gens = serre_generators(spec, max);
        println!("{spec}: generators in degrees {:?}", gens.degrees());
        println!("{spec}: dims {:?}", em_dims(spec, max).dims());
    }
    let k1 = k1_factors(max);
    let names: Vec<String> = k1.iter().map(ToString::to_string).collect();
    println!(
        "{}: dims {:?}",
        names.join(" × "),
        product_em_dims(&k1, max).dims()
    );
}
