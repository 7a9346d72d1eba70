//! The dimension bookkeeping for C^*(PL) through degree 11.

use plcob::cpl::{cpl_dims, v_dims, CPL_MAX_DEGREE};

fn main() {
    let dec = v_dims(CPL_MAX_DEGREE).expect("bounds cover the range");
    let rows = [
        ("V1", &dec.v1),
        ("H(K1)", &dec.h_k1),
        ("E(R2)", &dec.e_r2),
        ("Gamma", &dec.gamma),
        ("V", &dec.v),
        ("H(K)", &dec.h_k),
    ];
    for (name, dims) in rows {
        println!("{name:>6}: {:?}", dims.dims());
    }
    println!(
        "{:>6}: {:?}",
        "C(PL)",
        cpl_dims(CPL_MAX_DEGREE).unwrap().dims()
    );
    for range in &dec.provenance {
        println!("zero range used: {range:?}");
    }
}
