//! Row reduction, kernels and solving over F₂.

use plcob::f2::{F2Matrix, F2Vector};

fn main() {
    let m = F2Matrix::from_bit_rows(&["1101", "0111", "1010"]);
    println!("rank {}", m.rank());
    for v in m.kernel_basis() {
        println!("kernel vector {v:?}, image {:?}", m.mul_vec(&v));
    }
    let b = F2Vector::from_ones(3, [0, 2]);
    match m.solve(&b) {
        Some(x) => println!("m x = b for x = {x:?}"),
        None => println!("b is not in the column space"),
    }
}
