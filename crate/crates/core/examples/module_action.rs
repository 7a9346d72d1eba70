//! Builds a small A(1)-module by hand, checks its relations and prints the
//! action of every algebra element; then loads the bundled cpl module.

use plcob::cpl::{cpl_module, CPL_MAX_DEGREE};
use plcob::f2::F2Vector;
use plcob::module::{FPModule, Side};
use plcob::steenrod::{FiniteSubalgebra, SubalgebraId};

fn main() {
    // The "question mark" x0, Sq1 x0 = x1, Sq2 x1 = x3.
    let mut m = FPModule::new(SubalgebraId::Level(1), Side::Left).unwrap();
    for (name, d) in [("x0", 0), ("x1", 1), ("x3", 3)] {
        m.add_basis(name, d).unwrap();
    }
    m.set_action(1, "x0", &["x1"]).unwrap();
    m.set_action(2, "x1", &["x3"]).unwrap();
    m.check_relations().expect("a module over A(1)");
    let alg = FiniteSubalgebra::get(1);
    for d in 1..=alg.top_degree() {
        for a in alg.basis(d) {
            let image = m.act(a, &F2Vector::unit(m.len(), 0)).unwrap();
            if !image.is_zero() {
                let names: Vec<&str> = image
                    .iter_ones()
                    .map(|i| m.basis()[i].name.as_str())
                    .collect();
                println!("{a} x0 = {}", names.join(" + "));
            }
        }
    }
    println!("{}", m.to_toml());

    let cpl = cpl_module(CPL_MAX_DEGREE).unwrap();
    println!(
        "cpl: {} basis elements, dims {:?}",
        cpl.len(),
        cpl.dims().dims()
    );
}
