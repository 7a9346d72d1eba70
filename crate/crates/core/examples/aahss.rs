//! Algebraic AHSS for Ext_{A(2)}(cpl) from Ext_{A(2)}(F₂) ⊗ cpl, compared
//! with the direct resolution before and after one d2.

use plcob::chart::Window;
use plcob::cpl::{cpl_module, CPL_MAX_DEGREE};
use plcob::ext::{ext_chart, minimal_resolution, Naming};
use plcob::module::FPModule;
use plcob::specseq::{aahss_crosscheck, aahss_e1, DeductionScript};
use plcob::steenrod::SubalgebraId;

const D2: &str = r#"
propagate = true

[[differential]]
page = 2
source = "1⊗p10_1"
target = "h1⊗p8"
provenance = "forced by the resolved chart"
"#;

fn main() {
    let window = Window {
        max_stem: 10,
        max_s: 5,
    };
    let f2 = FPModule::trivial(SubalgebraId::Level(2)).unwrap();
    let base = ext_chart(
        &minimal_resolution(&f2, 7, 18).unwrap(),
        10,
        &Naming::bundled("F2@A2"),
    );
    let m = cpl_module(CPL_MAX_DEGREE).unwrap();
    let direct = ext_chart(
        &minimal_resolution(&m, 5, 15 + CPL_MAX_DEGREE).unwrap(),
        10,
        &Naming::bundled("cpl"),
    );

    let mut state = aahss_e1(&base, &m).unwrap();
    for w in aahss_crosscheck(&state, &direct, window).warnings {
        println!("after d1: (stem {}, s {}) {}", w.stem, w.s, w.detail);
    }
    state.run(&DeductionScript::from_toml(D2).unwrap()).unwrap();
    for entry in state.log() {
        println!("E{}: {}", entry.page, entry.message);
    }
    let after = aahss_crosscheck(&state, &direct, window);
    println!("after d2: {} mismatches", after.warnings.len());
}
