//! Resolves a module over A(n) and prints its Ext chart as JSON.
//!
//! Usage: `cargo run --example ext_chart -- [F2@A2|F2@A1|cpl] [max_stem] [max_s]`

use plcob::cpl::cpl_module;
use plcob::ext::{ext_chart, minimal_resolution, Naming};
use plcob::module::FPModule;
use plcob::steenrod::SubalgebraId;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let which = args.first().map(String::as_str).unwrap_or("F2@A2");
    let max_stem: u32 = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(17);
    let max_s: u32 = args.get(2).and_then(|a| a.parse().ok()).unwrap_or(8);
    let module = match which {
        "F2@A1" => FPModule::trivial(SubalgebraId::Level(1)).unwrap(),
        "cpl" => cpl_module(11).unwrap(),
        "mpl8" => {
            let chart = plcob::ext::mpl8_chart(max_s, max_stem.min(11)).unwrap();
            print!("{}", chart.to_json());
            return;
        }
        _ => FPModule::trivial(SubalgebraId::Level(2)).unwrap(),
    };
    let top = module.max_degree().unwrap_or(0);
    let r = minimal_resolution(&module, max_s, max_stem + max_s + top).unwrap();
    let chart = ext_chart(&r, max_stem, &Naming::bundled(which));
    for s in (0..=max_s).rev() {
        let row: Vec<String> = (0..=max_stem)
            .map(|st| chart.dim(st, s).to_string())
            .collect();
        eprintln!("s={s:2} {}", row.join(" "));
    }
    print!("{}", chart.to_json());
}
