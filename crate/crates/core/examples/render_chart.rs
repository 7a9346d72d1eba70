//! Renders a built-in chart as ASCII on stdout and writes SVG to a file.
//!
//! Usage: `cargo run --example render_chart -- [F2@A2|F2@A1|cpl|mpl8] [out.svg]`

use plcob::cli::{cmd_render, compute_chart, Builtin, ChartRequest, Format};

fn main() {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "F2@A2".into());
    let builtin = Builtin::parse(&name).unwrap_or_else(|| panic!("unknown chart {name}"));
    let (chart, _) = compute_chart(&ChartRequest::builtin(builtin), None).unwrap();
    print!("{}", cmd_render(&chart, Format::Ascii));
    if let Some(path) = args.next() {
        std::fs::write(&path, cmd_render(&chart, Format::Svg)).unwrap();
        eprintln!("wrote {path}");
    }
}
