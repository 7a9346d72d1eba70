//! Checks the bundled claims, or a claims file given on the command line.
//!
//! Usage: `cargo run --example verify_claims -- [claims.toml]`

use plcob::cli::{cmd_verify, ClaimsFile};

fn main() {
    let claims = match std::env::args().nth(1) {
        Some(path) => ClaimsFile::from_toml(&std::fs::read_to_string(path).unwrap()).unwrap(),
        None => ClaimsFile::bundled(),
    };
    let report = cmd_verify(&claims).unwrap();
    print!("{}", report.render());
    std::process::exit(if report.passed() { 0 } else { 1 });
}
