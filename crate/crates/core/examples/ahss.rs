//! Atiyah–Hirzebruch E2 page for MPL⟨8⟩_*(Th) with H_*(Th) free in even
//! degrees 0..8, on a chosen line p + q = total.
//!
//! Usage: `cargo run --example ahss -- [total]`

use plcob::cli::coefficient_table;
use plcob::specseq::{ahss_e2, thom_homology, GradedGroups, ThomShift};

fn main() {
    let total: u32 = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(13);
    let table = coefficient_table("mpl8").unwrap();
    let homology = thom_homology(
        &GradedGroups::free_in(&[0, 2, 4, 6, 8]),
        ThomShift::Normalized,
    );
    match ahss_e2(&homology, &table, total) {
        Ok(cells) => {
            for c in cells {
                println!("E2^({}, {}) = {}", c.p, total - c.p, c.group);
            }
        }
        Err(e) => println!("line {total}: {e}"),
    }
}
