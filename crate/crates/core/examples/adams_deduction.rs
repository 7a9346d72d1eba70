//! Runs the bundled Adams deduction on the MPL⟨8⟩ chart and prints the
//! log and the groups read off from E∞.

use plcob::ext::mpl8_chart;
use plcob::specseq::{adams_run, DeductionScript};

fn main() {
    let chart = mpl8_chart(8, 11).expect("bundled module");
    let script = DeductionScript::from_toml(plcob::cli::MPL8_SCRIPT_TOML).expect("bundled script");
    let run = adams_run(&chart, &script).expect("consistent deduction");
    for entry in run.e_infinity.log() {
        println!("E{}: {}", entry.page, entry.message);
    }
    for g in &run.stems {
        let mut note = String::new();
        if g.up_to_extension {
            note.push_str(" (up to extension)");
        }
        if g.flagged {
            note.push_str(" [truncation-sensitive]");
        }
        println!("stem {:2}: {}{note}", g.stem, g.group);
    }
}
