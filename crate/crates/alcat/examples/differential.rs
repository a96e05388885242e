//! Run the cross-engine harness on a small seeded corpus and print the
//! agreement matrix. Any discrepancy between tableau, saturation, and the
//! bounded-model search would be listed at the bottom.

use std::time::Duration;

use alcat::harness::{run_diff_with_budget, GenConfig};

fn main() {
    let cfg = GenConfig { seed: 11, count: 24, ..GenConfig::default() };
    let report = run_diff_with_budget(&cfg, Duration::from_secs(30));

    println!("{}", report.render_table());

    if report.has_discrepancies() {
        println!("discrepancies:");
        for d in report.discrepancies() {
            println!("  {d}");
        }
    } else {
        println!("all engines agree on every decided instance");
    }
}
