//! The smallest interesting saturation run: five meeting states with six
//! fixture arrows. Composition closes the only gap, arrived -> finished,
//! and adds nothing else.

use alcat::category::fixtures::{meeting_category, meeting_edges, MEETING_STATES};
use alcat::{Concept, Result};

fn main() -> Result<()> {
    let mut cat = meeting_category();
    cat.saturate();

    println!("states: {}", MEETING_STATES.join(", "));
    println!("fixture arrows:");
    for (a, b) in meeting_edges() {
        println!("  {a} -> {b}");
    }

    let fixtures: Vec<(String, String)> = meeting_edges()
        .into_iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();

    println!("new arrows after saturation:");
    for a in MEETING_STATES {
        for b in MEETING_STATES {
            if a == b || fixtures.contains(&(a.to_string(), b.to_string())) {
                continue;
            }
            if cat.has_arrow(&Concept::name(a), &Concept::name(b))? {
                println!("  {a} -> {b}");
            }
        }
    }
    Ok(())
}
