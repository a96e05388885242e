//! Rule masks carve out weaker logics. Without the conjunction rules the
//! distributivity arrow is unreachable; without the negation rules double
//! negation elimination fails. Re-enabling the full mask restores both.

use alcat::category::fixtures::{distributivity_category, double_negation_category};
use alcat::category::RuleMask;
use alcat::{parse_concept_loose, Concept, Result};

fn probe(cat: &mut alcat::category::Category, from: &str, to: &str) -> Result<bool> {
    cat.has_arrow(&parse_concept_loose(from)?, &parse_concept_loose(to)?)
}

fn main() -> Result<()> {
    println!("distributivity target: (and (or D S) F) -> (or (and D F) (and F S))");
    for (label, mask) in [("weak", RuleMask::weak_conjunction()), ("full", RuleMask::full())] {
        let mut cat = distributivity_category(mask);
        cat.saturate();
        let reach = probe(&mut cat, "(and (or D S) F)", "(or (and D F) (and F S))")?;
        println!("  {label} conjunction rules: {}", if reach { "derived" } else { "missing" });
    }

    println!("double negation target: A <-> (not (not A))");
    let a = Concept::name("A");
    let nna = parse_concept_loose("(not (not A))")?;
    for (label, full) in [("weak", false), ("full", true)] {
        let mut cat = double_negation_category();
        if !full {
            cat.enable_rules(RuleMask::weak_negation());
        }
        cat.saturate();
        let fwd = cat.has_arrow(&a, &nna)?;
        let bwd = cat.has_arrow(&nna, &a)?;
        println!(
            "  {label} negation rules: forward {}, backward {}",
            if fwd { "yes" } else { "no" },
            if bwd { "yes" } else { "no" }
        );
    }
    Ok(())
}
