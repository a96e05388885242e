//! Every arrow a saturated universe stores is a sound entailment: the
//! tableau confirms each one. Saturation alone is deliberately incomplete,
//! so some refutations only appear in certificate-guided universes.

use alcat::category::{decide_cat_unsat, Category, UniverseConfig};
use alcat::tableau::entails;
use alcat::{parse_concept_loose, Ontology, Result};

fn main() -> Result<()> {
    let onto = Ontology::parse(
        "concepts: A B C\n\
         roles: R\n\
         A => B\n\
         B => (all R C)\n",
    )?;
    let cfg = UniverseConfig::default();

    let root = parse_concept_loose("(and A (some R (not C)))")?;
    let mut cat = Category::build_universe(&root, &onto, &cfg)?;
    cat.saturate();

    println!("stored arrows for the universe of {root}:");
    let mut confirmed = 0;
    let mut total = 0;
    for (src, dst, rule) in cat.stored_concept_arrows() {
        if src == dst || dst == "top" || src == "bot" {
            continue;
        }
        total += 1;
        let ok = entails(&onto, &parse_concept_loose(&src)?, &parse_concept_loose(&dst)?)?;
        if ok {
            confirmed += 1;
        }
        println!("  [{rule}] {src} -> {dst}  tableau: {}", if ok { "yes" } else { "NO" });
    }
    println!("{confirmed}/{total} stored arrows confirmed as entailments");

    let clash = parse_concept_loose("(and A (not A))")?;
    println!(
        "{clash} refuted without guidance: {}",
        decide_cat_unsat(&clash, &onto, &cfg)?
    );
    println!(
        "{root} refuted without guidance: {} (the tableau refutes it; \
         see the certificate_roundtrip example for the guided replay)",
        decide_cat_unsat(&root, &onto, &cfg)?
    );
    Ok(())
}
