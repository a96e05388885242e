//! Extract a refutation certificate from a closed tableau, serialize it,
//! check it structurally, and replay every step inside a guided universe.

use alcat::certificate::{
    check_certificate, extract_certificate, guided_category, missing_replays, Certificate,
};
use alcat::tableau::TableauConfig;
use alcat::{parse_concept_loose, Concept, Ontology, Result};

fn main() -> Result<()> {
    let onto = Ontology::parse(
        "concepts: A B\n\
         roles: R\n\
         A => (all R B)\n",
    )?;
    let c = parse_concept_loose("(and A (some R (not B)))")?;

    let cert = extract_certificate(&c, &onto, &TableauConfig::default())?;
    println!("extracted {} steps for {c}", cert.steps.len());
    let mut by_rule: std::collections::BTreeMap<&str, usize> = Default::default();
    for step in &cert.steps {
        *by_rule.entry(step.rule.name()).or_default() += 1;
    }
    for (rule, count) in by_rule {
        println!("  {count:>3} x {rule}");
    }
    for (i, step) in cert.steps.iter().enumerate() {
        if i < 6 || i + 1 == cert.steps.len() {
            println!("  {i:>2} [{}] {} -> {}", step.rule.name(), step.arrow.0, step.arrow.1);
        } else if i == 6 {
            println!("  .. ({} more steps)", cert.steps.len() - 7);
        }
    }

    check_certificate(&cert, Some(&onto))?;
    println!("structural check: ok");

    let json = cert.to_json();
    let back = Certificate::from_json(&json)?;
    check_certificate(&back, Some(&onto))?;
    println!("json round-trip: ok ({} bytes)", json.len());

    let mut cat = guided_category(&back, &onto)?;
    let gaps = missing_replays(&back, &mut cat)?;
    println!("steps the guided universe cannot replay: {}", gaps.len());
    println!(
        "guided universe refutes the concept: {}",
        cat.has_arrow(&c, &Concept::Bot)?
    );
    Ok(())
}
