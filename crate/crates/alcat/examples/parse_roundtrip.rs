//! Parse a few concepts, print them back, and show the two normal forms.

use alcat::{canonicalize, nnf, parse_concept_loose, sub_closure, Ontology, Result};

fn main() -> Result<()> {
    let inputs = [
        "(and B A)",
        "(not (and A (some R B)))",
        "(or (all R (not A)) (or B top))",
        "(not (not (not A)))",
    ];

    for text in inputs {
        let c = parse_concept_loose(text)?;
        println!("input      {text}");
        println!("parsed     {c}");
        println!("nnf        {}", nnf(&c));
        println!("canonical  {}", canonicalize(&c));
        println!();
    }

    let onto = Ontology::parse(
        "concepts: A B\n\
         roles: R\n\
         A => (some R B)\n",
    )?;
    let root = parse_concept_loose("(and A (not B))")?;
    println!("closure of {root} under the ontology:");
    for member in sub_closure(&root, &onto) {
        println!("  {member}");
    }
    Ok(())
}
