//! Search for small finite models, evaluate concepts inside them, and show
//! that refuted concepts have no model at any bounded size.

use alcat::interp::{eval, find_model, satisfies};
use alcat::{parse_concept_loose, Ontology, Result};

fn main() -> Result<()> {
    let onto = Ontology::parse(
        "concepts: A B\n\
         roles: R\n\
         A => (some R B)\n",
    )?;

    let sat = parse_concept_loose("(and A (all R B))")?;
    match find_model(&sat, &onto, 3)? {
        Some(m) => {
            println!("{sat} has a model with {} elements:", m.domain_size());
            println!("{}", m.to_json());
            println!("ontology satisfied: {}", satisfies(&onto, &m)?);
            println!("witnesses of the concept: {:?}", eval(&sat, &m)?);
        }
        None => println!("{sat}: no model within 3 elements"),
    }

    let unsat = parse_concept_loose("(and A (all R (not B)))")?;
    match find_model(&unsat, &onto, 3)? {
        Some(m) => println!("{unsat} has a model with {} elements", m.domain_size()),
        None => println!("{unsat}: no model within 3 elements"),
    }
    Ok(())
}
