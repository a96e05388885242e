//! Run the tableau on a satisfiable and an unsatisfiable concept and print
//! the expansion traces, including how disjunctions fork the meta-tree.

use alcat::tableau::decide_sat;
use alcat::{parse_concept_loose, Ontology, Result};

fn main() -> Result<()> {
    let onto = Ontology::parse(
        "concepts: A B\n\
         roles: R\n\
         A => (all R B)\n",
    )?;

    let sat = parse_concept_loose("(and A (some R top))")?;
    let verdict = decide_sat(&sat, &onto)?;
    println!("{sat}  =>  {}", if verdict.satisfiable { "sat" } else { "unsat" });
    println!("{}", verdict.meta.render_trace());

    let unsat = parse_concept_loose("(and A (some R (or (not B) bot)))")?;
    let verdict = decide_sat(&unsat, &onto)?;
    println!("{unsat}  =>  {}", if verdict.satisfiable { "sat" } else { "unsat" });
    println!("{}", verdict.meta.render_trace());

    println!("clash at every leaf: {}", verdict.meta.p1_holds());
    println!("no split repeats on a branch: {}", verdict.meta.p2_holds());
    Ok(())
}
