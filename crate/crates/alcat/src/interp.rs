//! Finite set-semantics: concept evaluation in explicit interpretations and
//! exhaustive bounded model search. This is the independent oracle the
//! engines are tested against; it decides nothing beyond the size bound.

use std::collections::{BTreeMap, BTreeSet};

use serde::Deserialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::syntax::{Concept, Ontology};

/// Exhaustive search refuses to enumerate more than 2^24 candidate
/// interpretations per domain size unless told otherwise.
pub const DEFAULT_CAP_LOG2: u32 = 24;

/// A finite interpretation over domain {0, .., domain_size-1}. Extensions
/// are explicit element sets; names without an entry are unknown rather
/// than empty, so typos surface as errors instead of silent ∅.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interpretation {
    domain_size: usize,
    concept_ext: BTreeMap<String, BTreeSet<usize>>,
    role_ext: BTreeMap<String, BTreeSet<(usize, usize)>>,
}

impl Interpretation {
    pub fn new(
        domain_size: usize,
        concept_ext: BTreeMap<String, BTreeSet<usize>>,
        role_ext: BTreeMap<String, BTreeSet<(usize, usize)>>,
    ) -> Result<Interpretation> {
        if domain_size == 0 {
            return Err(Error::Malformed("interpretation domain must be non-empty".into()));
        }
        for (name, ext) in &concept_ext {
            if ext.iter().any(|&e| e >= domain_size) {
                return Err(Error::Malformed(format!(
                    "extension of '{name}' leaves the domain"
                )));
            }
        }
        for (name, ext) in &role_ext {
            if ext.iter().any(|&(i, j)| i >= domain_size || j >= domain_size) {
                return Err(Error::Malformed(format!(
                    "extension of role '{name}' leaves the domain"
                )));
            }
        }
        Ok(Interpretation { domain_size, concept_ext, role_ext })
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn concept_ext(&self, name: &str) -> Option<&BTreeSet<usize>> {
        self.concept_ext.get(name)
    }

    pub fn role_ext(&self, name: &str) -> Option<&BTreeSet<(usize, usize)>> {
        self.role_ext.get(name)
    }

    /// Witness serialization used by the CLI: `{domain_size, concepts:
    /// {name: [ids]}, roles: {name: [[i, j]]}}`.
    pub fn to_json(&self) -> String {
        json!({
            "domain_size": self.domain_size,
            "concepts": self.concept_ext,
            "roles": self.role_ext,
        })
        .to_string()
    }

    pub fn from_json(text: &str) -> Result<Interpretation> {
        #[derive(Deserialize)]
        struct Raw {
            domain_size: usize,
            #[serde(default)]
            concepts: BTreeMap<String, BTreeSet<usize>>,
            #[serde(default)]
            roles: BTreeMap<String, BTreeSet<(usize, usize)>>,
        }
        let raw: Raw = serde_json::from_str(text)?;
        Interpretation::new(raw.domain_size, raw.concepts, raw.roles)
    }
}

/// Evaluates a concept to its extension, erroring on names or roles the
/// interpretation says nothing about.
pub fn eval(c: &Concept, i: &Interpretation) -> Result<BTreeSet<usize>> {
    let full = || (0..i.domain_size).collect::<BTreeSet<usize>>();
    match c {
        Concept::Top => Ok(full()),
        Concept::Bot => Ok(BTreeSet::new()),
        Concept::Name(n) => i
            .concept_ext(n)
            .cloned()
            .ok_or(Error::UnknownName { kind: "concept", name: n.clone() }),
        Concept::Not(x) => {
            let inner = eval(x, i)?;
            Ok(full().difference(&inner).copied().collect())
        }
        Concept::And(l, r) => Ok(eval(l, i)?.intersection(&eval(r, i)?).copied().collect()),
        Concept::Or(l, r) => Ok(eval(l, i)?.union(&eval(r, i)?).copied().collect()),
        Concept::Exists(role, f) => {
            let fs = eval(f, i)?;
            let edges = i
                .role_ext(role)
                .ok_or(Error::UnknownName { kind: "role", name: role.clone() })?;
            Ok((0..i.domain_size)
                .filter(|&x| edges.iter().any(|&(a, b)| a == x && fs.contains(&b)))
                .collect())
        }
        Concept::Forall(role, f) => {
            let fs = eval(f, i)?;
            let edges = i
                .role_ext(role)
                .ok_or(Error::UnknownName { kind: "role", name: role.clone() })?;
            Ok((0..i.domain_size)
                .filter(|&x| edges.iter().all(|&(a, b)| a != x || fs.contains(&b)))
                .collect())
        }
    }
}

/// True iff every axiom's left extension is contained in its right one.
pub fn satisfies(o: &Ontology, i: &Interpretation) -> Result<bool> {
    for ax in o.axioms() {
        let lhs = eval(&ax.lhs, i)?;
        let rhs = eval(&ax.rhs, i)?;
        if !lhs.is_subset(&rhs) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Packed candidate layout at domain size `n`: one bit per (concept name,
/// element) pair, then one bit per (role, source, target) triple.
struct BitCtx<'a> {
    n: usize,
    names: Vec<&'a str>,
    roles: Vec<&'a str>,
    k: u64,
}

impl BitCtx<'_> {
    fn full(&self) -> u32 {
        (1u32 << self.n) - 1
    }

    fn name_mask(&self, idx: usize) -> u32 {
        ((self.k >> (idx * self.n)) as u32) & self.full()
    }

    fn role_matrix(&self, idx: usize) -> u32 {
        let off = self.names.len() * self.n + idx * self.n * self.n;
        ((self.k >> off) as u32) & ((1u32 << (self.n * self.n)) - 1)
    }

    fn eval(&self, c: &Concept) -> u32 {
        match c {
            Concept::Top => self.full(),
            Concept::Bot => 0,
            Concept::Name(name) => {
                let idx = self
                    .names
                    .iter()
                    .position(|n| n == name)
                    .expect("concept checked against the signature before search");
                self.name_mask(idx)
            }
            Concept::Not(x) => self.full() & !self.eval(x),
            Concept::And(l, r) => self.eval(l) & self.eval(r),
            Concept::Or(l, r) => self.eval(l) | self.eval(r),
            Concept::Exists(role, f) | Concept::Forall(role, f) => {
                let idx = self
                    .roles
                    .iter()
                    .position(|r| r == role)
                    .expect("concept checked against the signature before search");
                let mat = self.role_matrix(idx);
                let fmask = self.eval(f);
                let mut out = 0u32;
                for x in 0..self.n {
                    let row = (mat >> (x * self.n)) & self.full();
                    let hit = match c {
                        Concept::Exists(..) => row & fmask != 0,
                        _ => row & !fmask == 0,
                    };
                    if hit {
                        out |= 1 << x;
                    }
                }
                out
            }
        }
    }

    fn to_interpretation(&self) -> Interpretation {
        let mut concept_ext = BTreeMap::new();
        for (idx, name) in self.names.iter().enumerate() {
            let mask = self.name_mask(idx);
            let ext: BTreeSet<usize> = (0..self.n).filter(|&e| mask & (1 << e) != 0).collect();
            concept_ext.insert(name.to_string(), ext);
        }
        let mut role_ext = BTreeMap::new();
        for (idx, role) in self.roles.iter().enumerate() {
            let mat = self.role_matrix(idx);
            let ext: BTreeSet<(usize, usize)> = (0..self.n)
                .flat_map(|i| (0..self.n).map(move |j| (i, j)))
                .filter(|&(i, j)| mat & (1 << (i * self.n + j)) != 0)
                .collect();
            role_ext.insert(role.to_string(), ext);
        }
        Interpretation::new(self.n, concept_ext, role_ext)
            .expect("packed candidate stays within its own domain")
    }
}

fn search_size(c: &Concept, o: &Ontology, n: usize, cap_log2: u32) -> Result<Option<Interpretation>> {
    let names: Vec<&str> = o.signature().concept_names().collect();
    let roles: Vec<&str> = o.signature().role_names().collect();
    let bits = (names.len() * n + roles.len() * n * n) as u32;
    if bits > cap_log2 {
        return Err(Error::Budget(format!(
            "model search at domain size {n} needs 2^{bits} candidates (cap 2^{cap_log2})"
        )));
    }
    let mut ctx = BitCtx { n, names, roles, k: 0 };
    for k in 0..(1u64 << bits) {
        ctx.k = k;
        if o.axioms().iter().any(|ax| ctx.eval(&ax.lhs) & !ctx.eval(&ax.rhs) != 0) {
            continue;
        }
        if ctx.eval(c) == 0 {
            continue;
        }
        // Rebuild the hit as an explicit interpretation and re-check it with
        // the readable evaluator; a mismatch is a bug in one of the two.
        let interp = ctx.to_interpretation();
        let ok = satisfies(o, &interp)? && !eval(c, &interp)?.is_empty();
        assert!(ok, "packed and readable evaluators disagree at size {n}, candidate {k}");
        return Ok(Some(interp));
    }
    Ok(None)
}

/// Searches domain sizes 1..=max_size in order, candidates within a size in
/// ascending packed order; the first model of `o` giving `c` a non-empty
/// extension is returned. `None` certifies there is no model of size ≤
/// max_size, not unsatisfiability. Errors with a budget error when a size
/// would need more than 2^cap_log2 candidates.
pub fn find_model_capped(
    c: &Concept,
    o: &Ontology,
    max_size: usize,
    cap_log2: u32,
) -> Result<Option<Interpretation>> {
    o.signature().check_concept(c)?;
    for n in 1..=max_size {
        if let Some(m) = search_size(c, o, n, cap_log2)? {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// [`find_model_capped`] with the default candidate cap.
pub fn find_model(c: &Concept, o: &Ontology, max_size: usize) -> Result<Option<Interpretation>> {
    find_model_capped(c, o, max_size, DEFAULT_CAP_LOG2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_concept, Gci, Signature};

    fn sig() -> Signature {
        Signature::new(["A", "B"], ["R"]).unwrap()
    }

    fn interp(
        n: usize,
        concepts: &[(&str, &[usize])],
        roles: &[(&str, &[(usize, usize)])],
    ) -> Interpretation {
        Interpretation::new(
            n,
            concepts
                .iter()
                .map(|(name, ext)| (name.to_string(), ext.iter().copied().collect()))
                .collect(),
            roles
                .iter()
                .map(|(name, ext)| (name.to_string(), ext.iter().copied().collect()))
                .collect(),
        )
        .unwrap()
    }

    fn ext(elems: &[usize]) -> BTreeSet<usize> {
        elems.iter().copied().collect()
    }

    #[test]
    fn eval_matches_set_semantics() {
        let s = sig();
        let i = interp(1, &[("A", &[0]), ("B", &[])], &[("R", &[])]);
        let c = parse_concept("(or A (not A))", &s).unwrap();
        assert_eq!(eval(&c, &i).unwrap(), ext(&[0]));

        let i = interp(2, &[("A", &[1]), ("B", &[])], &[("R", &[(0, 1)])]);
        let c = parse_concept("(some R A)", &s).unwrap();
        assert_eq!(eval(&c, &i).unwrap(), ext(&[0]));

        let i = interp(1, &[("A", &[]), ("B", &[])], &[("R", &[])]);
        let c = parse_concept("(all R A)", &s).unwrap();
        assert_eq!(eval(&c, &i).unwrap(), ext(&[0]), "universal over no successors");
    }

    #[test]
    fn eval_rejects_unknown_names() {
        let i = interp(1, &[("A", &[0])], &[]);
        assert!(matches!(
            eval(&Concept::name("Z"), &i),
            Err(Error::UnknownName { kind: "concept", .. })
        ));
        assert!(matches!(
            eval(&Concept::some("R", Concept::name("A")), &i),
            Err(Error::UnknownName { kind: "role", .. })
        ));
    }

    #[test]
    fn satisfies_checks_every_axiom() {
        let s = sig();
        let o = Ontology::new(
            s.clone(),
            vec![Gci { lhs: Concept::name("A"), rhs: Concept::name("B") }],
        )
        .unwrap();
        let good = interp(2, &[("A", &[0]), ("B", &[0, 1])], &[("R", &[])]);
        let bad = interp(1, &[("A", &[0]), ("B", &[])], &[("R", &[])]);
        assert!(satisfies(&o, &good).unwrap());
        assert!(!satisfies(&o, &bad).unwrap());
        let empty = Ontology::empty(s);
        assert!(satisfies(&empty, &bad).unwrap());
    }

    #[test]
    fn interpretation_bounds_are_enforced() {
        assert!(Interpretation::new(0, BTreeMap::new(), BTreeMap::new()).is_err());
        let mut c = BTreeMap::new();
        c.insert("A".to_string(), ext(&[2]));
        assert!(Interpretation::new(2, c, BTreeMap::new()).is_err());
        let mut r = BTreeMap::new();
        r.insert("R".to_string(), [(0usize, 3usize)].into_iter().collect());
        assert!(Interpretation::new(2, BTreeMap::new(), r).is_err());
    }

    #[test]
    fn contradiction_has_no_bounded_model() {
        let s = sig();
        let o = Ontology::empty(s.clone());
        let c = parse_concept("(and A (not A))", &s).unwrap();
        assert_eq!(find_model(&c, &o, 3).unwrap(), None);
    }

    #[test]
    fn smallest_witness_is_frozen() {
        let s = sig();
        let o = Ontology::new(
            s.clone(),
            vec![Gci { lhs: Concept::name("A"), rhs: Concept::name("B") }],
        )
        .unwrap();
        let m = find_model(&Concept::name("A"), &o, 1).unwrap().unwrap();
        assert_eq!(m, interp(1, &[("A", &[0]), ("B", &[0])], &[("R", &[])]));

        // The existential-universal pair already fits in one reflexive point;
        // ascending search finds that before any two-element model.
        let c = parse_concept("(and (some R A) (all R B))", &s).unwrap();
        let m = find_model(&c, &Ontology::empty(s), 2).unwrap().unwrap();
        assert_eq!(m, interp(1, &[("A", &[0]), ("B", &[0])], &[("R", &[(0, 0)])]));
    }

    #[test]
    fn success_at_a_size_persists_at_larger_sizes() {
        let s = sig();
        let o = Ontology::new(
            s.clone(),
            vec![Gci { lhs: Concept::Top, rhs: Concept::name("A") }],
        )
        .unwrap();
        let c = parse_concept("(some R A)", &s).unwrap();
        for k in 1..=2 {
            if search_size(&c, &o, k, DEFAULT_CAP_LOG2).unwrap().is_some() {
                for bigger in k..=3 {
                    assert!(
                        search_size(&c, &o, bigger, DEFAULT_CAP_LOG2).unwrap().is_some(),
                        "model at size {k} but none at size {bigger}"
                    );
                }
            }
        }
    }

    #[test]
    fn budget_trips_instead_of_grinding() {
        let s = sig();
        let o = Ontology::empty(s.clone());
        // No size-1 model exists, so the search must reach size 2 and find
        // its candidate space over the cap.
        let c = parse_concept("(and A (not A))", &s).unwrap();
        match find_model_capped(&c, &o, 2, 4) {
            Err(Error::Budget(msg)) => assert!(msg.contains("size 2")),
            other => panic!("expected budget error, got {other:?}"),
        }
        // Size 1 fits under the same cap: 2 name bits + 1 role bit.
        assert!(find_model_capped(&Concept::name("A"), &o, 1, 4).unwrap().is_some());
    }

    #[test]
    fn witness_json_round_trips() {
        let i = interp(2, &[("A", &[0, 1]), ("B", &[])], &[("R", &[(0, 1), (1, 0)])]);
        let text = i.to_json();
        assert_eq!(
            text,
            r#"{"concepts":{"A":[0,1],"B":[]},"domain_size":2,"roles":{"R":[[0,1],[1,0]]}}"#
        );
        assert_eq!(Interpretation::from_json(&text).unwrap(), i);
        assert!(Interpretation::from_json(r#"{"domain_size":0}"#).is_err());
    }

    #[test]
    fn padded_domains_keep_axiom_free_witnesses() {
        let s = sig();
        let o = Ontology::empty(s.clone());
        let c = parse_concept("(and (some R A) (all R B))", &s).unwrap();
        let m = find_model(&c, &o, 1).unwrap().unwrap();
        // Add an isolated element by hand; the witness keeps working because
        // nothing constrains the new point when there are no axioms.
        let padded = interp(2, &[("A", &[0]), ("B", &[0])], &[("R", &[(0, 0)])]);
        assert!(satisfies(&o, &padded).unwrap());
        assert!(!eval(&c, &padded).unwrap().is_empty());
        assert_eq!(m.domain_size(), 1);
    }
}
