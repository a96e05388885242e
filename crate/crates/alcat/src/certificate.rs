//! Unsatisfiability certificates: a straight-line sequence of arrow
//! derivations whose last entry is `(c0, bot)`. Each step names a rule,
//! indices of earlier steps it builds on, and any helper objects a replay
//! universe needs. Extraction walks a finished refutation; checking is
//! pure structural matching and shares no code with the prover.

use std::collections::{BTreeMap, BTreeSet};

use sha2::{Digest, Sha256};

use crate::category::{Category, UniverseConfig};
use crate::error::{Error, Result};
use crate::syntax::{canonicalize, nnf, parse_concept_loose, Concept, Ontology};
use crate::tableau::{
    decide_sat_with, ClashKind, CompletionTree, MetaTree, Origin, Split, TableauConfig, TreeState,
};

/// The certificate step vocabulary. Everything a refutation needs reduces
/// to these; helper constructions (contraposition, double negation, the
/// De Morgan shuffles) are emitted as short sequences of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertRule {
    Identity,
    Compose,
    Terminal,
    Initial,
    /// `top -> K` where `K` is an axiom clause, raw or normalized.
    Axiom,
    ConjProj,
    ConjPair,
    ConjDistrib,
    DisjInj,
    DisjUniv,
    NegBot,
    NegTop,
    NegMax,
    NegMin,
    /// `(all R C)` interchangeable with `(not (some R (not C)))`.
    ForallDual,
    /// From `X -> bot` conclude `(some R X) -> bot`.
    ExistEmpty,
    /// From `X -> Y` conclude `(some R X) -> (some R Y)`.
    ExistSub,
    /// From `X -> Y` conclude `(all R X) -> (all R Y)`.
    ForallSub,
    /// `(and (some R X) (all R Y)) -> (some R (and X Y))`.
    ForallExist,
}

impl CertRule {
    pub const ALL: [CertRule; 19] = [
        CertRule::Identity,
        CertRule::Compose,
        CertRule::Terminal,
        CertRule::Initial,
        CertRule::Axiom,
        CertRule::ConjProj,
        CertRule::ConjPair,
        CertRule::ConjDistrib,
        CertRule::DisjInj,
        CertRule::DisjUniv,
        CertRule::NegBot,
        CertRule::NegTop,
        CertRule::NegMax,
        CertRule::NegMin,
        CertRule::ForallDual,
        CertRule::ExistEmpty,
        CertRule::ExistSub,
        CertRule::ForallSub,
        CertRule::ForallExist,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CertRule::Identity => "identity",
            CertRule::Compose => "compose",
            CertRule::Terminal => "terminal",
            CertRule::Initial => "initial",
            CertRule::Axiom => "axiom",
            CertRule::ConjProj => "conj-proj",
            CertRule::ConjPair => "conj-pair",
            CertRule::ConjDistrib => "conj-distrib",
            CertRule::DisjInj => "disj-inj",
            CertRule::DisjUniv => "disj-univ",
            CertRule::NegBot => "neg-bot",
            CertRule::NegTop => "neg-top",
            CertRule::NegMax => "neg-max",
            CertRule::NegMin => "neg-min",
            CertRule::ForallDual => "forall-dual",
            CertRule::ExistEmpty => "exist-empty",
            CertRule::ExistSub => "exist-sub",
            CertRule::ForallSub => "forall-sub",
            CertRule::ForallExist => "forall-exist",
        }
    }

    pub fn from_name(s: &str) -> Result<CertRule> {
        CertRule::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::UnknownRule(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertStep {
    /// Source and target, both in canonical form.
    pub arrow: (Concept, Concept),
    pub rule: CertRule,
    /// Indices of earlier steps this one composes or instantiates.
    pub premises: Vec<usize>,
    /// Helper objects a replay universe must intern beyond the arrow
    /// endpoints (only quantifier monotonicity steps need any).
    pub introduces: Vec<Concept>,
}

#[derive(Debug, Clone)]
pub struct Certificate {
    /// The refuted concept, as given (the final arrow uses its canonical
    /// form).
    pub concept: Concept,
    /// SHA-256 of the ontology's canonical text.
    pub ontology_hash: String,
    pub steps: Vec<CertStep>,
}

pub fn ontology_hash(onto: &Ontology) -> String {
    let mut h = Sha256::new();
    h.update(onto.canonical_text().as_bytes());
    let out = h.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

impl Certificate {
    pub fn to_json(&self) -> String {
        let steps: Vec<serde_json::Value> = self
            .steps
            .iter()
            .map(|s| {
                serde_json::json!({
                    "arrow": [s.arrow.0.to_string(), s.arrow.1.to_string()],
                    "rule": s.rule.name(),
                    "premises": s.premises,
                    "objects": s.introduces.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                })
            })
            .collect();
        serde_json::to_string_pretty(&serde_json::json!({
            "concept": self.concept.to_string(),
            "ontology_hash": self.ontology_hash,
            "steps": steps,
        }))
        .expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Certificate> {
        let v: serde_json::Value = serde_json::from_str(text)?;
        let concept_str = v["concept"]
            .as_str()
            .ok_or_else(|| Error::Malformed("certificate lacks a concept field".into()))?;
        let concept = parse_concept_loose(concept_str)?;
        let ontology_hash = v["ontology_hash"]
            .as_str()
            .ok_or_else(|| Error::Malformed("certificate lacks an ontology_hash field".into()))?
            .to_string();
        let steps_v = v["steps"]
            .as_array()
            .ok_or_else(|| Error::Malformed("certificate lacks a steps array".into()))?;
        let mut steps = Vec::with_capacity(steps_v.len());
        for (i, sv) in steps_v.iter().enumerate() {
            let bad = |what: &str| Error::Malformed(format!("step {i}: {what}"));
            let arr = sv["arrow"].as_array().ok_or_else(|| bad("arrow missing"))?;
            if arr.len() != 2 {
                return Err(bad("arrow needs a source and a target"));
            }
            let src = parse_concept_loose(arr[0].as_str().ok_or_else(|| bad("arrow source"))?)?;
            let dst = parse_concept_loose(arr[1].as_str().ok_or_else(|| bad("arrow target"))?)?;
            let rule = CertRule::from_name(sv["rule"].as_str().ok_or_else(|| bad("rule missing"))?)?;
            let mut premises = Vec::new();
            if let Some(ps) = sv["premises"].as_array() {
                for p in ps {
                    premises.push(p.as_u64().ok_or_else(|| bad("premise index"))? as usize);
                }
            }
            let mut introduces = Vec::new();
            if let Some(os) = sv["objects"].as_array() {
                for o in os {
                    introduces.push(parse_concept_loose(
                        o.as_str().ok_or_else(|| bad("helper object"))?,
                    )?);
                }
            }
            steps.push(CertStep { arrow: (src, dst), rule, premises, introduces });
        }
        Ok(Certificate { concept, ontology_hash, steps })
    }
}

fn complementary(l: &Concept, r: &Concept) -> bool {
    matches!(r, Concept::Not(x) if **x == *l) || matches!(l, Concept::Not(x) if **x == *r)
}

/// Validate every step by structural matching, then the final arrow. With
/// an ontology the hash must agree and axiom steps must target one of its
/// clause forms; without one, axiom steps are checked by shape only. The
/// error message pins the first offending step.
pub fn check_certificate(cert: &Certificate, onto: Option<&Ontology>) -> Result<()> {
    if let Some(o) = onto {
        let h = ontology_hash(o);
        if h != cert.ontology_hash {
            return Err(Error::Malformed(format!(
                "ontology hash mismatch: certificate carries {}, ontology is {}",
                cert.ontology_hash, h
            )));
        }
    }
    let axiom_forms: Option<BTreeSet<Concept>> = onto.map(|o| {
        o.axioms()
            .iter()
            .flat_map(|ax| {
                let cl = ax.clause();
                [canonicalize(&cl), canonicalize(&nnf(&cl))]
            })
            .collect()
    });
    for (i, step) in cert.steps.iter().enumerate() {
        check_step(i, step, &cert.steps, axiom_forms.as_ref())
            .map_err(|why| Error::Malformed(format!("step {i}: {why}")))?;
    }
    let goal = canonicalize(&cert.concept);
    match cert.steps.last() {
        None => {
            if goal == Concept::Bot {
                Ok(())
            } else {
                Err(Error::Malformed(
                    "empty certificate refutes nothing but bot".into(),
                ))
            }
        }
        Some(last) => {
            if last.arrow == (goal.clone(), Concept::Bot) {
                Ok(())
            } else {
                Err(Error::Malformed(format!(
                    "final arrow is {} -> {}, expected {} -> bot",
                    last.arrow.0, last.arrow.1, goal
                )))
            }
        }
    }
}

fn check_step(
    i: usize,
    step: &CertStep,
    steps: &[CertStep],
    axioms: Option<&BTreeSet<Concept>>,
) -> std::result::Result<(), String> {
    let (src, dst) = &step.arrow;
    if canonicalize(src) != *src || canonicalize(dst) != *dst {
        return Err("arrow endpoints must be canonical".into());
    }
    for &p in &step.premises {
        if p >= i {
            return Err(format!("premise {p} does not precede the step"));
        }
    }
    let need = |n: usize| -> std::result::Result<(), String> {
        if step.premises.len() == n {
            Ok(())
        } else {
            Err(format!(
                "rule {} takes {n} premises, {} given",
                step.rule.name(),
                step.premises.len()
            ))
        }
    };
    let prem = |k: usize| -> &(Concept, Concept) { &steps[step.premises[k]].arrow };
    match step.rule {
        CertRule::Identity => {
            need(0)?;
            if src != dst {
                return Err("identity endpoints differ".into());
            }
        }
        CertRule::Compose => {
            need(2)?;
            let (a, m1) = prem(0);
            let (m2, b) = prem(1);
            if a != src || b != dst || m1 != m2 {
                return Err("premises do not chain into the arrow".into());
            }
        }
        CertRule::Terminal => {
            need(0)?;
            if *dst != Concept::Top {
                return Err("terminal arrows end at top".into());
            }
        }
        CertRule::Initial => {
            need(0)?;
            if *src != Concept::Bot {
                return Err("initial arrows start at bot".into());
            }
        }
        CertRule::Axiom => {
            need(0)?;
            if *src != Concept::Top {
                return Err("axiom arrows start at top".into());
            }
            if let Some(forms) = axioms {
                if !forms.contains(dst) {
                    return Err(format!("{dst} is not a clause of the ontology"));
                }
            }
        }
        CertRule::ConjProj => {
            need(0)?;
            let Concept::And(l, r) = src else {
                return Err("source is not a conjunction".into());
            };
            if dst != l.as_ref() && dst != r.as_ref() {
                return Err("target is not an operand of the source".into());
            }
        }
        CertRule::ConjPair => {
            need(2)?;
            let Concept::And(l, r) = dst else {
                return Err("target is not a conjunction".into());
            };
            let (s1, d1) = prem(0);
            let (s2, d2) = prem(1);
            if s1 != src || s2 != src {
                return Err("premises must share the arrow's source".into());
            }
            let direct = d1 == l.as_ref() && d2 == r.as_ref();
            let swapped = d1 == r.as_ref() && d2 == l.as_ref();
            if !direct && !swapped {
                return Err("premise targets are not the conjunction's operands".into());
            }
        }
        CertRule::ConjDistrib => {
            need(0)?;
            let Concept::And(l, r) = src else {
                return Err("source is not a conjunction".into());
            };
            let ok = [(l, r), (r, l)].into_iter().any(|(keep, split)| {
                if let Concept::Or(d, e) = split.as_ref() {
                    let want = canonicalize(&Concept::or(
                        Concept::and((**keep).clone(), (**d).clone()),
                        Concept::and((**keep).clone(), (**e).clone()),
                    ));
                    want == *dst
                } else {
                    false
                }
            });
            if !ok {
                return Err("target is not the distributed form of the source".into());
            }
        }
        CertRule::DisjInj => {
            need(0)?;
            let Concept::Or(l, r) = dst else {
                return Err("target is not a disjunction".into());
            };
            if src != l.as_ref() && src != r.as_ref() {
                return Err("source is not an operand of the target".into());
            }
        }
        CertRule::DisjUniv => {
            need(2)?;
            let Concept::Or(l, r) = src else {
                return Err("source is not a disjunction".into());
            };
            let (s1, d1) = prem(0);
            let (s2, d2) = prem(1);
            if d1 != dst || d2 != dst {
                return Err("premises must share the arrow's target".into());
            }
            let direct = s1 == l.as_ref() && s2 == r.as_ref();
            let swapped = s1 == r.as_ref() && s2 == l.as_ref();
            if !direct && !swapped {
                return Err("premise sources are not the disjunction's operands".into());
            }
        }
        CertRule::NegBot => {
            need(0)?;
            let Concept::And(l, r) = src else {
                return Err("source is not a conjunction".into());
            };
            if !complementary(l, r) {
                return Err("source operands are not complementary".into());
            }
            if *dst != Concept::Bot {
                return Err("target must be bot".into());
            }
        }
        CertRule::NegTop => {
            need(0)?;
            let Concept::Or(l, r) = dst else {
                return Err("target is not a disjunction".into());
            };
            if !complementary(l, r) {
                return Err("target operands are not complementary".into());
            }
            if *src != Concept::Top {
                return Err("source must be top".into());
            }
        }
        CertRule::NegMax => {
            need(1)?;
            let (j, b) = prem(0);
            if *b != Concept::Bot {
                return Err("premise must end at bot".into());
            }
            let Concept::And(l, r) = j else {
                return Err("premise source is not a conjunction".into());
            };
            let ok = [(l, r), (r, l)].into_iter().any(|(p, q)| {
                src == q.as_ref() && *dst == canonicalize(&Concept::not((**p).clone()))
            });
            if !ok {
                return Err("arrow is not a negation-maximality consequence of the premise".into());
            }
        }
        CertRule::NegMin => {
            need(1)?;
            let (t, j) = prem(0);
            if *t != Concept::Top {
                return Err("premise must start at top".into());
            }
            let Concept::Or(l, r) = j else {
                return Err("premise target is not a disjunction".into());
            };
            let ok = [(l, r), (r, l)].into_iter().any(|(p, q)| {
                *src == canonicalize(&Concept::not((**p).clone())) && dst == q.as_ref()
            });
            if !ok {
                return Err("arrow is not a negation-minimality consequence of the premise".into());
            }
        }
        CertRule::ForallDual => {
            need(0)?;
            let dual_of = |c: &Concept| -> Option<Concept> {
                if let Concept::Forall(role, filler) = c {
                    Some(canonicalize(&Concept::not(Concept::some(
                        role.clone(),
                        Concept::not((**filler).clone()),
                    ))))
                } else {
                    None
                }
            };
            let forward = dual_of(src).is_some_and(|d| d == *dst);
            let backward = dual_of(dst).is_some_and(|d| d == *src);
            if !forward && !backward {
                return Err("endpoints are not a universal and its dual".into());
            }
        }
        CertRule::ExistEmpty => {
            need(1)?;
            let (x, b) = prem(0);
            if *b != Concept::Bot || *dst != Concept::Bot {
                return Err("rule concludes bot from an empty filler".into());
            }
            let Concept::Exists(_, f) = src else {
                return Err("source is not an existential".into());
            };
            if f.as_ref() != x {
                return Err("premise source is not the filler".into());
            }
        }
        CertRule::ExistSub => {
            need(1)?;
            let (x, y) = prem(0);
            let (Concept::Exists(r1, f1), Concept::Exists(r2, f2)) = (src, dst) else {
                return Err("endpoints are not existentials".into());
            };
            if r1 != r2 || f1.as_ref() != x || f2.as_ref() != y {
                return Err("premise does not connect the fillers over one role".into());
            }
        }
        CertRule::ForallSub => {
            need(1)?;
            let (x, y) = prem(0);
            let (Concept::Forall(r1, f1), Concept::Forall(r2, f2)) = (src, dst) else {
                return Err("endpoints are not universals".into());
            };
            if r1 != r2 || f1.as_ref() != x || f2.as_ref() != y {
                return Err("premise does not connect the fillers over one role".into());
            }
        }
        CertRule::ForallExist => {
            need(0)?;
            let Concept::And(l, r) = src else {
                return Err("source is not a conjunction".into());
            };
            let ok = [(l, r), (r, l)].into_iter().any(|(a, b)| {
                if let (Concept::Exists(re, x), Concept::Forall(rf, y)) = (a.as_ref(), b.as_ref()) {
                    re == rf
                        && *dst
                            == canonicalize(&Concept::some(
                                re.clone(),
                                Concept::and((**x).clone(), (**y).clone()),
                            ))
                } else {
                    false
                }
            });
            if !ok {
                return Err(
                    "source does not pair an existential with a universal over one role".into(),
                );
            }
        }
    }
    Ok(())
}

/// All concepts a replay universe must intern: every arrow endpoint plus
/// each step's helper objects.
pub fn guided_extras(cert: &Certificate) -> Vec<Concept> {
    let mut set = BTreeSet::new();
    set.insert(canonicalize(&cert.concept));
    for s in &cert.steps {
        set.insert(s.arrow.0.clone());
        set.insert(s.arrow.1.clone());
        set.extend(s.introduces.iter().cloned());
    }
    set.into_iter().collect()
}

/// Build and saturate the certificate-guided universe.
pub fn guided_category(cert: &Certificate, onto: &Ontology) -> Result<Category> {
    let cfg = UniverseConfig { extra_objects: guided_extras(cert), ..Default::default() };
    let mut cat = Category::build_universe(&cert.concept, onto, &cfg)?;
    cat.saturate();
    Ok(cat)
}

/// Indices of certificate steps whose arrows the saturated category fails
/// to reproduce (empty for a complete replay).
pub fn missing_replays(cert: &Certificate, cat: &Category) -> Result<Vec<usize>> {
    let mut missing = Vec::new();
    for (i, s) in cert.steps.iter().enumerate() {
        if !cat.has_arrow(&s.arrow.0, &s.arrow.1)? {
            missing.push(i);
        }
    }
    Ok(missing)
}

fn canon_label(tree: &CompletionTree, node: usize) -> BTreeSet<Concept> {
    tree.nodes[node].label.iter().map(canonicalize).collect()
}

/// Right-nested conjunction over the printed-order member list. The result
/// is canonical, every member is an operand subtree, and equal member sets
/// give byte-identical objects.
fn conj_of(members: &BTreeSet<Concept>) -> Concept {
    let mut list: Vec<&Concept> = members.iter().collect();
    list.sort_by(|a, b| a.to_string().cmp(&b.to_string()));
    let mut it = list.into_iter().rev();
    let mut acc = it.next().expect("labels are never empty").clone();
    for c in it {
        acc = Concept::and(c.clone(), acc);
    }
    canonicalize(&acc)
}

fn contains(tree: &Concept, member: &Concept) -> bool {
    if tree == member {
        return true;
    }
    match tree {
        Concept::And(l, r) => contains(l, member) || contains(r, member),
        _ => false,
    }
}

struct Builder<'a> {
    meta: &'a MetaTree,
    steps: Vec<CertStep>,
    memo: BTreeMap<(Concept, Concept), usize>,
}

impl Builder<'_> {
    fn arrow(&self, i: usize) -> (Concept, Concept) {
        self.steps[i].arrow.clone()
    }

    fn push(
        &mut self,
        src: Concept,
        dst: Concept,
        rule: CertRule,
        premises: Vec<usize>,
        introduces: Vec<Concept>,
    ) -> usize {
        if let Some(&i) = self.memo.get(&(src.clone(), dst.clone())) {
            return i;
        }
        let i = self.steps.len();
        self.memo.insert((src.clone(), dst.clone()), i);
        self.steps.push(CertStep { arrow: (src, dst), rule, premises, introduces });
        i
    }

    fn identity(&mut self, x: &Concept) -> usize {
        self.push(x.clone(), x.clone(), CertRule::Identity, vec![], vec![])
    }

    fn compose(&mut self, i: usize, j: usize) -> usize {
        let (a, m1) = self.arrow(i);
        let (m2, c) = self.arrow(j);
        debug_assert_eq!(m1, m2, "composition endpoints must chain");
        if a == m1 {
            return j;
        }
        if m2 == c {
            return i;
        }
        self.push(a, c, CertRule::Compose, vec![i, j], vec![])
    }

    /// `from -> member` by walking conjunction operands.
    fn proj(&mut self, from: &Concept, member: &Concept) -> usize {
        if from == member {
            return self.identity(from);
        }
        let Concept::And(l, r) = from else {
            panic!("projection target {member} does not occur in {from}")
        };
        let next = if contains(l, member) { l } else { r };
        debug_assert!(contains(next, member));
        let s1 = self.push(from.clone(), (**next).clone(), CertRule::ConjProj, vec![], vec![]);
        let s2 = self.proj(next, member);
        self.compose(s1, s2)
    }

    /// `src -> target` where `target` is a conjunction tree whose operand
    /// subtrees bottom out at keys of `members` (each mapping to an
    /// already-derived `src -> member` step).
    fn pair_members(
        &mut self,
        src: &Concept,
        target: &Concept,
        members: &BTreeMap<Concept, usize>,
    ) -> usize {
        if let Some(&i) = members.get(target) {
            return i;
        }
        let Concept::And(l, r) = target else {
            panic!("pairing target {target} is not covered by the member set")
        };
        let li = self.pair_members(src, l, members);
        let ri = self.pair_members(src, r, members);
        self.push(src.clone(), target.clone(), CertRule::ConjPair, vec![li, ri], vec![])
    }

    fn axiom_route(&mut self, src: &Concept, clause: &Concept) -> usize {
        let t = self.push(src.clone(), Concept::Top, CertRule::Terminal, vec![], vec![]);
        let ax = self.push(Concept::Top, clause.clone(), CertRule::Axiom, vec![], vec![]);
        self.compose(t, ax)
    }

    /// Proof of `conj_of(label(clash node)) -> bot` inside one tree.
    fn clash_proof(&mut self, eidx: usize) -> (usize, usize) {
        let tree = &self.meta.entries[eidx].tree;
        let clash = tree.clash.clone().expect("clashed tree records its clash");
        let members = canon_label(tree, clash.node);
        let conj = conj_of(&members);
        let step = match clash.kind {
            ClashKind::BotInLabel => self.proj(&conj, &Concept::Bot),
            ClashKind::ComplementaryPair(name) => {
                let a = Concept::name(name);
                let na = canonicalize(&Concept::not(a.clone()));
                let i1 = self.proj(&conj, &a);
                let i2 = self.proj(&conj, &na);
                let t = canonicalize(&Concept::and(a, na));
                let p = self.push(conj.clone(), t.clone(), CertRule::ConjPair, vec![i1, i2], vec![]);
                let nb = self.push(t, Concept::Bot, CertRule::NegBot, vec![], vec![]);
                self.compose(p, nb)
            }
        };
        (clash.node, step)
    }

    /// Carry a proof `conj_of(label(node)) -> bot` upward until the node
    /// has a disjunct pick in this tree (a split above will absorb it) or
    /// the root is reached.
    fn lift(&mut self, eidx: usize, mut node: usize, mut proof: usize) -> Result<(usize, usize)> {
        let tree = &self.meta.entries[eidx].tree;
        let root = tree.root();
        while node != root && !tree.nodes[node].has_pick() {
            proof = self.lift_step(eidx, node, proof)?;
            node = tree.nodes[node].parent.expect("non-root node has a parent");
        }
        Ok((node, proof))
    }

    /// One lift: from `conj_of(label(c)) -> bot` at a created node to
    /// `conj_of(label(parent)) -> bot`. Rebuilds the child label from the
    /// creating existential's filler joined with every universal delivery,
    /// pushes the contradiction under the existential, and anchors the
    /// existential-universal bundle inside the parent label.
    fn lift_step(&mut self, eidx: usize, c: usize, proof: usize) -> Result<usize> {
        let meta = self.meta;
        let tree = &meta.entries[eidx].tree;
        let n = &tree.nodes[c];
        let z = n.parent.expect("lifted node has a parent");
        let role = n.role.clone().expect("created node has an edge role");
        let creator = canonicalize(n.creator.as_ref().expect("created node has a creator"));
        let d0 = match &creator {
            Concept::Exists(r, f) => {
                debug_assert_eq!(*r, role);
                (**f).clone()
            }
            _ => unreachable!("creators are existentials"),
        };
        let deliveries: Vec<(Concept, Concept)> = n
            .history
            .iter()
            .filter_map(|(m, o)| match o {
                Origin::ForallFrom(fa) => Some((canonicalize(m), canonicalize(fa))),
                _ => None,
            })
            .collect();

        // g-chain: the filler conjoined with each delivery in turn.
        let mut g = vec![d0.clone()];
        for (dk, _) in &deliveries {
            g.push(canonicalize(&Concept::and(g.last().unwrap().clone(), dk.clone())));
        }
        let gm = g.last().unwrap().clone();

        // Every label member of c, derived from gm.
        let mut map: BTreeMap<Concept, usize> = BTreeMap::new();
        for (m_raw, origin) in &n.history {
            let m = canonicalize(m_raw);
            if map.contains_key(&m) {
                continue;
            }
            let idx = match origin {
                Origin::Creator | Origin::ForallFrom(_) => self.proj(&gm, &m),
                Origin::Clause(_) => self.axiom_route(&gm, &m),
                Origin::ConjFrom(parent_c) => {
                    let pm = canonicalize(parent_c);
                    let base = *map.get(&pm).expect("conjunction source precedes its parts");
                    let pr = self.proj(&pm, &m);
                    self.compose(base, pr)
                }
                Origin::Root | Origin::DisjPick(_) => {
                    return Err(Error::Malformed(
                        "pick or root member on a lifted node".into(),
                    ))
                }
            };
            map.insert(m, idx);
        }
        let members = canon_label(tree, c);
        let conj_c = conj_of(&members);
        let pair = self.pair_members(&gm, &conj_c, &map);
        let gm_bot = self.compose(pair, proof);
        let em = canonicalize(&Concept::some(role.clone(), gm.clone()));
        let ee = self.push(em, Concept::Bot, CertRule::ExistEmpty, vec![gm_bot], vec![]);

        // J-chain: creator joined with each universal; inductively map it
        // into the existential over the joined filler.
        let mut jk = creator.clone();
        let mut ek = canonicalize(&Concept::some(role.clone(), canonicalize(&d0)));
        debug_assert_eq!(jk, ek);
        let mut ih = self.identity(&jk);
        for (k, (_, fak)) in deliveries.iter().enumerate() {
            let jk1 = canonicalize(&Concept::and(jk.clone(), fak.clone()));
            let ek1 = canonicalize(&Concept::some(role.clone(), g[k + 1].clone()));
            let p1 = self.proj(&jk1, &jk);
            let c1 = self.compose(p1, ih);
            let p2 = self.proj(&jk1, fak);
            let kk = canonicalize(&Concept::and(ek.clone(), fak.clone()));
            let pr = self.push(jk1.clone(), kk.clone(), CertRule::ConjPair, vec![c1, p2], vec![]);
            let fe = self.push(kk, ek1.clone(), CertRule::ForallExist, vec![], vec![]);
            ih = self.compose(pr, fe);
            jk = jk1;
            ek = ek1;
        }

        // Anchor the bundle inside the parent label.
        let zmembers = canon_label(tree, z);
        let conj_z = conj_of(&zmembers);
        let mut anchor = self.proj(&conj_z, &creator);
        let mut j_acc = creator;
        for (_, fak) in &deliveries {
            let pj = self.proj(&conj_z, fak);
            let j_next = canonicalize(&Concept::and(j_acc.clone(), fak.clone()));
            anchor = self.push(
                conj_z.clone(),
                j_next.clone(),
                CertRule::ConjPair,
                vec![anchor, pj],
                vec![],
            );
            j_acc = j_next;
        }
        debug_assert_eq!(j_acc, jk);
        let to_em = self.compose(anchor, ih);
        Ok(self.compose(to_em, ee))
    }

    /// Post-order over the meta-tree. Returns a node and a proof of
    /// `conj_of(label(node)) -> bot` valid in this entry's snapshot; the
    /// node is pick-free here unless a split further up will absorb it.
    fn process(&mut self, eidx: usize) -> Result<(usize, usize)> {
        match self.meta.entries[eidx].state {
            TreeState::Clashed => {
                let (node, p) = self.clash_proof(eidx);
                self.lift(eidx, node, p)
            }
            TreeState::Internal => {
                let (li, ri) = self.meta.entries[eidx].children.expect("internal entry");
                let split = self.meta.entries[eidx].split.clone().expect("internal entry");
                let (w1, p1) = self.process(li)?;
                if w1 != split.node {
                    // The child's proof never touched the split node, so
                    // it reads verbatim in this snapshot; the sibling
                    // branch is irrelevant to it.
                    return Ok((w1, p1));
                }
                let (w2, p2) = self.process(ri)?;
                if w2 != split.node {
                    return Ok((w2, p2));
                }
                let x_bot = self.or_passing(eidx, &split, li, ri, p1, p2)?;
                self.lift(eidx, split.node, x_bot)
            }
            TreeState::Complete => Err(Error::Satisfiable(
                "refutation walk reached a clash-free tree".into(),
            )),
            TreeState::Pending => Err(Error::Malformed(
                "meta-tree still holds an unprocessed tree".into(),
            )),
        }
    }

    /// Both children collapsed at the split node: distribute the rest of
    /// the label over the disjunction and join the branch proofs.
    fn or_passing(
        &mut self,
        eidx: usize,
        split: &Split,
        li: usize,
        ri: usize,
        p1: usize,
        p2: usize,
    ) -> Result<usize> {
        let meta = self.meta;
        let x = split.node;
        let members = canon_label(&meta.entries[eidx].tree, x);
        let oc = canonicalize(&split.disjunction);
        debug_assert!(members.contains(&oc));
        let picks = [canonicalize(&split.left_pick), canonicalize(&split.right_pick)];
        let mut w = members.clone();
        w.remove(&oc);
        let conj_w = if w.is_empty() { None } else { Some(conj_of(&w)) };
        let legs: [Concept; 2] = match &conj_w {
            Some(cw) => [
                canonicalize(&Concept::and(cw.clone(), picks[0].clone())),
                canonicalize(&Concept::and(cw.clone(), picks[1].clone())),
            ],
            None => [picks[0].clone(), picks[1].clone()],
        };

        let mut leg_bots = [0usize; 2];
        for (i, (child, proof)) in [(li, p1), (ri, p2)].into_iter().enumerate() {
            let ct = &meta.entries[child].tree;
            let cmembers = canon_label(ct, x);
            let mut map: BTreeMap<Concept, usize> = BTreeMap::new();
            for (m_raw, origin) in &ct.nodes[x].history {
                let m = canonicalize(m_raw);
                if map.contains_key(&m) {
                    continue;
                }
                let leg = legs[i].clone();
                let idx = if w.contains(&m) {
                    let cw = conj_w.as_ref().unwrap().clone();
                    let a = self.proj(&leg, &cw);
                    let b = self.proj(&cw, &m);
                    self.compose(a, b)
                } else if m == oc {
                    let a = self.proj(&leg, &picks[i]);
                    let b = self.push(picks[i].clone(), oc.clone(), CertRule::DisjInj, vec![], vec![]);
                    self.compose(a, b)
                } else if m == picks[i] {
                    self.proj(&leg, &m)
                } else {
                    match origin {
                        Origin::ConjFrom(pc) => {
                            let pm = canonicalize(pc);
                            let base = *map
                                .get(&pm)
                                .expect("conjunction source precedes its parts");
                            let pr = self.proj(&pm, &m);
                            self.compose(base, pr)
                        }
                        Origin::Clause(_) => self.axiom_route(&leg, &m),
                        _ => {
                            return Err(Error::Malformed(format!(
                                "unexpected member {m} at a split node"
                            )))
                        }
                    }
                };
                map.insert(m, idx);
            }
            let conj_ci = conj_of(&cmembers);
            let pair = self.pair_members(&legs[i], &conj_ci, &map);
            leg_bots[i] = self.compose(pair, proof);
        }

        let or_legs = canonicalize(&Concept::or(legs[0].clone(), legs[1].clone()));
        let du = self.push(
            or_legs.clone(),
            Concept::Bot,
            CertRule::DisjUniv,
            vec![leg_bots[0], leg_bots[1]],
            vec![],
        );
        let (target, x_bot) = match &conj_w {
            Some(cw) => {
                let x_obj = canonicalize(&Concept::and(cw.clone(), oc.clone()));
                let distrib =
                    self.push(x_obj.clone(), or_legs, CertRule::ConjDistrib, vec![], vec![]);
                (x_obj, self.compose(distrib, du))
            }
            None => {
                debug_assert_eq!(or_legs, oc);
                (oc.clone(), du)
            }
        };

        let conj_x = conj_of(&members);
        if conj_x == target {
            return Ok(x_bot);
        }
        let anchor = match &conj_w {
            Some(cw) => {
                let wmap: BTreeMap<Concept, usize> = {
                    let mut m = BTreeMap::new();
                    for member in &w {
                        let i = self.proj(&conj_x, member);
                        m.insert(member.clone(), i);
                    }
                    m
                };
                let to_cw = self.pair_members(&conj_x, &cw.clone(), &wmap);
                let to_oc = self.proj(&conj_x, &oc);
                self.push(
                    conj_x.clone(),
                    target.clone(),
                    CertRule::ConjPair,
                    vec![to_cw, to_oc],
                    vec![],
                )
            }
            None => self.proj(&conj_x, &oc),
        };
        Ok(self.compose(anchor, x_bot))
    }

    /// Close the root: map the normalized concept onto the root label,
    /// attach the meta-proof, and bridge from the original form if it
    /// differs from its normal form.
    fn finalize(&mut self, c0: &Concept, root_proof: usize) -> Result<usize> {
        let t0 = &self.meta.entries[0].tree;
        let v0 = t0.root();
        let s = canonicalize(&nnf(c0));
        let mut map: BTreeMap<Concept, usize> = BTreeMap::new();
        for (m_raw, origin) in &t0.nodes[v0].history {
            let m = canonicalize(m_raw);
            if map.contains_key(&m) {
                continue;
            }
            let idx = match origin {
                Origin::Root => {
                    debug_assert_eq!(m, s);
                    self.identity(&s)
                }
                Origin::Clause(_) => self.axiom_route(&s, &m),
                Origin::ConjFrom(pc) => {
                    let pm = canonicalize(pc);
                    let base = *map.get(&pm).expect("conjunction source precedes its parts");
                    let pr = self.proj(&pm, &m);
                    self.compose(base, pr)
                }
                _ => return Err(Error::Malformed("unexpected member origin at the root".into())),
            };
            map.insert(m, idx);
        }
        let members = canon_label(t0, v0);
        let conj0 = conj_of(&members);
        let pair = self.pair_members(&s, &conj0, &map);
        let s_bot = self.compose(pair, root_proof);
        let c0c = canonicalize(c0);
        if c0c == s {
            return Ok(s_bot);
        }
        let b = self.bridge(c0).expect("distinct canonical forms need a bridge");
        Ok(self.compose(b, s_bot))
    }

    /// `canon(x) -> canon(nnf(x))`, or None when they coincide.
    fn bridge(&mut self, x: &Concept) -> Option<usize> {
        let cx = canonicalize(x);
        let nx = canonicalize(&nnf(x));
        if cx == nx {
            return None;
        }
        Some(match x {
            Concept::Top | Concept::Bot | Concept::Name(_) => {
                unreachable!("atoms are their own normal form")
            }
            Concept::And(l, r) => {
                let leg = |b: &mut Self, operand: &Concept| -> usize {
                    let p = b.proj(&cx, &canonicalize(operand));
                    match b.bridge(operand) {
                        Some(br) => b.compose(p, br),
                        None => p,
                    }
                };
                let il = leg(self, l);
                let ir = leg(self, r);
                self.push(cx, nx, CertRule::ConjPair, vec![il, ir], vec![])
            }
            Concept::Or(l, r) => {
                let leg = |b: &mut Self, operand: &Concept| -> usize {
                    let no = canonicalize(&nnf(operand));
                    let inj = b.push(no, nx.clone(), CertRule::DisjInj, vec![], vec![]);
                    match b.bridge(operand) {
                        Some(br) => b.compose(br, inj),
                        None => inj,
                    }
                };
                let il = leg(self, l);
                let ir = leg(self, r);
                self.push(cx, nx, CertRule::DisjUniv, vec![il, ir], vec![])
            }
            Concept::Exists(_, f) => {
                let b = self.bridge(f).expect("filler changed under normalization");
                self.push(cx, nx, CertRule::ExistSub, vec![b], vec![])
            }
            Concept::Forall(role, f) => {
                let b = self.bridge(f).expect("filler changed under normalization");
                let (bx, by) = self.arrow(b);
                let intro = forall_sub_helpers(role, &bx, &by);
                self.push(cx, nx, CertRule::ForallSub, vec![b], intro)
            }
            Concept::Not(inner) => return Some(self.bridge_not(inner, &cx, &nx)),
        })
    }

    /// `(top -> (or Z (not Z)))` then minimality: `(not (not Z)) -> Z`.
    fn double_neg_elim(&mut self, z: &Concept) -> usize {
        let nz = canonicalize(&Concept::not(z.clone()));
        let nnz = canonicalize(&Concept::not(nz.clone()));
        let j = canonicalize(&Concept::or(z.clone(), nz));
        let t = self.push(Concept::Top, j, CertRule::NegTop, vec![], vec![]);
        self.push(nnz, z.clone(), CertRule::NegMin, vec![t], vec![])
    }

    /// From `u -> v` derive `(not v) -> (not u)`.
    fn contrapose(&mut self, uv: usize) -> usize {
        let (u, v) = self.arrow(uv);
        let nu = canonicalize(&Concept::not(u.clone()));
        let nv = canonicalize(&Concept::not(v.clone()));
        let a = canonicalize(&Concept::and(u.clone(), nv.clone()));
        let p1 = self.proj(&a, &u);
        let c1 = self.compose(p1, uv);
        let p2 = self.proj(&a, &nv);
        let vv = canonicalize(&Concept::and(v, nv.clone()));
        let pr = self.push(a.clone(), vv.clone(), CertRule::ConjPair, vec![c1, p2], vec![]);
        let nb = self.push(vv, Concept::Bot, CertRule::NegBot, vec![], vec![]);
        let ab = self.compose(pr, nb);
        self.push(nv, nu, CertRule::NegMax, vec![ab], vec![])
    }

    fn bridge_not(&mut self, inner: &Concept, cx: &Concept, nx: &Concept) -> usize {
        match inner {
            Concept::Top => {
                // (not top) -> bot through the complementary pair on top.
                let j = canonicalize(&Concept::or(Concept::Bot, Concept::Top));
                let inj = self.push(Concept::Top, j, CertRule::DisjInj, vec![], vec![]);
                self.push(cx.clone(), nx.clone(), CertRule::NegMin, vec![inj], vec![])
            }
            Concept::Bot => self.push(cx.clone(), Concept::Top, CertRule::Terminal, vec![], vec![]),
            Concept::Name(_) => unreachable!("negated names are their own normal form"),
            Concept::Not(z) => {
                let elim = self.double_neg_elim(&canonicalize(z));
                match self.bridge(z) {
                    Some(b) => self.compose(elim, b),
                    None => elim,
                }
            }
            Concept::And(l, r) => {
                // Push the negation through the conjunction: derive
                // top -> (or (and l r) (or (not l) (not r))) by splitting
                // top over both complementary pairs and distributing, then
                // apply minimality.
                let ab = canonicalize(inner);
                let (c1, c2) = match &ab {
                    Concept::And(a, b) => ((**a).clone(), (**b).clone()),
                    _ => unreachable!(),
                };
                let nc1 = canonicalize(&Concept::not(c1.clone()));
                let nc2 = canonicalize(&Concept::not(c2.clone()));
                let or1 = canonicalize(&Concept::or(c1.clone(), nc1.clone()));
                let or2 = canonicalize(&Concept::or(c2.clone(), nc2.clone()));
                let t1 = self.push(Concept::Top, or1.clone(), CertRule::NegTop, vec![], vec![]);
                let t2 = self.push(Concept::Top, or2.clone(), CertRule::NegTop, vec![], vec![]);
                let p = canonicalize(&Concept::and(or1.clone(), or2.clone()));
                let pr = self.push(Concept::Top, p.clone(), CertRule::ConjPair, vec![t1, t2], vec![]);
                let m1 = canonicalize(&Concept::and(or1.clone(), c2.clone()));
                let m2 = canonicalize(&Concept::and(or1, nc2.clone()));
                let or_m = canonicalize(&Concept::or(m1.clone(), m2.clone()));
                let d1 = self.push(p, or_m.clone(), CertRule::ConjDistrib, vec![], vec![]);
                let n2 = canonicalize(&Concept::and(nc1.clone(), c2));
                let or_n = canonicalize(&Concept::or(ab.clone(), n2.clone()));
                let d2 = self.push(m1, or_n.clone(), CertRule::ConjDistrib, vec![], vec![]);
                let nor = canonicalize(&Concept::or(nc1.clone(), nc2.clone()));
                let j0 = canonicalize(&Concept::or(ab.clone(), nor.clone()));
                let q1 = self.proj(&n2, &nc1);
                let q2 = self.push(nc1, nor.clone(), CertRule::DisjInj, vec![], vec![]);
                let q3 = self.push(nor.clone(), j0.clone(), CertRule::DisjInj, vec![], vec![]);
                let q12 = self.compose(q1, q2);
                let n2_j0 = self.compose(q12, q3);
                let ab_j0 = self.push(ab, j0.clone(), CertRule::DisjInj, vec![], vec![]);
                let orn_j0 = self.push(or_n, j0.clone(), CertRule::DisjUniv, vec![ab_j0, n2_j0], vec![]);
                let m1_j0 = self.compose(d2, orn_j0);
                let r1 = self.proj(&m2, &nc2);
                let r2 = self.push(nc2, nor.clone(), CertRule::DisjInj, vec![], vec![]);
                let r12 = self.compose(r1, r2);
                let m2_j0 = self.compose(r12, q3);
                let orm_j0 = self.push(or_m, j0.clone(), CertRule::DisjUniv, vec![m1_j0, m2_j0], vec![]);
                let pd = self.compose(pr, d1);
                let top_j0 = self.compose(pd, orm_j0);
                let dm = self.push(cx.clone(), nor.clone(), CertRule::NegMin, vec![top_j0], vec![]);
                // Congruence under the disjunction of negated operands.
                let leg = |b: &mut Self, operand: &Concept| -> usize {
                    let neg = Concept::not(operand.clone());
                    let no = canonicalize(&nnf(&neg));
                    let inj = b.push(no, nx.clone(), CertRule::DisjInj, vec![], vec![]);
                    match b.bridge(&neg) {
                        Some(br) => b.compose(br, inj),
                        None => inj,
                    }
                };
                let il = leg(self, l);
                let ir = leg(self, r);
                let du = self.push(nor, nx.clone(), CertRule::DisjUniv, vec![il, ir], vec![]);
                self.compose(dm, du)
            }
            Concept::Or(l, r) => {
                // Minimality against (or (or l r) (not l)) pins down
                // (not (or l r)) -> (not l); same for the other operand;
                // pair them and finish by congruence.
                let abo = canonicalize(inner);
                let (c1, c2) = match &abo {
                    Concept::Or(a, b) => ((**a).clone(), (**b).clone()),
                    _ => unreachable!(),
                };
                let nc1 = canonicalize(&Concept::not(c1.clone()));
                let nc2 = canonicalize(&Concept::not(c2.clone()));
                let nand = canonicalize(&Concept::and(nc1.clone(), nc2.clone()));
                let pin = |b: &mut Self, cze: &Concept, ncz: &Concept| -> usize {
                    let orz = canonicalize(&Concept::or(cze.clone(), ncz.clone()));
                    let tz = b.push(Concept::Top, orz.clone(), CertRule::NegTop, vec![], vec![]);
                    let jz = canonicalize(&Concept::or(abo.clone(), ncz.clone()));
                    let a1 = b.push(cze.clone(), abo.clone(), CertRule::DisjInj, vec![], vec![]);
                    let a2 = b.push(abo.clone(), jz.clone(), CertRule::DisjInj, vec![], vec![]);
                    let cz_jz = b.compose(a1, a2);
                    let b1 = b.push(ncz.clone(), jz.clone(), CertRule::DisjInj, vec![], vec![]);
                    let orz_jz = b.push(orz, jz.clone(), CertRule::DisjUniv, vec![cz_jz, b1], vec![]);
                    let top_jz = b.compose(tz, orz_jz);
                    b.push(cx.clone(), ncz.clone(), CertRule::NegMin, vec![top_jz], vec![])
                };
                let nm1 = pin(self, &c1, &nc1);
                let nm2 = pin(self, &c2, &nc2);
                let pr = self.push(cx.clone(), nand.clone(), CertRule::ConjPair, vec![nm1, nm2], vec![]);
                if nand == *nx {
                    return pr;
                }
                let leg = |b: &mut Self, operand: &Concept| -> usize {
                    let neg = Concept::not(operand.clone());
                    let no = canonicalize(&neg);
                    let p = b.proj(&nand, &no);
                    match b.bridge(&neg) {
                        Some(br) => b.compose(p, br),
                        None => p,
                    }
                };
                let il = leg(self, l);
                let ir = leg(self, r);
                let cong = self.push(nand, nx.clone(), CertRule::ConjPair, vec![il, ir], vec![]);
                self.compose(pr, cong)
            }
            Concept::Exists(role, f) => {
                // (not (some R f)): double negation inside the filler,
                // contraposition over the monotone existential, then the
                // universal dual.
                let cf = canonicalize(f);
                let ncf = canonicalize(&Concept::not(cf.clone()));
                let nncf = canonicalize(&Concept::not(ncf.clone()));
                let elim = self.double_neg_elim(&cf);
                let ex_nncf = canonicalize(&Concept::some(role.clone(), nncf));
                let ex_cf = canonicalize(&Concept::some(role.clone(), cf));
                let es = self.push(ex_nncf.clone(), ex_cf, CertRule::ExistSub, vec![elim], vec![]);
                let ctr = self.contrapose(es);
                let nex_nncf = canonicalize(&Concept::not(ex_nncf));
                let all_ncf = canonicalize(&Concept::all(role.clone(), ncf));
                let fd = self.push(nex_nncf, all_ncf.clone(), CertRule::ForallDual, vec![], vec![]);
                let to_all = self.compose(ctr, fd);
                match self.bridge(&Concept::not((**f).clone())) {
                    None => to_all,
                    Some(b) => {
                        let (bx, by) = self.arrow(b);
                        let intro = forall_sub_helpers(role, &bx, &by);
                        let fs = self.push(all_ncf, nx.clone(), CertRule::ForallSub, vec![b], intro);
                        self.compose(to_all, fs)
                    }
                }
            }
            Concept::Forall(role, f) => {
                // (not (all R f)): contrapose the dual, strip the double
                // negation, then push the filler bridge under the
                // existential.
                let cf = canonicalize(f);
                let ncf = canonicalize(&Concept::not(cf.clone()));
                let ex_ncf = canonicalize(&Concept::some(role.clone(), ncf));
                let nex_ncf = canonicalize(&Concept::not(ex_ncf.clone()));
                let all_cf = canonicalize(&Concept::all(role.clone(), cf));
                let fd = self.push(nex_ncf, all_cf, CertRule::ForallDual, vec![], vec![]);
                let ctr = self.contrapose(fd);
                let elim = self.double_neg_elim(&ex_ncf);
                let to_ex = self.compose(ctr, elim);
                match self.bridge(&Concept::not((**f).clone())) {
                    None => to_ex,
                    Some(b) => {
                        let es = self.push(ex_ncf, nx.clone(), CertRule::ExistSub, vec![b], vec![]);
                        self.compose(to_ex, es)
                    }
                }
            }
        }
    }
}

/// The replay scaffolding behind a universal-monotonicity step: the dual
/// existentials and the conjunction anchors that drive the negation rules.
fn forall_sub_helpers(role: &str, x: &Concept, y: &Concept) -> Vec<Concept> {
    let nx = canonicalize(&Concept::not(x.clone()));
    let ny = canonicalize(&Concept::not(y.clone()));
    let ex = canonicalize(&Concept::some(role.to_string(), nx));
    let ey = canonicalize(&Concept::some(role.to_string(), ny.clone()));
    let nex = canonicalize(&Concept::not(ex.clone()));
    vec![
        ex.clone(),
        ey.clone(),
        canonicalize(&Concept::and(x.clone(), ny.clone())),
        canonicalize(&Concept::and(y.clone(), ny)),
        canonicalize(&Concept::and(ey, nex.clone())),
        canonicalize(&Concept::and(ex, nex)),
    ]
}

/// Run the refutation and turn its meta-tree into a certificate. Errors
/// with [`Error::Satisfiable`] when there is nothing to refute.
pub fn extract_certificate(
    c0: &Concept,
    onto: &Ontology,
    config: &TableauConfig,
) -> Result<Certificate> {
    let hash = ontology_hash(onto);
    let c0c = canonicalize(c0);
    if c0c == Concept::Bot {
        return Ok(Certificate { concept: c0.clone(), ontology_hash: hash, steps: vec![] });
    }
    let verdict = decide_sat_with(c0, onto, config)?;
    if verdict.satisfiable {
        return Err(Error::Satisfiable(format!(
            "{c0} is satisfiable under the ontology; nothing to certify"
        )));
    }
    let mut b = Builder { meta: &verdict.meta, steps: Vec::new(), memo: BTreeMap::new() };
    let (w, p) = b.process(0)?;
    if w != verdict.meta.entries[0].tree.root() {
        return Err(Error::Malformed(
            "refutation did not close at the root".into(),
        ));
    }
    let final_idx = b.finalize(c0, p)?;
    if final_idx != b.steps.len() - 1 {
        // Memoization can resolve the goal arrow to an earlier step; the
        // checker wants it last, so restate it.
        let idb = b.identity(&Concept::Bot);
        b.steps.push(CertStep {
            arrow: (c0c, Concept::Bot),
            rule: CertRule::Compose,
            premises: vec![final_idx, idb],
            introduces: vec![],
        });
    }
    Ok(Certificate { concept: c0.clone(), ontology_hash: hash, steps: b.steps })
}
