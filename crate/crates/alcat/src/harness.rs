//! Differential testing: generate seeded random instances, run every
//! engine on each, and cross-check the verdicts. Agreement is judged
//! asymmetrically on purpose: the unguided saturation may stay silent on
//! a refutable concept (its universe is a fixed syntactic slice), but a
//! bottom arrow for a satisfiable concept, a certificate that fails its
//! checker, or a stored arrow that is not a real entailment is a bug in
//! one of the engines.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::category::{Category, UniverseConfig};
use crate::certificate::{
    check_certificate, extract_certificate, guided_category, missing_replays,
};
use crate::error::Error;
use crate::interp::find_model;
use crate::syntax::{nnf, parse_concept_loose, Concept, Gci, Ontology, Signature};
use crate::tableau::{decide_sat_with, entails_with, TableauConfig};

const NAME_POOL: [&str; 4] = ["A", "B", "C", "D"];
const ROLE_POOL: [&str; 2] = ["R", "S"];

/// Stored arrows sampled per instance for entailment cross-checking.
pub const SAMPLES_PER_INSTANCE: usize = 4;

/// Fallback per-instance time budget when `ALC_BUDGET_SECS` is unset.
pub const DEFAULT_BUDGET_SECS: u64 = 10;

/// Per-instance time budget in seconds, from `ALC_BUDGET_SECS` when set.
pub fn budget_secs() -> u64 {
    std::env::var("ALC_BUDGET_SECS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_BUDGET_SECS)
}

/// Relative draw weights for inner connectives. Leaves are drawn when
/// the depth budget runs out, regardless of weights; an all-zero table
/// degenerates to leaves everywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Weights {
    pub name: u32,
    pub not: u32,
    pub and: u32,
    pub or: u32,
    pub some: u32,
    pub all: u32,
}

impl Default for Weights {
    fn default() -> Self {
        Weights { name: 22, not: 18, and: 20, or: 18, some: 12, all: 10 }
    }
}

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub seed: u64,
    pub count: usize,
    /// Concept names drawn from the head of A, B, C, D.
    pub names: usize,
    /// Role names drawn from the head of R, S.
    pub roles: usize,
    /// Connective depth of each instance concept.
    pub depth: usize,
    /// Upper bound on axioms per instance (each draws 0..=axioms).
    pub axioms: usize,
    pub weights: Weights,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            count: 32,
            names: 3,
            roles: 2,
            depth: 3,
            axioms: 3,
            weights: Weights::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub index: usize,
    pub concept: Concept,
    pub onto: Ontology,
}

fn random_concept(
    rng: &mut ChaCha8Rng,
    names: &[&str],
    roles: &[&str],
    w: &Weights,
    depth: usize,
) -> Concept {
    let name = |rng: &mut ChaCha8Rng| Concept::name(names[rng.gen_range(0..names.len())]);
    let role = |rng: &mut ChaCha8Rng| roles[rng.gen_range(0..roles.len())].to_string();
    let total = w.name + w.not + w.and + w.or + w.some + w.all;
    if depth == 0 || total == 0 {
        return match rng.gen_range(0..10u32) {
            0 => Concept::Top,
            1 => Concept::Bot,
            _ => name(rng),
        };
    }
    let mut draw = rng.gen_range(0..total);
    for (kind, weight) in
        [("name", w.name), ("not", w.not), ("and", w.and), ("or", w.or), ("some", w.some)]
    {
        if draw < weight {
            return match kind {
                "name" => name(rng),
                "not" => Concept::not(random_concept(rng, names, roles, w, depth - 1)),
                "and" => Concept::and(
                    random_concept(rng, names, roles, w, depth - 1),
                    random_concept(rng, names, roles, w, depth - 1),
                ),
                "or" => Concept::or(
                    random_concept(rng, names, roles, w, depth - 1),
                    random_concept(rng, names, roles, w, depth - 1),
                ),
                _ => Concept::some(role(rng), random_concept(rng, names, roles, w, depth - 1)),
            };
        }
        draw -= weight;
    }
    Concept::all(role(rng), random_concept(rng, names, roles, w, depth - 1))
}

/// Deterministic instance stream for a seed. Odd indices are
/// pre-normalized so half the refutations skip the normal-form bridge
/// and half exercise it.
pub fn generate(cfg: &GenConfig) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let names = &NAME_POOL[..cfg.names.clamp(1, NAME_POOL.len())];
    let roles = &ROLE_POOL[..cfg.roles.clamp(1, ROLE_POOL.len())];
    let sig = Signature::new(names.iter().copied(), roles.iter().copied())
        .expect("pool names are valid");
    (0..cfg.count)
        .map(|index| {
            let axiom_count = rng.gen_range(0..=cfg.axioms);
            let gcis: Vec<Gci> = (0..axiom_count)
                .map(|_| Gci {
                    lhs: random_concept(&mut rng, names, roles, &cfg.weights, 1),
                    rhs: random_concept(&mut rng, names, roles, &cfg.weights, 2),
                })
                .collect();
            let onto = Ontology::new(sig.clone(), gcis).expect("generated axioms are in-signature");
            let raw = random_concept(&mut rng, names, roles, &cfg.weights, cfg.depth);
            let concept = if index % 2 == 0 { raw } else { nnf(&raw) };
            Instance { index, concept, onto }
        })
        .collect()
}

#[derive(Debug, Clone, Default)]
pub struct InstanceOutcome {
    pub index: usize,
    pub concept: String,
    pub ontology: String,
    /// None when the run hit its time budget.
    pub tableau_unsat: Option<bool>,
    /// Verdict of the unguided (syntactic-universe) saturation.
    pub cat_unsat_syntactic: Option<bool>,
    /// Verdict of the certificate-guided universe; mirrors the unguided
    /// one on satisfiable instances, where no certificate exists.
    pub cat_unsat_guided: Option<bool>,
    /// Bounded model search on satisfiable instances; false means none
    /// within the size bound, not unsatisfiability.
    pub model_found: Option<bool>,
    pub model_witness: Option<String>,
    pub cert_checked: Option<bool>,
    pub cert_steps: Option<usize>,
    pub arrows_checked: usize,
    pub arrows_failed: usize,
    /// Clash placement: every clash sits at a leaf of its tree.
    pub p1: Option<bool>,
    /// Split freshness: no disjunction is split twice along a branch.
    pub p2: Option<bool>,
    pub notes: Vec<String>,
    pub discrepancies: Vec<String>,
}

#[derive(Debug, Clone, Default)]
pub struct Agreement {
    pub instances: usize,
    pub tableau_unsat: usize,
    pub tableau_sat: usize,
    pub tableau_skipped: usize,
    /// Instances where the tableau and guided verdicts coincide.
    pub guided_agreements: usize,
    pub syntactic_unsat: usize,
    /// Tableau-refuted instances the unguided universe stays silent on:
    /// the expected incompleteness gap, not an error.
    pub syntactic_gaps: usize,
    pub models_found: usize,
    pub model_searches_skipped: usize,
    pub certs_checked: usize,
    pub arrows_checked: usize,
    pub arrows_failed: usize,
}

#[derive(Debug, Clone)]
pub struct DiffReport {
    pub seed: u64,
    pub outcomes: Vec<InstanceOutcome>,
    pub agreement: Agreement,
    pub elapsed: Duration,
}

impl DiffReport {
    pub fn discrepancies(&self) -> Vec<String> {
        self.outcomes
            .iter()
            .flat_map(|o| {
                o.discrepancies
                    .iter()
                    .map(move |d| format!("instance {}: {d}", o.index))
            })
            .collect()
    }

    pub fn has_discrepancies(&self) -> bool {
        self.outcomes.iter().any(|o| !o.discrepancies.is_empty())
    }

    pub fn to_json(&self) -> String {
        let outcomes: Vec<serde_json::Value> = self
            .outcomes
            .iter()
            .map(|o| {
                let witness = o.model_witness.as_ref().map(|w| {
                    serde_json::from_str::<serde_json::Value>(w)
                        .unwrap_or_else(|_| serde_json::Value::String(w.clone()))
                });
                serde_json::json!({
                    "index": o.index,
                    "concept": o.concept,
                    "ontology": o.ontology,
                    "tableau_unsat": o.tableau_unsat,
                    "cat_unsat_syntactic": o.cat_unsat_syntactic,
                    "cat_unsat_guided": o.cat_unsat_guided,
                    "model_found": o.model_found,
                    "model_witness": witness,
                    "cert_checked": o.cert_checked,
                    "cert_steps": o.cert_steps,
                    "arrows_checked": o.arrows_checked,
                    "arrows_failed": o.arrows_failed,
                    "p1": o.p1,
                    "p2": o.p2,
                    "notes": o.notes,
                    "discrepancies": o.discrepancies,
                })
            })
            .collect();
        let a = &self.agreement;
        serde_json::to_string_pretty(&serde_json::json!({
            "seed": self.seed,
            "elapsed_secs": self.elapsed.as_secs_f64(),
            "agreement": {
                "instances": a.instances,
                "tableau_unsat": a.tableau_unsat,
                "tableau_sat": a.tableau_sat,
                "tableau_skipped": a.tableau_skipped,
                "guided_agreements": a.guided_agreements,
                "syntactic_unsat": a.syntactic_unsat,
                "syntactic_gaps": a.syntactic_gaps,
                "models_found": a.models_found,
                "model_searches_skipped": a.model_searches_skipped,
                "certs_checked": a.certs_checked,
                "arrows_checked": a.arrows_checked,
                "arrows_failed": a.arrows_failed,
            },
            "outcomes": outcomes,
        }))
        .expect("report serializes")
    }

    pub fn render_table(&self) -> String {
        fn v(x: Option<bool>) -> &'static str {
            match x {
                Some(true) => "unsat",
                Some(false) => "sat",
                None => "-",
            }
        }
        let mut out = String::new();
        out.push_str(&format!(
            "{:>4}  {:>7} {:>9} {:>7} {:>6} {:>5} {:>7}  {}\n",
            "idx", "tableau", "category", "guided", "model", "cert", "arrows", "concept"
        ));
        for o in &self.outcomes {
            let model = match o.model_found {
                Some(true) => "yes",
                Some(false) => "none",
                None => "-",
            };
            let cert = match o.cert_checked {
                Some(true) => "ok",
                Some(false) => "BAD",
                None => "-",
            };
            let arrows = if o.arrows_failed > 0 {
                format!("{}/{}!", o.arrows_checked - o.arrows_failed, o.arrows_checked)
            } else {
                format!("{}", o.arrows_checked)
            };
            let mut concept = o.concept.clone();
            if concept.len() > 56 {
                concept.truncate(53);
                concept.push_str("...");
            }
            let flag = if o.discrepancies.is_empty() { "" } else { "  <-- DISCREPANCY" };
            out.push_str(&format!(
                "{:>4}  {:>7} {:>9} {:>7} {:>6} {:>5} {:>7}  {}{}\n",
                o.index,
                v(o.tableau_unsat),
                v(o.cat_unsat_syntactic),
                v(o.cat_unsat_guided),
                model,
                cert,
                arrows,
                concept,
                flag
            ));
        }
        let a = &self.agreement;
        out.push_str(&format!(
            "\n{} instances in {:.2}s: {} unsat / {} sat / {} skipped; \
             guided agreement {}/{}; unguided gap on {}; \
             {} models found; {} certificates checked; arrows {} checked, {} failed\n",
            a.instances,
            self.elapsed.as_secs_f64(),
            a.tableau_unsat,
            a.tableau_sat,
            a.tableau_skipped,
            a.guided_agreements,
            a.instances - a.tableau_skipped,
            a.syntactic_gaps,
            a.models_found,
            a.certs_checked,
            a.arrows_checked,
            a.arrows_failed
        ));
        for d in self.discrepancies() {
            out.push_str(&format!("DISCREPANCY {d}\n"));
        }
        out
    }
}

/// Run one instance against every engine. `seed` only salts the arrow
/// sampler; the engines themselves are deterministic.
pub fn run_instance(inst: &Instance, budget: Duration, seed: u64) -> InstanceOutcome {
    let mut out = InstanceOutcome {
        index: inst.index,
        concept: inst.concept.to_string(),
        ontology: inst.onto.canonical_text(),
        ..InstanceOutcome::default()
    };
    // Tighter than the library defaults: the fuzzer prefers an honest
    // budget skip over minutes of memory growth on a pathological draw.
    let tcfg = TableauConfig {
        max_trees: 1 << 12,
        max_nodes_per_tree: 1 << 11,
        max_total_nodes: 1 << 16,
        deadline: Some(Instant::now() + budget),
    };

    match decide_sat_with(&inst.concept, &inst.onto, &tcfg) {
        Ok(verdict) => {
            out.tableau_unsat = Some(!verdict.satisfiable);
            out.p1 = Some(verdict.meta.p1_holds());
            out.p2 = Some(verdict.meta.p2_holds());
            if out.p1 == Some(false) {
                out.discrepancies.push("a clash sits on a non-leaf node".into());
            }
            if out.p2 == Some(false) {
                out.discrepancies.push("a disjunction was split twice along a branch".into());
            }
        }
        Err(Error::Budget(m)) => out.notes.push(format!("tableau skipped: {m}")),
        Err(e) => out.discrepancies.push(format!("tableau error: {e}")),
    }

    let mut sample_cat: Option<Category> = None;
    match Category::build_universe(&inst.concept, &inst.onto, &UniverseConfig::default()) {
        Ok(mut cat) => {
            cat.saturate();
            match cat.has_arrow(&inst.concept, &Concept::Bot) {
                Ok(u) => out.cat_unsat_syntactic = Some(u),
                Err(e) => out.discrepancies.push(format!("category lookup error: {e}")),
            }
            sample_cat = Some(cat);
        }
        Err(Error::Budget(m)) => out.notes.push(format!("category skipped: {m}")),
        Err(e) => out.discrepancies.push(format!("category error: {e}")),
    }

    if out.tableau_unsat == Some(false) && out.cat_unsat_syntactic == Some(true) {
        out.discrepancies
            .push("saturation reaches bottom for a concept the tableau satisfies".into());
    }

    match out.tableau_unsat {
        Some(true) => match extract_certificate(&inst.concept, &inst.onto, &tcfg) {
            Ok(cert) => {
                out.cert_steps = Some(cert.steps.len());
                let checked = check_certificate(&cert, Some(&inst.onto)).is_ok();
                out.cert_checked = Some(checked);
                if !checked {
                    out.discrepancies.push("extracted certificate fails its checker".into());
                }
                match guided_category(&cert, &inst.onto) {
                    Ok(cat) => {
                        match missing_replays(&cert, &cat) {
                            Ok(missing) if missing.is_empty() => {}
                            Ok(missing) => out.discrepancies.push(format!(
                                "guided universe cannot replay steps {missing:?}"
                            )),
                            Err(e) => out.discrepancies.push(format!("replay error: {e}")),
                        }
                        match cat.has_arrow(&inst.concept, &Concept::Bot) {
                            Ok(g) => {
                                out.cat_unsat_guided = Some(g);
                                if !g {
                                    out.discrepancies.push(
                                        "guided universe misses the bottom arrow of a refuted concept"
                                            .into(),
                                    );
                                }
                            }
                            Err(e) => {
                                out.discrepancies.push(format!("guided lookup error: {e}"))
                            }
                        }
                    }
                    Err(Error::Budget(m)) => out.notes.push(format!("guided universe skipped: {m}")),
                    Err(e) => out.discrepancies.push(format!("guided build error: {e}")),
                }
            }
            Err(Error::Budget(m)) => out.notes.push(format!("certificate skipped: {m}")),
            Err(e) => out.discrepancies.push(format!("certificate extraction error: {e}")),
        },
        Some(false) => {
            // No certificate exists for a satisfiable concept; the guided
            // verdict degenerates to the unguided one, which soundness
            // forces to stay silent.
            out.cat_unsat_guided = out.cat_unsat_syntactic;
            match find_model(&inst.concept, &inst.onto, 3) {
                Ok(Some(m)) => {
                    out.model_found = Some(true);
                    out.model_witness = Some(m.to_json());
                }
                Ok(None) => {
                    out.model_found = Some(false);
                    out.notes.push("no model within 3 elements (bounded search)".into());
                }
                Err(Error::Budget(m)) => out.notes.push(format!("model search skipped: {m}")),
                Err(e) => out.discrepancies.push(format!("model search error: {e}")),
            }
        }
        None => {}
    }

    if let Some(cat) = &sample_cat {
        let mut rng =
            ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15u64.wrapping_mul(inst.index as u64 + 1));
        let arrows = cat.stored_concept_arrows();
        let mut pool: Vec<&(String, String, &'static str)> = arrows
            .iter()
            .filter(|(s, d, _)| s != d && d != "top" && s != "bot")
            .collect();
        if pool.is_empty() {
            pool = arrows.iter().collect();
        }
        for _ in 0..SAMPLES_PER_INSTANCE.min(pool.len()) {
            let (src_s, dst_s, _) = pool.swap_remove(rng.gen_range(0..pool.len()));
            let (Ok(src), Ok(dst)) = (parse_concept_loose(src_s), parse_concept_loose(dst_s))
            else {
                out.discrepancies.push(format!("stored arrow {src_s} -> {dst_s} does not parse"));
                continue;
            };
            match entails_with(&inst.onto, &src, &dst, &tcfg) {
                Ok(true) => out.arrows_checked += 1,
                Ok(false) => {
                    out.arrows_checked += 1;
                    out.arrows_failed += 1;
                    out.discrepancies
                        .push(format!("stored arrow {src_s} -> {dst_s} is not an entailment"));
                }
                Err(Error::Budget(m)) => out.notes.push(format!("arrow check skipped: {m}")),
                Err(e) => out.discrepancies.push(format!("arrow check error: {e}")),
            }
        }
    }

    out
}

fn summarize(outcomes: &[InstanceOutcome]) -> Agreement {
    let mut a = Agreement { instances: outcomes.len(), ..Agreement::default() };
    for o in outcomes {
        match o.tableau_unsat {
            Some(true) => a.tableau_unsat += 1,
            Some(false) => a.tableau_sat += 1,
            None => a.tableau_skipped += 1,
        }
        if o.tableau_unsat.is_some() && o.tableau_unsat == o.cat_unsat_guided {
            a.guided_agreements += 1;
        }
        if o.cat_unsat_syntactic == Some(true) {
            a.syntactic_unsat += 1;
        }
        if o.tableau_unsat == Some(true) && o.cat_unsat_syntactic == Some(false) {
            a.syntactic_gaps += 1;
        }
        if o.model_found == Some(true) {
            a.models_found += 1;
        }
        if o.notes.iter().any(|n| n.starts_with("model search skipped")) {
            a.model_searches_skipped += 1;
        }
        if o.cert_checked == Some(true) {
            a.certs_checked += 1;
        }
        a.arrows_checked += o.arrows_checked;
        a.arrows_failed += o.arrows_failed;
    }
    a
}

pub fn run_diff_with_budget(cfg: &GenConfig, budget: Duration) -> DiffReport {
    let start = Instant::now();
    let outcomes: Vec<InstanceOutcome> = generate(cfg)
        .iter()
        .map(|inst| run_instance(inst, budget, cfg.seed))
        .collect();
    let agreement = summarize(&outcomes);
    DiffReport { seed: cfg.seed, outcomes, agreement, elapsed: start.elapsed() }
}

/// [`run_diff_with_budget`] with the `ALC_BUDGET_SECS` budget.
pub fn run_diff(cfg: &GenConfig) -> DiffReport {
    run_diff_with_budget(cfg, Duration::from_secs(budget_secs()))
}
