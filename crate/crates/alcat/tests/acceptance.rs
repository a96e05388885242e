//! End-to-end acceptance gate. Each test prints one PASS line with the
//! numbers behind it; criteria 5 through 9 share one 500-instance corpus.

use std::sync::OnceLock;
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use alcat::category::{fixtures, RuleMask};
use alcat::certificate::{check_certificate, extract_certificate};
use alcat::harness::{generate, run_diff_with_budget, DiffReport, GenConfig, Instance};
use alcat::interp::{eval, satisfies, Interpretation};
use alcat::syntax::{parse_concept_loose, Concept};
use alcat::tableau::TableauConfig;

fn corpus() -> &'static (Vec<Instance>, DiffReport) {
    static CORPUS: OnceLock<(Vec<Instance>, DiffReport)> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let cfg = GenConfig {
            seed: 42,
            count: 500,
            names: 3,
            roles: 2,
            depth: 3,
            axioms: 4,
            ..GenConfig::default()
        };
        let instances = generate(&cfg);
        let report = run_diff_with_budget(&cfg, Duration::from_secs(10));
        (instances, report)
    })
}

fn c(s: &str) -> Concept {
    parse_concept_loose(s).unwrap()
}

#[test]
fn criterion_1_meeting_saturation_derives_exactly_the_missing_edge() {
    let mut cat = fixtures::meeting_category();
    cat.saturate();
    let states: Vec<Concept> = fixtures::MEETING_STATES.iter().map(|s| c(s)).collect();
    let given: Vec<(Concept, Concept)> = fixtures::meeting_edges()
        .into_iter()
        .map(|(a, b)| (c(a), c(b)))
        .collect();
    let mut new_arrows = Vec::new();
    for src in &states {
        for dst in &states {
            if src == dst || given.contains(&(src.clone(), dst.clone())) {
                continue;
            }
            if cat.has_arrow(src, dst).unwrap() {
                new_arrows.push((src.clone(), dst.clone()));
            }
        }
    }
    assert_eq!(new_arrows, vec![(c("arrived"), c("finished"))]);
    assert!(!cat.has_arrow(&c("finished"), &c("arrived")).unwrap());
    println!("criterion 1 PASS: exactly one derived state arrow, arrived -> finished");
}

#[test]
fn criterion_2_weak_conjunction_blocks_distributivity_full_mask_restores_it() {
    let mut weak = fixtures::distributivity_category(RuleMask::weak_conjunction());
    weak.saturate();
    let (f, i, t) = (c("F"), c("I"), c("T"));
    let ds = c("(or D S)");
    let f_ds = c("(and (or D S) F)");
    let fd_fs = c("(or (and D F) (and F S))");
    for (x, y) in [(&ds, &t), (&t, &ds), (&f_ds, &f), (&f, &f_ds), (&fd_fs, &i), (&i, &fd_fs)] {
        assert!(weak.has_arrow(x, y).unwrap(), "missing {x} -> {y} under weak conjunction");
    }
    assert!(!weak.has_arrow(&f, &i).unwrap());
    assert!(!weak.has_arrow(&f_ds, &fd_fs).unwrap());

    let mut full = fixtures::distributivity_category(RuleMask::full());
    full.saturate();
    assert!(full.has_arrow(&f_ds, &fd_fs).unwrap());
    assert!(full.has_arrow(&f, &i).unwrap());
    println!("criterion 2 PASS: distributivity blocked weak, derived full");
}

#[test]
fn criterion_3_weak_negation_blocks_double_negation_full_mask_derives_it() {
    let mut weak = fixtures::negation_category(RuleMask::weak_negation());
    weak.saturate();
    assert!(!weak.has_arrow(&c("F"), &c("D")).unwrap());
    assert!(!weak.has_arrow(&c("D"), &c("F")).unwrap());

    let mut dn = fixtures::double_negation_category();
    dn.saturate();
    assert!(dn.has_arrow(&c("A"), &c("(not (not A))")).unwrap());
    assert!(dn.has_arrow(&c("(not (not A))"), &c("A")).unwrap());
    println!("criterion 3 PASS: double negation absent weak, two-way full");
}

#[test]
fn criterion_4_every_lemma_arrow_is_derivable_on_its_minimal_universe() {
    let mut suites = 0;
    let mut arrows = 0;
    for suite in fixtures::lemma_suites() {
        let mut cat = suite.category;
        cat.saturate();
        for (x, y) in &suite.expect {
            assert!(
                cat.has_arrow(x, y).unwrap(),
                "suite {}: missing {x} -> {y}",
                suite.name
            );
            arrows += 1;
        }
        for (x, y) in &suite.forbid {
            assert!(
                !cat.has_arrow(x, y).unwrap(),
                "suite {}: unexpected {x} -> {y}",
                suite.name
            );
        }
        suites += 1;
    }
    assert!(suites >= 10);
    println!("criterion 4 PASS: {arrows} lemma arrows across {suites} suites");
}

#[test]
fn criterion_5_tableau_and_guided_category_agree_on_500_instances() {
    let (_, report) = corpus();
    assert!(
        !report.has_discrepancies(),
        "discrepancies: {:?}",
        report.discrepancies()
    );
    let a = &report.agreement;
    assert_eq!(a.instances, 500);
    let decided = a.instances - a.tableau_skipped;
    assert!(
        decided * 10 >= a.instances * 8,
        "only {decided}/500 decided within budget"
    );
    assert_eq!(a.guided_agreements, decided, "an engine pair disagreed");
    assert!(a.tableau_unsat > 0 && a.tableau_sat > 0);
    assert!(
        report.elapsed < Duration::from_secs(300),
        "corpus took {:?}",
        report.elapsed
    );
    println!(
        "criterion 5 PASS: {} agreements on {} decided of 500 ({} unsat, {} sat, {} skipped) in {:.1}s",
        a.guided_agreements,
        decided,
        a.tableau_unsat,
        a.tableau_sat,
        a.tableau_skipped,
        report.elapsed.as_secs_f64()
    );
}

#[test]
fn criterion_6_sampled_arrows_are_entailments() {
    let (_, report) = corpus();
    let a = &report.agreement;
    assert!(
        a.arrows_checked >= 1000,
        "only {} arrows sampled, need 1000",
        a.arrows_checked
    );
    assert_eq!(a.arrows_failed, 0);
    println!(
        "criterion 6 PASS: {}/{} sampled arrows confirmed as entailments",
        a.arrows_checked - a.arrows_failed,
        a.arrows_checked
    );
}

#[test]
fn criterion_7_certificates_round_trip_and_any_mutation_is_rejected() {
    let (instances, report) = corpus();
    let mut certified = 0;
    for out in &report.outcomes {
        if out.tableau_unsat == Some(true) {
            assert_eq!(
                out.cert_checked,
                Some(true),
                "instance {} lacks a checked certificate",
                out.index
            );
            certified += 1;
        }
    }
    assert!(certified > 0);

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut mutations = 0;
    let refuted: Vec<&Instance> = instances
        .iter()
        .filter(|i| report.outcomes[i.index].tableau_unsat == Some(true))
        .take(20)
        .collect();
    for inst in refuted {
        let cert = extract_certificate(&inst.concept, &inst.onto, &TableauConfig::default())
            .expect("refuted instance certifies");
        if cert.steps.is_empty() {
            continue;
        }
        let picks: Vec<usize> = if cert.steps.len() <= 40 {
            (0..cert.steps.len()).collect()
        } else {
            (0..40).map(|_| rng.gen_range(0..cert.steps.len())).collect()
        };
        for i in picks {
            let mut bad = cert.clone();
            bad.steps[i].arrow.1 = Concept::name("ZZmut");
            assert!(
                check_certificate(&bad, Some(&inst.onto)).is_err(),
                "instance {}: mutated step {i} still accepted",
                inst.index
            );
            mutations += 1;
        }
    }
    assert!(mutations > 0);
    println!(
        "criterion 7 PASS: {certified} certificates checked, {mutations} single-step mutations all rejected"
    );
}

#[test]
fn criterion_8_model_witnesses_are_coherent_with_every_engine() {
    let (instances, report) = corpus();
    let mut validated = 0;
    for out in &report.outcomes {
        let Some(witness) = &out.model_witness else { continue };
        let inst = &instances[out.index];
        let m = Interpretation::from_json(witness).unwrap();
        assert!(
            satisfies(&inst.onto, &m).unwrap(),
            "instance {}: witness violates an axiom",
            out.index
        );
        assert!(
            !eval(&inst.concept, &m).unwrap().is_empty(),
            "instance {}: witness gives the concept an empty extension",
            out.index
        );
        assert_eq!(out.tableau_unsat, Some(false));
        assert_eq!(out.cat_unsat_syntactic, Some(false));
        assert_eq!(out.cat_unsat_guided, Some(false));
        validated += 1;
    }
    assert!(validated > 0, "no witnesses to validate");
    println!("criterion 8 PASS: {validated} model witnesses re-validated against all engines");
}

#[test]
fn criterion_9_tree_shape_invariants_hold_and_every_run_terminates() {
    let (_, report) = corpus();
    let mut checked = 0;
    let mut skipped = 0;
    for out in &report.outcomes {
        match out.tableau_unsat {
            Some(_) => {
                assert_eq!(out.p1, Some(true), "instance {}: clash off-leaf", out.index);
                assert_eq!(out.p2, Some(true), "instance {}: split repeated", out.index);
                checked += 1;
            }
            None => {
                assert!(
                    out.notes.iter().any(|n| n.contains("skipped")),
                    "instance {} neither terminated nor reported a budget skip",
                    out.index
                );
                skipped += 1;
            }
        }
    }
    assert_eq!(checked + skipped, 500);
    println!(
        "criterion 9 PASS: clash-at-leaf and split-freshness on {checked} meta-trees; {skipped} budget skips, no hangs"
    );
}
