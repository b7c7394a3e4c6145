//! Bundled experiments, the reducibility table and the full-register probe.

use ethica_core::corpus::Verdict;
use ethica_core::experiments::{
    bundled_experiments, classify_outcome, conjecture_probe_full_register, experiment,
    reducibility_table, run_experiment, ClassifyError, Evidence, OutcomeClass, RunOptions,
    VerdictKind, EXPERIMENT_NAMES, TABLE_EXPERIMENTS,
};
use ethica_core::search::{EntailmentVerdict, SearchConfig};
use proptest::prelude::*;

fn kind() -> impl Strategy<Value = VerdictKind> {
    prop_oneof![
        Just(VerdictKind::Refuted),
        Just(VerdictKind::NoCounterexample)
    ]
}

proptest! {
    #[test]
    fn classifier_is_total_on_forward_evidence(
        forward in prop::option::of(kind()),
        backward in prop::option::of(kind()),
        auxiliary in prop::option::of(kind()),
        components in prop::collection::vec(kind(), 0..4),
    ) {
        let e = Evidence { forward, backward, auxiliary, components: components.clone() };
        let got = classify_outcome(&e);
        use VerdictKind::*;
        let expected = match forward {
            None => None,
            Some(Refuted) if auxiliary == Some(NoCounterexample) => Some(OutcomeClass::PartialReduction),
            Some(Refuted) => Some(OutcomeClass::FullIrreducibility),
            Some(NoCounterexample) if components.is_empty() => Some(if backward == Some(Refuted) {
                OutcomeClass::FullReduction
            } else {
                OutcomeClass::EqualStrengthTranslation
            }),
            Some(NoCounterexample) if components.iter().all(|c| *c == Refuted) => Some(OutcomeClass::DecompositionOnly),
            Some(NoCounterexample) => None,
        };
        match expected {
            Some(class) => prop_assert_eq!(got, Ok(class)),
            None => prop_assert!(matches!(got, Err(ClassifyError::InsufficientEvidence(_)))),
        }
    }
}

#[test]
fn every_bundled_experiment_meets_its_expectation() {
    let names: Vec<String> = bundled_experiments().into_iter().map(|s| s.name).collect();
    assert_eq!(names, EXPERIMENT_NAMES);
    for spec in bundled_experiments() {
        let r = run_experiment(&spec).unwrap();
        assert!(r.passed(), "{}: {:?}", r.name, r.mismatches);
        if let Some(c) = &r.corpus_check {
            assert_eq!(c.verdict, Verdict::Confirmed, "{}", r.name);
        }
        assert!(r.label.contains("bound"), "{}", r.label);
    }
}

#[test]
fn outcomes_match_the_reducibility_table() {
    let outcome = |name: &str| run_experiment(&experiment(name).unwrap()).unwrap();
    let a12 = outcome("A12_demote");
    assert_eq!(a12.outcome, OutcomeClass::PartialReduction);
    assert!(a12.label.starts_with("Partial reduction; full irreducible"));
    let a13 = outcome("A13_demote");
    assert_eq!(a13.outcome, OutcomeClass::EqualStrengthTranslation);
    assert!(a13.label.starts_with("Equal-strength translation"));
    let a14 = outcome("A14_demote");
    assert_eq!(a14.outcome, OutcomeClass::EqualStrengthTranslation);
    assert!(a14.label.starts_with("Trivial redescription"));
    let a15 = outcome("A15_plenitude");
    assert_eq!(a15.outcome, OutcomeClass::DecompositionOnly);
    assert!(a15.label.starts_with("Decomposition only"));
}

#[test]
fn converse_runs_without_an_expectation() {
    let spec = experiment("A13_converse").unwrap();
    assert!(spec.expectation.is_none());
    let r = run_experiment(&spec).unwrap();
    assert!(r.passed());
    assert!(r.caveats.iter().any(|c| c.contains("no expected verdict")));
}

#[test]
fn table_is_stable_across_runs() {
    let opts = RunOptions::default();
    let a = reducibility_table(&opts).unwrap();
    let b = reducibility_table(&RunOptions {
        workers: Some(1),
        ..opts
    })
    .unwrap();
    assert!(a.passed());
    assert_eq!(a.rows.len(), TABLE_EXPERIMENTS.len());
    for strict in [false, true] {
        assert_eq!(a.to_markdown(strict), b.to_markdown(strict));
        assert_eq!(a.to_json(strict), b.to_json(strict));
    }
    let md = a.to_markdown(false);
    for label in [
        "Partial reduction; full irreducible",
        "Equal-strength translation",
        "Trivial redescription",
        "Decomposition only",
    ] {
        assert!(md.contains(label), "{label} missing from\n{md}");
    }
    assert!(!a.to_markdown(true).contains("Trivial redescription"));
}

#[test]
fn probe_finds_a_verified_model() {
    let p = conjecture_probe_full_register(&SearchConfig::with_max_things(3)).unwrap();
    let EntailmentVerdict::Refuted { things, .. } = p.query.verdict else {
        panic!("probe: {}", p.query.verdict);
    };
    assert!(things <= 3);
    let v = p.verification.expect("refuted probes are verified");
    assert_eq!(v.verdict, Verdict::Confirmed);
    assert!(!v.target_holds);

    let small = conjecture_probe_full_register(&SearchConfig::with_max_things(1)).unwrap();
    assert!(!small.query.verdict.is_refuted());
}

#[test]
fn unknown_experiment() {
    assert!(experiment("A99_demote").is_none());
}
