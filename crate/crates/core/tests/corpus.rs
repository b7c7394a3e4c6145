//! The two corpus models against every truth value the source construction
//! states for them, plus the model file format.

use ethica_core::corpus::{
    a12_counter_model, a15_counter_model, corpus_model, parse_model, serialize_model, verify,
    verify_corpus, FidelityFlag, Verdict, CORPUS_NAMES,
};
use ethica_core::logic::{evaluate, evaluate_at, Assignment, Element, FiniteModel, Formula, Sort};
use ethica_core::random::random_models;
use ethica_core::registry::{attribute, axiom, is_god, substance};

fn holds(f: &Formula, m: &FiniteModel) -> bool {
    evaluate(f, m, &Assignment::new()).unwrap()
}

fn at(f: &Formula, m: &FiniteModel, vars: &[(&str, &str)]) -> bool {
    let bindings: Vec<_> = vars
        .iter()
        .map(|(v, label)| {
            (
                v.to_string(),
                Sort::Thing,
                m.element(Sort::Thing, label).unwrap(),
            )
        })
        .collect();
    evaluate_at(f, m, &bindings).unwrap()
}

fn perception_rows(m: &FiniteModel) -> Vec<(String, Vec<String>)> {
    m.things()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let row = (0..m.things().len())
                .filter(|&j| m.holds("intellectPerceivesAsEssence", &[i, j]))
                .map(|j| m.things()[j].clone())
                .collect();
            (s.clone(), row)
        })
        .collect()
}

fn rows(spec: &[(&str, &[&str])]) -> Vec<(String, Vec<String>)> {
    spec.iter()
        .map(|(s, r)| (s.to_string(), r.iter().map(|x| x.to_string()).collect()))
        .collect()
}

#[test]
fn a12_model_perception_graph() {
    let m = a12_counter_model().model;
    assert_eq!(
        perception_rows(&m),
        rows(&[
            ("s1", &["s1", "a_shared", "a_only_s1"]),
            ("s2", &["s2", "a_shared"]),
            ("a_shared", &[]),
            ("a_only_s1", &[]),
        ])
    );
}

#[test]
fn a12_model_substances_and_attributes() {
    let m = a12_counter_model().model;
    let sub = substance("x");
    for (label, expected) in [
        ("s1", true),
        ("s2", true),
        ("a_shared", false),
        ("a_only_s1", false),
    ] {
        assert_eq!(
            at(&sub, &m, &[("x", label)]),
            expected,
            "Substance({label})"
        );
        for p in [
            "inItself",
            "perSeConceived",
            "involvesExistence",
            "natureRequiresExistence",
            "absolutelyInfinite",
        ] {
            assert_eq!(
                at(&Formula::pred(p, ["x"]), &m, &[("x", label)]),
                expected,
                "{p}({label})"
            );
        }
    }
    let attr = attribute("a", "s");
    assert!(at(&attr, &m, &[("a", "a_shared"), ("s", "s1")]));
    assert!(at(&attr, &m, &[("a", "a_shared"), ("s", "s2")]));
    assert!(at(&attr, &m, &[("a", "a_only_s1"), ("s", "s1")]));
    assert!(!at(&attr, &m, &[("a", "a_only_s1"), ("s", "s2")]));
}

#[test]
fn a12_model_satisfies_a22_and_falsifies_a12() {
    let m = a12_counter_model().model;
    assert!(holds(&axiom("A22").unwrap().formula, &m));
    assert!(!holds(&axiom("A12").unwrap().formula, &m));
    let (prefix, matrix) = axiom("A12").unwrap().formula.universal_prefix();
    let names: Vec<&str> = prefix.iter().map(|(v, _)| v.as_str()).collect();
    let bindings: Vec<(&str, &str)> = names
        .iter()
        .copied()
        .zip(["s1", "s2", "a_shared"])
        .collect();
    assert!(!at(matrix, &m, &bindings));
}

#[test]
fn a15_model_perception_graph_and_gods() {
    let m = a15_counter_model().model;
    assert_eq!(
        perception_rows(&m),
        rows(&[
            ("g1", &["g1"]),
            ("g2", &["g2", "attr_g2"]),
            ("attr_g2", &[])
        ])
    );
    let god = is_god("g");
    assert!(at(&god, &m, &[("g", "g1")]));
    assert!(at(&god, &m, &[("g", "g2")]));
    assert!(!at(&god, &m, &[("g", "attr_g2")]));
    assert!(at(&substance("x"), &m, &[("x", "g2")]));
    assert!(at(
        &attribute("a", "s"),
        &m,
        &[("a", "attr_g2"), ("s", "g2")]
    ));
    assert!(!at(
        &attribute("a", "s"),
        &m,
        &[("a", "attr_g2"), ("s", "g1")]
    ));
}

#[test]
fn a15_model_plenitude_holds_uniqueness_fails() {
    let m = a15_counter_model().model;
    assert!(holds(&axiom("A25").unwrap().formula, &m));
    assert!(!holds(&axiom("A26").unwrap().formula, &m));
    assert!(!holds(&axiom("A15").unwrap().formula, &m));
}

#[test]
fn corpus_models_keep_a8_and_break_a10() {
    for c in [a12_counter_model(), a15_counter_model()] {
        assert!(
            holds(&axiom("A8").unwrap().formula, &c.model),
            "A8 on {}",
            c.name
        );
        assert!(
            !holds(&axiom("A10").unwrap().formula, &c.model),
            "A10 on {}",
            c.name
        );
        assert!(
            holds(&axiom("A9").unwrap().formula, &c.model),
            "A9 on {}",
            c.name
        );
    }
}

#[test]
fn verify_reports_the_documented_witness() {
    let r = verify_corpus(&a12_counter_model(), &["PSRSubstance"], "A12").unwrap();
    assert_eq!(r.verdict, Verdict::Confirmed);
    assert_eq!(r.witnesses[0], ["s1", "s2", "a_shared"]);
    assert!(r
        .summary()
        .starts_with("confirmed; witness (s1, s2, a_shared)"));
    assert_eq!(
        r.fidelity_flags,
        [
            FidelityFlag::UniformEternalEssence,
            FidelityFlag::TwoCategoryCollapse
        ]
    );

    let r = verify_corpus(&a15_counter_model(), &["PSRPlenitude"], "A15").unwrap();
    assert_eq!(r.verdict, Verdict::PremiseFailure("A26".into()));
    assert_eq!(r.summary(), "premise-failure(A26)");

    let r = verify_corpus(&a15_counter_model(), &["A25"], "A15").unwrap();
    assert_eq!(r.verdict, Verdict::Confirmed);
    assert!(r
        .witnesses
        .contains(&vec!["g1".into(), "g2".into(), "attr_g2".into()]));

    let r = verify_corpus(&a12_counter_model(), &["SectionIBridges"], "A12").unwrap();
    assert_eq!(r.verdict, Verdict::PremiseFailure("A10".into()));

    let r = verify_corpus(&a12_counter_model(), &["A22"], "A22").unwrap();
    assert_eq!(r.verdict, Verdict::TargetNotFalsified);
}

#[test]
fn hand_built_full_register_model() {
    let mut m =
        FiniteModel::new("probe3", vec!["s1".into(), "s2".into(), "a".into()], vec![]).unwrap();
    let sig = ethica_core::registry::ethica_signature();
    for p in ["inItself", "perSeConceived"] {
        m.set_table(sig, p, [["s1"], ["s2"], ["a"]]).unwrap();
    }
    m.set_table(
        sig,
        "intellectPerceivesAsEssence",
        [
            ["s1", "s1"],
            ["s1", "a"],
            ["s2", "s2"],
            ["s2", "a"],
            ["a", "a"],
        ],
    )
    .unwrap();
    let r = verify(&m, &["SectionIBridges", "A22"], "A12").unwrap();
    assert_eq!(r.verdict, Verdict::Confirmed, "{r:?}");
    assert_eq!(r.witnesses[0], ["s1", "s2", "a"]);
}

#[test]
fn model_files_match_the_constructors() {
    let files = [
        (
            include_str!("../fixtures/a12_counter_model.model"),
            a12_counter_model(),
        ),
        (
            include_str!("../fixtures/a15_counter_model.model"),
            a15_counter_model(),
        ),
    ];
    for (text, corpus) in files {
        assert_eq!(parse_model(text).unwrap(), corpus.model, "{}", corpus.name);
    }
    for name in CORPUS_NAMES {
        assert_eq!(corpus_model(name).unwrap().name, name);
    }
    assert!(corpus_model("Nope").is_none());
}

#[test]
fn serialize_then_parse_is_identity() {
    for c in [a12_counter_model(), a15_counter_model()] {
        assert_eq!(parse_model(&serialize_model(&c.model)).unwrap(), c.model);
    }
    for m in random_models(7, 300, 4, 2) {
        let text = serialize_model(&m);
        let back = parse_model(&text).unwrap();
        assert_eq!(serialize_model(&back), text);
        for (pred, table) in m.tables() {
            for t in &table.tuples {
                assert!(back.holds(pred, t), "{pred}{t:?} lost in\n{text}");
            }
        }
        for (pred, table) in back.tables() {
            for t in &table.tuples {
                assert!(m.holds(pred, t), "{pred}{t:?} gained in\n{text}");
            }
        }
    }
}

#[test]
fn constants_resolve_by_label() {
    let m = a12_counter_model().model;
    assert_eq!(m.element(Sort::Thing, "a_shared"), Some(Element::thing(2)));
}
