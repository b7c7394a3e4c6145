//! The driver run in-process: outputs and exit codes.

use ethica_cli::{run, EXIT_FAILED, EXIT_OK, EXIT_RESOURCE, EXIT_USAGE};

fn ethica(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("ethica").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn verify_a12_corpus_model() {
    let (code, out, _) = ethica(&[
        "verify",
        "corpus:A12CounterModel",
        "--premises",
        "PSRSubstance",
        "--target",
        "A12",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(
        out.contains("confirmed; witness (s1, s2, a_shared)"),
        "{out}"
    );
}

#[test]
fn verify_a15_corpus_model_fails_on_uniqueness() {
    let (code, out, _) = ethica(&[
        "verify",
        "corpus:A15CounterModel",
        "--premises",
        "PSRPlenitude",
        "--target",
        "A15",
    ]);
    assert_eq!(code, EXIT_FAILED);
    assert!(out.contains("premise-failure(A26)"), "{out}");
}

#[test]
fn verify_a_model_file() {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../core/fixtures/a15_counter_model.model"
    );
    let (code, out, _) = ethica(&["verify", path, "--premises", "A25", "--target", "A15"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("confirmed; witness"));
}

#[test]
fn search_plenitude_at_three() {
    let (code, out, _) = ethica(&[
        "search",
        "--premises",
        "PSRPlenitude",
        "--target",
        "A15",
        "--max-things",
        "3",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("NoCounterexampleUpTo(3)"), "{out}");
    assert!(out.contains("sizes exhausted: 1, 2, 3"), "{out}");
}

#[test]
fn search_prints_a_verified_model() {
    let (code, out, _) = ethica(&[
        "search",
        "--premises",
        "PSRSubstance",
        "--target",
        "A12",
        "--max-things",
        "4",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("verdict: Refuted(size 2)"), "{out}");
    assert!(out.contains("model countermodel"));
    assert!(out.contains("verify: confirmed"));
}

#[test]
fn entail_prints_the_verdict_only() {
    let (code, out, _) = ethica(&[
        "entail",
        "--premises",
        "A24",
        "--target",
        "A14",
        "--max-things",
        "3",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "NoCounterexampleUpTo(3)\n");
}

#[test]
fn json_output_parses_and_carries_the_same_verdict() {
    let (code, out, _) = ethica(&[
        "--json",
        "search",
        "--premises",
        "A22",
        "--target",
        "A12",
        "--max-things",
        "3",
    ]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], "Refuted");
    assert_eq!(v["size"]["things"], 2);
    assert_eq!(v["verification"]["verdict"], "confirmed");

    let (_, out, _) = ethica(&[
        "verify",
        "corpus:A12CounterModel",
        "--premises",
        "A22",
        "--target",
        "A12",
        "--json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(
        v["witnesses"][0],
        serde_json::json!(["s1", "s2", "a_shared"])
    );
    assert_eq!(v["fidelity_flags"][0], "F1-uniform-eternal-essence");
}

#[test]
fn no_prune_gives_the_same_answer() {
    let a = ethica(&[
        "entail",
        "--premises",
        "A12,A14",
        "--target",
        "A22",
        "--max-things",
        "3",
    ]);
    let b = ethica(&[
        "--no-prune",
        "entail",
        "--premises",
        "A12,A14",
        "--target",
        "A22",
        "--max-things",
        "3",
    ]);
    assert_eq!(a, b);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(ethica(&[]).0, EXIT_USAGE);
    assert_eq!(ethica(&["frobnicate"]).0, EXIT_USAGE);
    let (code, _, err) = ethica(&[
        "verify",
        "corpus:Nope",
        "--premises",
        "A22",
        "--target",
        "A12",
    ]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("unknown corpus model"));
    assert_eq!(
        ethica(&["search", "--premises", "A99", "--target", "A12"]).0,
        EXIT_USAGE
    );
    assert_eq!(
        ethica(&[
            "search",
            "--premises",
            "A22",
            "--target",
            "A12",
            "--max-things",
            "0"
        ])
        .0,
        EXIT_USAGE
    );
    assert_eq!(ethica(&["experiment", "run", "nope"]).0, EXIT_USAGE);
    assert_eq!(
        ethica(&[
            "verify",
            "/no/such/file",
            "--premises",
            "A22",
            "--target",
            "A12"
        ])
        .0,
        EXIT_USAGE
    );
    assert_eq!(
        ethica(&[
            "search",
            "--premises",
            "A22",
            "--target",
            "A12",
            "--support",
            "bogus"
        ])
        .0,
        EXIT_USAGE
    );
}

#[test]
fn malformed_model_file_exits_two() {
    let dir = std::env::temp_dir().join(format!("ethica-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.model");
    std::fs::write(&path, "model bad\nthings a b\npred inItself: c\n").unwrap();
    let (code, _, err) = ethica(&[
        "verify",
        path.to_str().unwrap(),
        "--premises",
        "A22",
        "--target",
        "A12",
    ]);
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn node_budget_from_the_environment() {
    // The only test in this binary that touches the variable.
    std::env::set_var("ETHICA_NODE_BUDGET", "100");
    let limited = ethica(&[
        "entail",
        "--premises",
        "PSRSubstance",
        "--target",
        "PropV_allshared",
    ]);
    std::env::set_var("ETHICA_NODE_BUDGET", "lots");
    let invalid = ethica(&["entail", "--premises", "A22", "--target", "A12"]);
    std::env::remove_var("ETHICA_NODE_BUDGET");
    assert_eq!(limited.0, EXIT_RESOURCE, "{limited:?}");
    assert!(limited.2.contains("resource limit"));
    assert_eq!(invalid.0, EXIT_USAGE);
}

#[test]
fn experiments_and_table() {
    let (code, out, _) = ethica(&["experiment", "run", "all"]);
    assert_eq!(code, EXIT_OK, "{out}");
    for name in [
        "A12_demote",
        "A13_demote",
        "A13_converse",
        "A14_demote",
        "A15_plenitude",
        "A15_plenitude_only",
    ] {
        assert!(out.contains(&format!("experiment {name}\n")), "{name}");
    }
    let (code, out, _) = ethica(&["--json", "experiment", "run", "A14_demote"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["outcome"], "EqualStrengthTranslation");

    let first = ethica(&["table"]);
    let second = ethica(&["table"]);
    assert_eq!(first.0, EXIT_OK);
    assert_eq!(first, second);
    assert_eq!(first.1.lines().filter(|l| l.starts_with("| A1")).count(), 4);
    let strict = ethica(&["--strict-claims", "table"]);
    assert!(!strict.1.contains("Trivial redescription"));
    assert!(strict.1.contains("NoCounterexampleUpTo(4)"));
}

#[test]
fn probe_and_export() {
    let (code, out, _) = ethica(&["probe", "full-register", "--max-things", "3"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("verdict: Refuted"), "{out}");
    assert!(out.contains("verify: confirmed"));

    let (code, out, _) = ethica(&["--json", "export-axioms"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["axioms"]
        .as_array()
        .unwrap()
        .iter()
        .any(|a| a["id"] == "A12"));
    assert!(v["bundles"]
        .as_array()
        .unwrap()
        .iter()
        .any(|b| b["name"] == "PSRPlenitude"));
    let (_, md, _) = ethica(&["export-axioms"]);
    assert!(md.starts_with("| Id |"));
}

#[test]
fn help_and_version_exit_zero() {
    let (code, out, _) = ethica(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("verify"));
    assert_eq!(ethica(&["--version"]).0, EXIT_OK);
}
