use std::fmt;

use serde::Serialize;

use crate::logic::FiniteModel;
use crate::registry::ethica_signature;

/// A deliberate departure of a corpus model from the source text's intent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum FidelityFlag {
    /// `expressesEternalEssence` holds uniformly.
    #[serde(rename = "F1-uniform-eternal-essence")]
    UniformEternalEssence,
    /// Every element is either a substance or a mode; attributes are not a
    /// third category.
    #[serde(rename = "F2-two-category-collapse")]
    TwoCategoryCollapse,
}

impl FidelityFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            FidelityFlag::UniformEternalEssence => "F1-uniform-eternal-essence",
            FidelityFlag::TwoCategoryCollapse => "F2-two-category-collapse",
        }
    }
}

impl fmt::Display for FidelityFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusModel {
    pub name: &'static str,
    pub model: FiniteModel,
    pub provenance: &'static str,
    pub fidelity_flags: Vec<FidelityFlag>,
}

pub const CORPUS_NAMES: [&str; 2] = ["A12CounterModel", "A15CounterModel"];

const SUBSTANCE_FLAGS: [&str; 5] = [
    "inItself",
    "perSeConceived",
    "involvesExistence",
    "natureRequiresExistence",
    "absolutelyInfinite",
];

fn build(
    name: &str,
    things: &[&str],
    substances: &[&str],
    modes: &[&str],
    perceptions: &[(&str, &str)],
) -> FiniteModel {
    let sig = ethica_signature();
    let mut m = FiniteModel::new(name, things.iter().map(|s| s.to_string()).collect(), vec![])
        .expect("corpus universe is well-formed");
    let mut set = |pred: &str, tuples: Vec<Vec<&str>>| {
        m.set_table(sig, pred, tuples)
            .expect("corpus table is well-formed");
    };
    for p in SUBSTANCE_FLAGS {
        set(p, substances.iter().map(|s| vec![*s]).collect());
    }
    for p in ["inAnother", "conceivedThroughAnother"] {
        set(p, modes.iter().map(|s| vec![*s]).collect());
    }
    set(
        "intellectPerceivesAsEssence",
        perceptions.iter().map(|(s, a)| vec![*s, *a]).collect(),
    );
    m.set_full_table(sig, "expressesEternalEssence")
        .expect("corpus table is well-formed");
    m
}

/// Two substances sharing the attribute `a_shared`, told apart by
/// `a_only_s1`. Satisfies A22 and falsifies A12.
pub fn a12_counter_model() -> CorpusModel {
    CorpusModel {
        name: "A12CounterModel",
        model: build(
            "A12CounterModel",
            &["s1", "s2", "a_shared", "a_only_s1"],
            &["s1", "s2"],
            &["a_shared", "a_only_s1"],
            &[
                ("s1", "s1"),
                ("s1", "a_shared"),
                ("s1", "a_only_s1"),
                ("s2", "s2"),
                ("s2", "a_shared"),
            ],
        ),
        provenance: "§5.4, four-element inductive type with perception graph s₁ ↦ {s₁, a_shared, a_only_s1}, s₂ ↦ {s₂, a_shared}",
        fidelity_flags: vec![FidelityFlag::UniformEternalEssence, FidelityFlag::TwoCategoryCollapse],
    }
}

/// Two gods, the second with an extra attribute the first lacks. Satisfies
/// A25 and falsifies A15.
pub fn a15_counter_model() -> CorpusModel {
    CorpusModel {
        name: "A15CounterModel",
        model: build(
            "A15CounterModel",
            &["g1", "g2", "attr_g2"],
            &["g1", "g2"],
            &["attr_g2"],
            &[("g1", "g1"), ("g2", "g2"), ("g2", "attr_g2")],
        ),
        provenance:
            "§6.4, three-element inductive type with perception graph g₁ ↦ {g₁}, g₂ ↦ {g₂, attr_g₂}",
        fidelity_flags: vec![
            FidelityFlag::UniformEternalEssence,
            FidelityFlag::TwoCategoryCollapse,
        ],
    }
}

pub fn corpus_model(name: &str) -> Option<CorpusModel> {
    match name {
        "A12CounterModel" => Some(a12_counter_model()),
        "A15CounterModel" => Some(a15_counter_model()),
        _ => None,
    }
}
