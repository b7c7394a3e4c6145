//! The fixed Ethica signature, the derived-definition macros, and the axiom
//! catalogue with its named bundles.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::logic::{Formula, PredicateDecl, Signature, Sort, Term};

use Sort::{Thing, World};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RegistryError {
    #[error("unknown definition {0}")]
    UnknownDefinition(String),
    #[error("unknown axiom {0}")]
    UnknownAxiom(String),
    #[error("unknown axiom or bundle {0}")]
    UnknownSelector(String),
    #[error("definition {name} takes {expected} arguments, got {found}")]
    DefinitionArity {
        name: String,
        expected: usize,
        found: usize,
    },
}

const UNARY: [&str; 10] = [
    "inItself",
    "inAnother",
    "perSeConceived",
    "conceivedThroughAnother",
    "involvesExistence",
    "natureRequiresExistence",
    "absolutelyInfinite",
    "freelyExistent",
    "constrained",
    "eternal",
];

const BINARY: [&str; 5] = [
    "limitedBy",
    "intellectPerceivesAsEssence",
    "expressesEternalEssence",
    "conceptualDep",
    "cause",
];

/// The closed Ethica signature: ten unary and five binary predicates over
/// Thing, `existsAt` over Thing × World, and `causeAt` over Thing × Thing × World.
pub fn ethica_signature() -> &'static Signature {
    static SIG: OnceLock<Signature> = OnceLock::new();
    SIG.get_or_init(|| {
        let decls = UNARY
            .iter()
            .map(|n| PredicateDecl::new(n, &[Thing]))
            .chain(
                BINARY
                    .iter()
                    .map(|n| PredicateDecl::new(n, &[Thing, Thing])),
            )
            .chain([
                PredicateDecl::new("existsAt", &[Thing, World]),
                PredicateDecl::new("causeAt", &[Thing, Thing, World]),
            ]);
        Signature::new(decls).expect("ethica signature is well-formed")
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedDefinition {
    pub name: &'static str,
    pub params: Vec<(String, Sort)>,
    pub body: Formula,
}

impl DerivedDefinition {
    /// Literal substitution of the arguments for the parameters.
    pub fn apply(&self, args: &[Term]) -> Result<Formula, RegistryError> {
        if args.len() != self.params.len() {
            return Err(RegistryError::DefinitionArity {
                name: self.name.to_string(),
                expected: self.params.len(),
                found: args.len(),
            });
        }
        let map: BTreeMap<String, Term> = self
            .params
            .iter()
            .map(|(p, _)| p.clone())
            .zip(args.iter().cloned())
            .collect();
        Ok(self.body.substitute(&map))
    }
}

pub const DEFINITION_NAMES: [&str; 5] = ["Substance", "Attribute", "Mode", "sameNature", "IsGod"];

fn p1(name: &str, x: &Term) -> Formula {
    Formula::pred(name, [x])
}

fn p2(name: &str, x: &Term, y: &Term) -> Formula {
    Formula::pred(name, [x, y])
}

/// `Substance(x) ≡ inItself(x) ∧ perSeConceived(x)`
pub fn substance(x: impl Into<Term>) -> Formula {
    let x = x.into();
    Formula::and(p1("inItself", &x), p1("perSeConceived", &x))
}

/// `Attribute(a, s) ≡ Substance(s) ∧ intellectPerceivesAsEssence(s, a)`
pub fn attribute(a: impl Into<Term>, s: impl Into<Term>) -> Formula {
    let (a, s) = (a.into(), s.into());
    Formula::and(substance(&s), p2("intellectPerceivesAsEssence", &s, &a))
}

/// `Mode(x) ≡ inAnother(x) ∧ conceivedThroughAnother(x)`
pub fn mode(x: impl Into<Term>) -> Formula {
    let x = x.into();
    Formula::and(p1("inAnother", &x), p1("conceivedThroughAnother", &x))
}

/// `sameNature(x, y) ≡ ∃a, Attribute(a, x) ∧ Attribute(a, y)`
pub fn same_nature(x: impl Into<Term>, y: impl Into<Term>) -> Formula {
    let (x, y) = (x.into(), y.into());
    Formula::exists(
        "a",
        Thing,
        Formula::and(attribute("a", &x), attribute("a", &y)),
    )
    .rename_apart()
}

/// `IsGod(g) ≡ Substance(g) ∧ absolutelyInfinite(g) ∧ (∃a, Attribute(a, g))
///   ∧ (∀a, Attribute(a, g) → expressesEternalEssence(g, a))`
pub fn is_god(g: impl Into<Term>) -> Formula {
    let g = g.into();
    Formula::and_all([
        substance(&g),
        p1("absolutelyInfinite", &g),
        Formula::exists("a", Thing, attribute("a", &g)),
        Formula::forall(
            "a",
            Thing,
            Formula::implies(
                attribute("a", &g),
                p2("expressesEternalEssence", &g, &"a".into()),
            ),
        ),
    ])
}

/// The macro body of one of the five derived definitions.
pub fn definition(name: &str) -> Result<DerivedDefinition, RegistryError> {
    let one = |p: &str| vec![(p.to_string(), Thing)];
    let two = |p: &str, q: &str| vec![(p.to_string(), Thing), (q.to_string(), Thing)];
    let (name, params, body) = match name {
        "Substance" => ("Substance", one("x"), substance("x")),
        "Attribute" => ("Attribute", two("a", "s"), attribute("a", "s")),
        "Mode" => ("Mode", one("x"), mode("x")),
        "sameNature" => ("sameNature", two("x", "y"), same_nature("x", "y")),
        "IsGod" => ("IsGod", one("g"), is_god("g")),
        other => return Err(RegistryError::UnknownDefinition(other.to_string())),
    };
    Ok(DerivedDefinition { name, params, body })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Section {
    #[serde(rename = "SectionI")]
    SectionI,
    #[serde(rename = "SectionII-placeholder")]
    SectionIIPlaceholder,
    #[serde(rename = "SectionIII")]
    SectionIII,
    ModalBridge,
    PSRCandidate,
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Section::SectionI => "SectionI",
            Section::SectionIIPlaceholder => "SectionII-placeholder",
            Section::SectionIII => "SectionIII",
            Section::ModalBridge => "ModalBridge",
            Section::PSRCandidate => "PSRCandidate",
        })
    }
}

/// Whether the source states the formula symbolically, or only describes it
/// in prose so that the exact rendering is a choice made in this catalogue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AxiomStatus {
    #[serde(rename = "paper-stated")]
    Stated,
    #[serde(rename = "paper-described-formula-decided-here")]
    DecidedHere,
}

impl fmt::Display for AxiomStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AxiomStatus::Stated => "paper-stated",
            AxiomStatus::DecidedHere => "paper-described-formula-decided-here",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomEntry {
    pub id: &'static str,
    pub name: &'static str,
    pub section: Section,
    /// Short human-readable statement using the derived definitions.
    pub statement: &'static str,
    /// The closed formula over primitives.
    pub formula: Formula,
    pub citation: &'static str,
    pub status: AxiomStatus,
}

fn fa(vars: &[&str], body: Formula) -> Formula {
    let vs: Vec<(&str, Sort)> = vars.iter().map(|v| (*v, Thing)).collect();
    Formula::forall_many(&vs, body)
}

fn ex(var: &str, body: Formula) -> Formula {
    Formula::exists(var, Thing, body)
}

fn build_catalogue() -> Vec<AxiomEntry> {
    use AxiomStatus::{DecidedHere, Stated};
    use Section::*;
    let pred = |n: &str, args: &[&str]| Formula::pred(n, args.iter().copied());
    fn imp<const N: usize>(hyps: [Formula; N], c: Formula) -> Formula {
        Formula::implies_chain(hyps, c)
    }
    let mut entries = vec![
        AxiomEntry {
            id: "A1",
            name: "in_itself_or_in_another",
            section: SectionI,
            statement: "∀ x, inItself x ∨ inAnother x",
            formula: fa(&["x"], Formula::or(pred("inItself", &["x"]), pred("inAnother", &["x"]))),
            citation: "§4.4, \"everything is in itself or in another\"",
            status: DecidedHere,
        },
        AxiomEntry {
            id: "A1e",
            name: "in_itself_in_another_exclusive",
            section: SectionI,
            statement: "∀ x, ¬ (inItself x ∧ inAnother x)",
            formula: fa(
                &["x"],
                Formula::not(Formula::and(pred("inItself", &["x"]), pred("inAnother", &["x"]))),
            ),
            citation: "§3.3, \"¬ (inItself x ∧ inAnother x)\"",
            status: Stated,
        },
        AxiomEntry {
            id: "A8",
            name: "in_itself_iff_per_se_conceived",
            section: SectionI,
            statement: "∀ x, inItself x ↔ perSeConceived x",
            formula: fa(&["x"], Formula::iff(pred("inItself", &["x"]), pred("perSeConceived", &["x"]))),
            citation: "§3.3, \"inItself x ↔ perSeConceived x\"",
            status: Stated,
        },
        AxiomEntry {
            id: "A9",
            name: "in_another_iff_conceived_through_another",
            section: SectionI,
            statement: "∀ x, inAnother x ↔ conceivedThroughAnother x",
            formula: fa(
                &["x"],
                Formula::iff(pred("inAnother", &["x"]), pred("conceivedThroughAnother", &["x"])),
            ),
            citation: "§3.3, \"inAnother x ↔ conceivedThroughAnother x\"",
            status: Stated,
        },
        AxiomEntry {
            id: "A10",
            name: "attribute_per_se_conceived",
            section: SectionI,
            statement: "∀ s a, Attribute a s → perSeConceived a",
            formula: fa(&["s", "a"], Formula::implies(attribute("a", "s"), pred("perSeConceived", &["a"]))),
            citation: "§3.3, \"every attribute of a substance is itself per se conceived\"",
            status: DecidedHere,
        },
        AxiomEntry {
            id: "A11",
            name: "involves_existence_iff_nature_requires",
            section: SectionI,
            statement: "∀ x, involvesExistence x ↔ natureRequiresExistence x",
            formula: fa(
                &["x"],
                Formula::iff(pred("involvesExistence", &["x"]), pred("natureRequiresExistence", &["x"])),
            ),
            citation: "§3.3, \"involvesExistence x ↔ natureRequiresExistence x\"",
            status: Stated,
        },
        AxiomEntry {
            id: "A12",
            name: "ax_substanceIdByAttribute",
            section: SectionIII,
            statement: "∀ s₁ s₂ a, Attribute a s₁ → Attribute a s₂ → s₁ = s₂",
            formula: fa(
                &["s1", "s2", "a"],
                imp([attribute("a", "s1"), attribute("a", "s2")], Formula::eq("s1", "s2")),
            ),
            citation: "§3.3, \"two substances sharing an attribute are identical\"",
            status: Stated,
        },
        AxiomEntry {
            id: "A13",
            name: "substance_involves_existence",
            section: SectionIII,
            statement: "∀ s, Substance s → involvesExistence s",
            formula: fa(&["s"], Formula::implies(substance("s"), pred("involvesExistence", &["s"]))),
            citation: "§3.3, \"every substance involves existence\"",
            status: DecidedHere,
        },
        AxiomEntry {
            id: "A14",
            name: "substance_has_attribute",
            section: SectionIII,
            statement: "∀ s, Substance s → ∃ a, Attribute a s",
            formula: fa(&["s"], Formula::implies(substance("s"), ex("a", attribute("a", "s")))),
            citation: "§3.3, \"every substance has at least one attribute\"",
            status: DecidedHere,
        },
        AxiomEntry {
            id: "A15",
            name: "ax_IsGod_has_attribute_of",
            section: SectionIII,
            statement: "∀ g s a, IsGod g → Substance s → Attribute a s → Attribute a g",
            formula: fa(
                &["g", "s", "a"],
                imp([is_god("g"), substance("s"), attribute("a", "s")], attribute("a", "g")),
            ),
            citation: "§6.1, \"every god has every realised attribute\"",
            status: Stated,
        },
        AxiomEntry {
            id: "A18",
            name: "involves_existence_iff_exists_everywhere",
            section: ModalBridge,
            statement: "∀ x, involvesExistence x ↔ ∀ w, existsAt x w",
            formula: fa(
                &["x"],
                Formula::iff(
                    pred("involvesExistence", &["x"]),
                    Formula::forall("w", World, pred("existsAt", &["x", "w"])),
                ),
            ),
            citation: "§3.4, \"involvesExistence ↔ ∀ w, existsAt\"",
            status: Stated,
        },
        AxiomEntry {
            id: "A19",
            name: "per_se_conceived_iff_self_dependent",
            section: ModalBridge,
            statement: "∀ x, perSeConceived x ↔ conceptualDep x x",
            formula: fa(&["x"], Formula::iff(pred("perSeConceived", &["x"]), pred("conceptualDep", &["x", "x"]))),
            citation: "§3.4, \"with bridges A19 / A20 to perSeConceived and conceivedThroughAnother\"",
            status: DecidedHere,
        },
        AxiomEntry {
            id: "A20",
            name: "conceived_through_another_iff_other_dependence",
            section: ModalBridge,
            statement: "∀ x, conceivedThroughAnother x ↔ ∃ y, y ≠ x ∧ conceptualDep x y",
            formula: fa(
                &["x"],
                Formula::iff(
                    pred("conceivedThroughAnother", &["x"]),
                    ex("y", Formula::and(Formula::neq("y", "x"), pred("conceptualDep", &["x", "y"]))),
                ),
            ),
            citation: "§3.4, \"with bridges A19 / A20 to perSeConceived and conceivedThroughAnother\"",
            status: DecidedHere,
        },
        AxiomEntry {
            id: "A3m",
            name: "cause_necessitates_effect",
            section: ModalBridge,
            statement: "∀ c e w, causeAt c e w → existsAt e w",
            formula: fa(
                &["c", "e"],
                Formula::forall(
                    "w",
                    World,
                    Formula::implies(pred("causeAt", &["c", "e", "w"]), pred("existsAt", &["e", "w"])),
                ),
            ),
            citation: "§3.4, \"from cause necessarily follows effect\"",
            status: DecidedHere,
        },
        AxiomEntry {
            id: "A21",
            name: "cause_iff_cause_everywhere",
            section: ModalBridge,
            statement: "∀ c e, cause c e ↔ ∀ w, causeAt c e w",
            formula: fa(
                &["c", "e"],
                Formula::iff(
                    pred("cause", &["c", "e"]),
                    Formula::forall("w", World, pred("causeAt", &["c", "e", "w"])),
                ),
            ),
            citation: "§3.4, \"connecting world-uniform Cause\"",
            status: DecidedHere,
        },
        AxiomEntry {
            id: "A22",
            name: "ax_PSR_substance_distinguishability",
            section: PSRCandidate,
            statement: "∀ s₁ s₂, Substance s₁ → Substance s₂ → s₁ ≠ s₂ → ∃ a, (Attribute a s₁ ∧ ¬ Attribute a s₂) ∨ (Attribute a s₂ ∧ ¬ Attribute a s₁)",
            formula: fa(
                &["s1", "s2"],
                imp(
                    [substance("s1"), substance("s2"), Formula::neq("s1", "s2")],
                    ex(
                        "a",
                        Formula::or(
                            Formula::and(attribute("a", "s1"), Formula::not(attribute("a", "s2"))),
                            Formula::and(attribute("a", "s2"), Formula::not(attribute("a", "s1"))),
                        ),
                    ),
                ),
            ),
            citation: "§5.2, \"differ in at least one attribute\"",
            status: Stated,
        },
        AxiomEntry {
            id: "A23",
            name: "substance_self_causal_everywhere",
            section: PSRCandidate,
            statement: "∀ s w, Substance s → causeAt s s w",
            formula: fa(
                &["s"],
                Formula::forall("w", World, Formula::implies(substance("s"), pred("causeAt", &["s", "s", "w"]))),
            ),
            citation: "§4.2, \"every substance is self-causal at every world\"",
            status: DecidedHere,
        },
        AxiomEntry {
            id: "A24",
            name: "substance_has_perceived_essence",
            section: PSRCandidate,
            statement: "∀ s, Substance s → ∃ a, intellectPerceivesAsEssence s a",
            formula: fa(
                &["s"],
                Formula::implies(substance("s"), ex("a", pred("intellectPerceivesAsEssence", &["s", "a"]))),
            ),
            citation: "§4.2, \"every substance has an intellect-perceived essence\"",
            status: DecidedHere,
        },
        AxiomEntry {
            id: "A25",
            name: "ax_plenitude_attribute",
            section: PSRCandidate,
            statement: "∀ a s, Substance s → Attribute a s → ∃ g, IsGod g ∧ Attribute a g",
            formula: fa(
                &["a", "s"],
                imp(
                    [substance("s"), attribute("a", "s")],
                    ex("g", Formula::and(is_god("g"), attribute("a", "g"))),
                ),
            ),
            citation: "§6.2, \"ax_plenitude_attribute\"",
            status: Stated,
        },
        AxiomEntry {
            id: "A26",
            name: "ax_god_unique",
            section: PSRCandidate,
            statement: "∀ g₁ g₂, IsGod g₁ → IsGod g₂ → g₁ = g₂",
            formula: fa(&["g1", "g2"], imp([is_god("g1"), is_god("g2")], Formula::eq("g1", "g2"))),
            citation: "§4.2, \"any two gods are identical\"",
            status: Stated,
        },
        AxiomEntry {
            id: "PropV_allshared",
            name: "prop_5_demote_via_PSR_all_attributes",
            section: SectionIII,
            statement: "∀ s₁ s₂, Substance s₁ → Substance s₂ → (∀ a, Attribute a s₁ ↔ Attribute a s₂) → s₁ = s₂",
            formula: fa(
                &["s1", "s2"],
                imp(
                    [
                        substance("s1"),
                        substance("s2"),
                        fa(&["a"], Formula::iff(attribute("a", "s1"), attribute("a", "s2"))),
                    ],
                    Formula::eq("s1", "s2"),
                ),
            ),
            citation: "§5.3, \"hshare_all : ∀ a, Attribute a s₁ ↔ Attribute a s₂\"",
            status: Stated,
        },
    ];
    for e in &mut entries {
        e.formula = e.formula.rename_apart();
    }
    entries
}

/// Every catalogued axiom, in catalogue order.
pub fn catalogue() -> &'static [AxiomEntry] {
    static CAT: OnceLock<Vec<AxiomEntry>> = OnceLock::new();
    CAT.get_or_init(build_catalogue)
}

pub fn axiom(id: &str) -> Result<&'static AxiomEntry, RegistryError> {
    catalogue()
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| RegistryError::UnknownAxiom(id.to_string()))
}

/// Named axiom bundles, in a fixed order.
pub const BUNDLES: [(&str, &[&str]); 6] = [
    ("PSRSubstance", &["A22"]),
    ("PSRPlenitude", &["A25", "A26"]),
    ("PSRSelfCause", &["A23"]),
    ("PSREssencePerception", &["A24"]),
    ("SectionIBridges", &["A1", "A1e", "A8", "A9", "A10", "A11"]),
    ("ModalBridges", &["A18", "A3m", "A21"]),
];

pub fn bundle(name: &str) -> Option<&'static [&'static str]> {
    BUNDLES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, ids)| *ids)
}

/// Resolves a mix of bundle names and axiom ids to entries, preserving first
/// occurrence order and dropping duplicates.
pub fn axiom_set<S: AsRef<str>>(
    selectors: &[S],
) -> Result<Vec<&'static AxiomEntry>, RegistryError> {
    let mut out: Vec<&'static AxiomEntry> = Vec::new();
    for sel in selectors {
        let sel = sel.as_ref();
        let ids: Vec<&str> = match bundle(sel) {
            Some(ids) => ids.to_vec(),
            None if catalogue().iter().any(|e| e.id == sel) => vec![sel],
            None => return Err(RegistryError::UnknownSelector(sel.to_string())),
        };
        for id in ids {
            let entry = axiom(id)?;
            if !out.iter().any(|e| e.id == entry.id) {
                out.push(entry);
            }
        }
    }
    Ok(out)
}

/// Splits a comma-separated selector list such as `SectionIBridges,A22`.
pub fn parse_selector_list(text: &str) -> Vec<String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}
