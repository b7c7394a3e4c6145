//! Demote experiments: bounded checks of whether a weaker family Σ derives
//! a substantive axiom, and the outcome class the verdicts support.

mod classify;
mod table;

use serde_json::{json, Value};
use thiserror::Error;

use crate::corpus::{
    corpus_model, verify, verify_corpus, FidelityFlag, VerificationReport, VerifyError,
};
use crate::logic::FiniteModel;
use crate::registry::{axiom, axiom_set, AxiomStatus};
use crate::search::{
    entails_entries, EntailmentVerdict, Pruning, SearchConfig, SearchError, SearchReport,
    SearchStats,
};

pub use classify::{classify_outcome, ClassifyError, Evidence, OutcomeClass, VerdictKind};
pub use table::{reducibility_table, ReducibilityTable, TABLE_EXPERIMENTS};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("unknown experiment {0}")]
    UnknownExperiment(String),
    #[error("{experiment}: {source}")]
    Search {
        experiment: String,
        #[source]
        source: SearchError,
    },
    #[error("{experiment}: {source}")]
    Classify {
        experiment: String,
        #[source]
        source: ClassifyError,
    },
    #[error("{experiment}: corpus check failed: {source}")]
    Verify {
        experiment: String,
        #[source]
        source: VerifyError,
    },
    #[error("table row {failed} failed ({source}); completed rows:\n{partial}")]
    Table {
        failed: String,
        partial: String,
        #[source]
        source: Box<ExperimentError>,
    },
}

impl ExperimentError {
    /// True when the failure is a search running out of its node budget.
    pub fn is_resource_limit(&self) -> bool {
        match self {
            ExperimentError::Search { source, .. } => {
                matches!(source, SearchError::ResourceLimit { .. })
            }
            ExperimentError::Table { source, .. } => source.is_resource_limit(),
            _ => false,
        }
    }
}

/// One bounded entailment check: do the premises (ids or bundles) entail the target?
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub premises: Vec<String>,
    pub target: String,
}

impl Query {
    pub fn new(premises: &[&str], target: &str) -> Self {
        Query {
            premises: premises.iter().map(|s| s.to_string()).collect(),
            target: target.to_string(),
        }
    }
}

/// Verdicts a bundled experiment is expected to reproduce.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expectation {
    pub forward: VerdictKind,
    pub backward: Option<VerdictKind>,
    pub auxiliary: Option<VerdictKind>,
    pub outcome: OutcomeClass,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentSpec {
    pub name: String,
    /// The axiom whose derivability is in question.
    pub axiom: String,
    /// Name of the tested family, used in the rendered qualifier.
    pub sigma_label: String,
    pub forward: Query,
    pub backward: Option<Query>,
    /// Σ against a restricted form of the target.
    pub auxiliary: Option<Query>,
    /// Maximal proper subsets of a multi-axiom Σ, each against the target.
    pub components: Vec<Query>,
    pub config: SearchConfig,
    pub expectation: Option<Expectation>,
    /// A corpus model expected to witness the forward non-derivation.
    pub corpus_witness: Option<String>,
    /// Qualifications printed inside the outcome label.
    pub label_notes: Vec<String>,
    pub extra_caveats: Vec<String>,
}

/// Overrides applied to the search configuration of bundled experiments.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub workers: Option<usize>,
    pub pruning: Option<Pruning>,
    pub node_budget: Option<u64>,
}

impl RunOptions {
    pub fn apply(&self, config: &mut SearchConfig) {
        if let Some(w) = self.workers {
            config.workers = w;
        }
        if let Some(p) = self.pruning {
            config.pruning = p;
        }
        if let Some(b) = self.node_budget {
            config.node_budget = b;
        }
    }
}

pub const EXPERIMENT_NAMES: [&str; 6] = [
    "A12_demote",
    "A13_demote",
    "A13_converse",
    "A14_demote",
    "A15_plenitude",
    "A15_plenitude_only",
];

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn config(max_things: usize, max_worlds: Option<usize>) -> SearchConfig {
    SearchConfig {
        max_things,
        max_worlds,
        ..Default::default()
    }
}

/// A bundled experiment by name.
pub fn experiment(name: &str) -> Option<ExperimentSpec> {
    use VerdictKind::*;
    let base = |axiom: &str, sigma: &str, forward: Query, cfg: SearchConfig| ExperimentSpec {
        name: name.to_string(),
        axiom: axiom.to_string(),
        sigma_label: sigma.to_string(),
        forward,
        backward: None,
        auxiliary: None,
        components: Vec::new(),
        config: cfg,
        expectation: None,
        corpus_witness: None,
        label_notes: Vec::new(),
        extra_caveats: Vec::new(),
    };
    Some(match name {
        "A12_demote" => ExperimentSpec {
            auxiliary: Some(Query::new(&["PSRSubstance"], "PropV_allshared")),
            expectation: Some(Expectation {
                forward: Refuted,
                backward: None,
                auxiliary: Some(NoCounterexample),
                outcome: OutcomeClass::PartialReduction,
            }),
            corpus_witness: Some("A12CounterModel".into()),
            ..base("A12", "PSRSubstance", Query::new(&["PSRSubstance"], "A12"), config(4, None))
        },
        "A13_demote" => ExperimentSpec {
            expectation: Some(Expectation {
                forward: NoCounterexample,
                backward: None,
                auxiliary: None,
                outcome: OutcomeClass::EqualStrengthTranslation,
            }),
            label_notes: strings(&["bridge set {A18, A3m} decided here", "converse open"]),
            extra_caveats: strings(&[
                "the converse direction is run separately as A13_converse, with no expected verdict",
            ]),
            ..base(
                "A13",
                "PSRSelfCause",
                Query::new(&["PSRSelfCause", "A18", "A3m"], "A13"),
                config(3, Some(2)),
            )
        },
        "A13_converse" => ExperimentSpec {
            extra_caveats: strings(&["no expected verdict: no converse bridge set is given for A13 and A23"]),
            ..base(
                "A23",
                "A13 + ModalBridges",
                Query::new(&["A13", "ModalBridges"], "A23"),
                config(3, Some(2)),
            )
        },
        "A14_demote" => ExperimentSpec {
            backward: Some(Query::new(&["A14"], "A24")),
            expectation: Some(Expectation {
                forward: NoCounterexample,
                backward: Some(NoCounterexample),
                auxiliary: None,
                outcome: OutcomeClass::EqualStrengthTranslation,
            }),
            ..base(
                "A14",
                "PSREssencePerception",
                Query::new(&["PSREssencePerception"], "A14"),
                config(4, None),
            )
        },
        "A15_plenitude" => ExperimentSpec {
            components: vec![Query::new(&["A25"], "A15"), Query::new(&["A26"], "A15")],
            expectation: Some(Expectation {
                forward: NoCounterexample,
                backward: None,
                auxiliary: None,
                outcome: OutcomeClass::DecompositionOnly,
            }),
            ..base("A15", "PSRPlenitude", Query::new(&["PSRPlenitude"], "A15"), config(3, None))
        },
        "A15_plenitude_only" => ExperimentSpec {
            expectation: Some(Expectation {
                forward: Refuted,
                backward: None,
                auxiliary: None,
                outcome: OutcomeClass::FullIrreducibility,
            }),
            corpus_witness: Some("A15CounterModel".into()),
            label_notes: strings(&["component of the A15 decomposition"]),
            ..base("A15", "{A25}", Query::new(&["A25"], "A15"), config(3, None))
        },
        _ => return None,
    })
}

pub fn bundled_experiments() -> Vec<ExperimentSpec> {
    EXPERIMENT_NAMES
        .iter()
        .map(|n| experiment(n).expect("bundled name"))
        .collect()
}

/// The verdict of one query, with the bound it was searched to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryResult {
    /// Resolved axiom ids, in selector order.
    pub premises: Vec<String>,
    pub target: String,
    pub verdict: EntailmentVerdict,
    /// `(things, worlds)` upper bound of the search.
    pub bound: (usize, usize),
    pub stats: SearchStats,
}

impl QueryResult {
    pub fn kind(&self) -> VerdictKind {
        if self.verdict.is_refuted() {
            VerdictKind::Refuted
        } else {
            VerdictKind::NoCounterexample
        }
    }

    pub fn bound_text(&self) -> String {
        bound_text(self.bound)
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "premises": self.premises,
            "target": self.target,
            "verdict": match self.verdict {
                EntailmentVerdict::Refuted { .. } => "Refuted",
                EntailmentVerdict::NoCounterexampleUpTo { .. } => "NoCounterexampleUpTo",
            },
            "bound": {"things": self.bound.0, "worlds": self.bound.1},
            "within_support": self.stats.within_support,
        });
        if let EntailmentVerdict::Refuted {
            model,
            things,
            worlds,
        } = &self.verdict
        {
            v["size"] = json!({"things": things, "worlds": worlds});
            v["model"] = serde_json::to_value(model).expect("models serialize");
        }
        v
    }

    /// `Refuted(size 2) within bound 4` and the like.
    pub fn summary(&self) -> String {
        match &self.verdict {
            EntailmentVerdict::Refuted { .. } => {
                format!("{} within bound {}", self.verdict, self.bound_text())
            }
            EntailmentVerdict::NoCounterexampleUpTo { .. } => self.verdict.to_string(),
        }
    }
}

pub(crate) fn bound_text((things, worlds): (usize, usize)) -> String {
    if worlds == 0 {
        things.to_string()
    } else {
        format!("{things} things, {worlds} worlds")
    }
}

/// Runs one query with the given configuration.
pub fn run_query(query: &Query, config: &SearchConfig) -> Result<QueryResult, SearchError> {
    let premises = axiom_set(&query.premises)?;
    let target = axiom(&query.target)?;
    let SearchReport { verdict, stats } = entails_entries(&premises, target, config)?;
    let modal =
        premises.iter().any(|e| e.formula.mentions_world()) || target.formula.mentions_world();
    let worlds = if modal {
        config
            .max_worlds
            .unwrap_or(crate::search::DEFAULT_MAX_WORLDS)
    } else {
        0
    };
    Ok(QueryResult {
        premises: premises.iter().map(|e| e.id.to_string()).collect(),
        target: target.id.to_string(),
        verdict,
        bound: (config.max_things, worlds),
        stats,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentResult {
    pub name: String,
    pub axiom: String,
    pub sigma_label: String,
    pub forward: QueryResult,
    pub backward: Option<QueryResult>,
    pub auxiliary: Option<QueryResult>,
    pub components: Vec<QueryResult>,
    pub outcome: OutcomeClass,
    /// The outcome in words, with its tested-Σ-and-bound qualifier.
    pub label: String,
    pub caveats: Vec<String>,
    pub fidelity_flags: Vec<FidelityFlag>,
    pub corpus_check: Option<VerificationReport>,
    /// Differences from the attached expectation; empty when it held.
    pub mismatches: Vec<String>,
}

impl ExperimentResult {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }

    fn queries(&self) -> impl Iterator<Item = &QueryResult> {
        std::iter::once(&self.forward)
            .chain(&self.backward)
            .chain(&self.auxiliary)
            .chain(&self.components)
    }

    /// Counters summed over every query of the experiment.
    pub fn total_stats(&self) -> SearchStats {
        let mut total = SearchStats::default();
        for q in self.queries() {
            total.decisions += q.stats.decisions;
            total.propagations += q.stats.propagations;
            total.conflicts += q.stats.conflicts;
            total.pruned_subtrees += q.stats.pruned_subtrees;
        }
        total
    }

    pub fn to_json(&self) -> Value {
        let stats = self.total_stats();
        let mut v = json!({
            "name": self.name,
            "axiom": self.axiom,
            "forward": self.forward.to_json(),
            "outcome": self.outcome.as_str(),
            "label": self.label,
            "caveats": self.caveats,
            "fidelity_flags": self.fidelity_flags,
            "stats": {
                "decisions": stats.decisions,
                "propagations": stats.propagations,
                "conflicts": stats.conflicts,
                "pruned_subtrees": stats.pruned_subtrees,
            },
        });
        if let Some(b) = &self.backward {
            v["backward"] = b.to_json();
        }
        if let Some(a) = &self.auxiliary {
            v["auxiliary"] = a.to_json();
        }
        if !self.components.is_empty() {
            v["components"] =
                Value::Array(self.components.iter().map(QueryResult::to_json).collect());
        }
        if let Some(c) = &self.corpus_check {
            v["corpus_check"] = json!({
                "model": c.model,
                "verdict": c.verdict.to_string(),
                "witnesses": c.witnesses,
            });
        }
        if !self.mismatches.is_empty() {
            v["expectation_mismatches"] = json!(self.mismatches);
        }
        v
    }

    /// Plain-text report. With `strict`, only verdicts are printed.
    pub fn render(&self, strict: bool) -> String {
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        line(format!("experiment {}", self.name));
        let mut query = |role: &str, q: &QueryResult| {
            line(format!(
                "  {role}: {{{}}} vs {}: {}",
                q.premises.join(", "),
                q.target,
                q.summary()
            ));
        };
        query("forward", &self.forward);
        if let Some(b) = &self.backward {
            query("backward", b);
        }
        if let Some(a) = &self.auxiliary {
            query("auxiliary", a);
        }
        for c in &self.components {
            query("component", c);
        }
        if let Some(c) = &self.corpus_check {
            line(format!("  corpus {}: {}", c.model, c.summary()));
        }
        if !strict {
            line(format!("  outcome: {} [{}]", self.label, self.outcome));
            for c in &self.caveats {
                line(format!("  caveat: {c}"));
            }
            if !self.fidelity_flags.is_empty() {
                let flags: Vec<&str> = self.fidelity_flags.iter().map(|f| f.as_str()).collect();
                line(format!("  fidelity flags: {}", flags.join(", ")));
            }
        }
        for m in &self.mismatches {
            line(format!("  EXPECTATION MISMATCH: {m}"));
        }
        out
    }
}

fn narrative(class: OutcomeClass, trivial: bool) -> &'static str {
    match class {
        OutcomeClass::FullReduction => "Full reduction",
        OutcomeClass::EqualStrengthTranslation if trivial => "Trivial redescription",
        OutcomeClass::EqualStrengthTranslation => "Equal-strength translation",
        OutcomeClass::PartialReduction => "Partial reduction; full irreducible",
        OutcomeClass::DecompositionOnly => "Decomposition only",
        OutcomeClass::FullIrreducibility => "Full irreducibility",
    }
}

/// A single-axiom Σ whose converse is exactly the target against that axiom:
/// the two axioms are restatements of each other.
fn is_trivial_redescription(forward: &QueryResult, backward: Option<&QueryResult>) -> bool {
    backward.is_some_and(|b| {
        b.kind() == VerdictKind::NoCounterexample
            && forward.premises.len() == 1
            && b.premises == [forward.target.clone()]
            && b.target == forward.premises[0]
    })
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult, ExperimentError> {
    let search_err = |source| ExperimentError::Search {
        experiment: spec.name.clone(),
        source,
    };
    let run = |q: &Query| run_query(q, &spec.config).map_err(search_err);
    let forward = run(&spec.forward)?;
    let backward = spec.backward.as_ref().map(run).transpose()?;
    let auxiliary = spec.auxiliary.as_ref().map(run).transpose()?;
    let components = spec
        .components
        .iter()
        .map(run)
        .collect::<Result<Vec<_>, _>>()?;

    let evidence = Evidence {
        forward: Some(forward.kind()),
        backward: backward.as_ref().map(QueryResult::kind),
        auxiliary: auxiliary.as_ref().map(QueryResult::kind),
        components: components.iter().map(QueryResult::kind).collect(),
    };
    let outcome = classify_outcome(&evidence).map_err(|source| ExperimentError::Classify {
        experiment: spec.name.clone(),
        source,
    })?;

    let mut notes = spec.label_notes.clone();
    notes.push(format!(
        "within {}, bound {}",
        spec.sigma_label,
        forward.bound_text()
    ));
    let label = format!(
        "{} ({})",
        narrative(
            outcome,
            is_trivial_redescription(&forward, backward.as_ref())
        ),
        notes.join("; ")
    );

    let mut caveats = vec![
        "verdicts cover only the tested premise sets and models up to the stated bound".to_string(),
        "predicates outside each query's support were fixed false during search".to_string(),
    ];
    let mut decided: Vec<&str> = Vec::new();
    for q in std::iter::once(&forward)
        .chain(&backward)
        .chain(&auxiliary)
        .chain(&components)
    {
        for id in q.premises.iter().chain([&q.target]) {
            let entry = axiom(id).expect("resolved above");
            if entry.status == AxiomStatus::DecidedHere && !decided.contains(&entry.id) {
                decided.push(entry.id);
            }
        }
    }
    if !decided.is_empty() {
        caveats.push(format!(
            "formula rendering decided here for {}",
            decided.join(", ")
        ));
    }
    caveats.extend(spec.extra_caveats.iter().cloned());

    let mut fidelity_flags = Vec::new();
    let mut corpus_check = None;
    if let Some(name) = &spec.corpus_witness {
        let corpus =
            corpus_model(name).ok_or_else(|| ExperimentError::UnknownExperiment(name.clone()))?;
        let report = verify_corpus(&corpus, &spec.forward.premises, &spec.forward.target).map_err(
            |source| ExperimentError::Verify {
                experiment: spec.name.clone(),
                source,
            },
        )?;
        fidelity_flags = report.fidelity_flags.clone();
        caveats.push(format!(
            "corpus model {} carries fidelity flags {}",
            corpus.name,
            corpus
                .fidelity_flags
                .iter()
                .map(|f| f.as_str())
                .collect::<Vec<_>>()
                .join(", ")
        ));
        corpus_check = Some(report);
    }

    let mut mismatches = Vec::new();
    if let Some(exp) = &spec.expectation {
        let mut check = |what: &str, expected: Option<VerdictKind>, got: Option<VerdictKind>| {
            if let Some(e) = expected {
                if got != Some(e) {
                    mismatches.push(format!(
                        "{what}: expected {e}, got {}",
                        got.map_or("nothing".to_string(), |g| g.to_string())
                    ));
                }
            }
        };
        check("forward", Some(exp.forward), evidence.forward);
        check("backward", exp.backward, evidence.backward);
        check("auxiliary", exp.auxiliary, evidence.auxiliary);
        if outcome != exp.outcome {
            mismatches.push(format!("outcome: expected {}, got {outcome}", exp.outcome));
        }
    }
    if let Some(c) = &corpus_check {
        if c.verdict != crate::corpus::Verdict::Confirmed {
            mismatches.push(format!(
                "corpus {}: expected confirmed, got {}",
                c.model, c.verdict
            ));
        }
    }

    Ok(ExperimentResult {
        name: spec.name.clone(),
        axiom: spec.axiom.clone(),
        sigma_label: spec.sigma_label.clone(),
        forward,
        backward,
        auxiliary,
        components,
        outcome,
        label,
        caveats,
        fidelity_flags,
        corpus_check,
        mismatches,
    })
}

pub const PROBE_PREMISES: [&str; 2] = ["SectionIBridges", "A22"];
pub const PROBE_TARGET: &str = "A12";

/// The full-register probe's search result and, when it finds a model, the
/// verifier's independent check of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeResult {
    pub query: QueryResult,
    pub verification: Option<VerificationReport>,
}

impl ProbeResult {
    pub fn model(&self) -> Option<&FiniteModel> {
        self.query.verdict.model()
    }
}

/// Searches for a model of the Section I bridges plus A22 that falsifies A12.
/// No outcome is expected either way.
pub fn conjecture_probe_full_register(
    config: &SearchConfig,
) -> Result<ProbeResult, ExperimentError> {
    let query =
        run_query(&Query::new(&PROBE_PREMISES, PROBE_TARGET), config).map_err(|source| {
            ExperimentError::Search {
                experiment: "probe full-register".into(),
                source,
            }
        })?;
    let verification = query
        .verdict
        .model()
        .map(|m| verify(m, &PROBE_PREMISES, PROBE_TARGET))
        .transpose()
        .map_err(|source| ExperimentError::Verify {
            experiment: "probe full-register".into(),
            source,
        })?;
    Ok(ProbeResult {
        query,
        verification,
    })
}
