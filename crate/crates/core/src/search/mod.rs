//! Bounded counter-model search: ground `Σ ∧ ¬A` on ascending universe
//! sizes and look for a satisfying table assignment.

mod canon;
mod naive_psr;
mod sat;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::logic::{
    check_sorted, evaluate, FiniteModel, Formula, GroundError, Grounder, Lit, Skeleton, Sort,
    SortError,
};
use crate::registry::{axiom, axiom_set, ethica_signature, AxiomEntry, RegistryError};

pub use canon::{canonical_form, table_encoding};
pub use naive_psr::{check_naive_psr, Discriminator, NaivePsrReport};

use sat::{Cancel, Outcome, Problem, SolverStats};

pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;
pub const DEFAULT_MAX_WORLDS: usize = 2;
/// Environment variable read by the command-line driver to override the node budget.
pub const NODE_BUDGET_ENV: &str = "ETHICA_NODE_BUDGET";

/// Number of leading table bits fixed per parallel job. Independent of the
/// worker count so that runs with any number of workers do the same work.
const SPLIT_BITS: usize = 6;
/// Above this group size only adjacent transpositions are used for pruning.
const MAX_SYMMETRIES: usize = 40_320;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Pruning {
    None,
    Canonical,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub max_things: usize,
    /// Upper bound on the world universe; `None` means [`DEFAULT_MAX_WORLDS`]
    /// when any formula mentions World. Ignored otherwise.
    pub max_worlds: Option<usize>,
    /// Predicates allowed non-empty tables; `None` means those occurring in
    /// the premises and target.
    pub support: Option<Vec<String>>,
    pub pruning: Pruning,
    pub workers: usize,
    /// Propagation steps allowed per universe size.
    pub node_budget: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_things: 4,
            max_worlds: None,
            support: None,
            pruning: Pruning::Canonical,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

impl SearchConfig {
    pub fn with_max_things(max_things: usize) -> Self {
        SearchConfig {
            max_things,
            ..Default::default()
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error(transparent)]
    Sort(#[from] SortError),
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error("support predicate {0} is not in the signature")]
    UnknownSupportPredicate(String),
    #[error(
        "resource limit: node budget of {budget} exceeded at {things} things, {worlds} worlds"
    )]
    ResourceLimit {
        things: usize,
        worlds: usize,
        budget: u64,
    },
    #[error("grounding failed: {0}")]
    Ground(#[from] GroundError),
    #[error("internal error: candidate model failed re-evaluation ({0})")]
    Unsound(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum EntailmentVerdict {
    Refuted {
        model: FiniteModel,
        things: usize,
        worlds: usize,
    },
    NoCounterexampleUpTo {
        things: usize,
        worlds: usize,
    },
}

impl EntailmentVerdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self, EntailmentVerdict::Refuted { .. })
    }

    pub fn model(&self) -> Option<&FiniteModel> {
        match self {
            EntailmentVerdict::Refuted { model, .. } => Some(model),
            EntailmentVerdict::NoCounterexampleUpTo { .. } => None,
        }
    }
}

fn size_text(things: usize, worlds: usize) -> String {
    if worlds == 0 {
        things.to_string()
    } else {
        format!("{things} things, {worlds} worlds")
    }
}

impl fmt::Display for EntailmentVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntailmentVerdict::Refuted { things, worlds, .. } => {
                write!(f, "Refuted(size {})", size_text(*things, *worlds))
            }
            EntailmentVerdict::NoCounterexampleUpTo { things, worlds } => {
                write!(f, "NoCounterexampleUpTo({})", size_text(*things, *worlds))
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
    /// Subtrees cut by the lex-leader symmetry check.
    pub pruned_subtrees: u64,
    /// `(things, worlds)` sizes searched completely without a counter-model.
    pub sizes_exhausted: Vec<(usize, usize)>,
    /// Predicates that were allowed non-empty tables; all others were fixed false.
    pub within_support: Vec<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl SearchStats {
    fn absorb(&mut self, s: &SolverStats) {
        self.decisions += s.decisions;
        self.propagations += s.propagations;
        self.conflicts += s.conflicts;
        self.pruned_subtrees += s.pruned;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport {
    pub verdict: EntailmentVerdict,
    pub stats: SearchStats,
}

/// Looks for a model of the premises falsifying the target, trying thing
/// sizes `1..=max_things` in order. The model returned is the one with the
/// least table encoding at the least size, and so does not depend on the
/// worker count.
pub fn find_countermodel<S: AsRef<str>>(
    premises: &[S],
    target: &str,
    config: &SearchConfig,
) -> Result<Option<(FiniteModel, usize)>, SearchError> {
    Ok(match entails_bounded(premises, target, config)?.verdict {
        EntailmentVerdict::Refuted { model, things, .. } => Some((model, things)),
        EntailmentVerdict::NoCounterexampleUpTo { .. } => None,
    })
}

/// Bounded entailment of `target` from `premises` (axiom ids or bundle names).
pub fn entails_bounded<S: AsRef<str>>(
    premises: &[S],
    target: &str,
    config: &SearchConfig,
) -> Result<SearchReport, SearchError> {
    let premises = axiom_set(premises)?;
    let target = axiom(target)?;
    entails_entries(&premises, target, config)
}

pub fn entails_entries(
    premises: &[&AxiomEntry],
    target: &AxiomEntry,
    config: &SearchConfig,
) -> Result<SearchReport, SearchError> {
    let formulas: Vec<&Formula> = premises.iter().map(|e| &e.formula).collect();
    entails_formulas(&formulas, &target.formula, config)
}

/// The search over explicit closed formulas of the Ethica signature.
pub fn entails_formulas(
    premises: &[&Formula],
    target: &Formula,
    config: &SearchConfig,
) -> Result<SearchReport, SearchError> {
    let start = Instant::now();
    let sig = ethica_signature();
    for f in premises.iter().copied().chain([target]) {
        check_sorted(f, sig)?;
    }
    if config.max_things == 0 {
        return Err(SearchError::InvalidConfig(
            "max_things must be at least 1".into(),
        ));
    }
    let modal = premises.iter().any(|f| f.mentions_world()) || target.mentions_world();
    let max_worlds = if modal {
        let w = config.max_worlds.unwrap_or(DEFAULT_MAX_WORLDS);
        if w == 0 {
            return Err(SearchError::InvalidConfig(
                "the formulas mention World, so max_worlds must be at least 1".into(),
            ));
        }
        w
    } else {
        0
    };

    let support_names: BTreeSet<String> = match &config.support {
        Some(list) => {
            if let Some(bad) = list.iter().find(|p| !sig.contains(p)) {
                return Err(SearchError::UnknownSupportPredicate(bad.clone()));
            }
            list.iter().cloned().collect()
        }
        None => premises
            .iter()
            .copied()
            .chain([target])
            .flat_map(Formula::predicates)
            .collect(),
    };
    let support: Vec<(String, Vec<Sort>)> = support_names
        .iter()
        .map(|p| {
            (
                p.clone(),
                sig.get(p).expect("checked above").argument_sorts.clone(),
            )
        })
        .collect();

    let mut stats = SearchStats {
        within_support: support_names.into_iter().collect(),
        ..Default::default()
    };
    let world_sizes: Vec<usize> = if modal {
        (1..=max_worlds).collect()
    } else {
        vec![0]
    };
    for things in 1..=config.max_things {
        for &worlds in &world_sizes {
            let skeleton = Skeleton::new(things, worlds);
            match search_size(premises, target, skeleton, &support, config, &mut stats)? {
                Some(model) => {
                    stats.elapsed = start.elapsed();
                    return Ok(SearchReport {
                        verdict: EntailmentVerdict::Refuted {
                            model,
                            things,
                            worlds,
                        },
                        stats,
                    });
                }
                None => stats.sizes_exhausted.push((things, worlds)),
            }
        }
    }
    stats.elapsed = start.elapsed();
    Ok(SearchReport {
        verdict: EntailmentVerdict::NoCounterexampleUpTo {
            things: config.max_things,
            worlds: max_worlds,
        },
        stats,
    })
}

fn search_size(
    premises: &[&Formula],
    target: &Formula,
    skeleton: Skeleton,
    support: &[(String, Vec<Sort>)],
    config: &SearchConfig,
    stats: &mut SearchStats,
) -> Result<Option<FiniteModel>, SearchError> {
    let mut grounder = Grounder::with_support(skeleton, support);
    for p in premises {
        grounder.assert(p)?;
    }
    grounder.assert_negated(target)?;
    let set = grounder.finish();
    let atoms: Vec<_> = set.atoms().map(|(v, a)| (v, a.clone())).collect();
    let num_table_vars = atoms.len();
    debug_assert!(atoms.iter().enumerate().all(|(i, (v, _))| i == *v));

    let symmetries = match config.pruning {
        Pruning::None => Vec::new(),
        Pruning::Canonical => {
            let index: HashMap<(&str, Vec<usize>), u32> = atoms
                .iter()
                .map(|(v, a)| ((a.pred.as_str(), a.indices()), *v as u32))
                .collect();
            symmetry_group(skeleton)
                .into_iter()
                .map(|(tp, wp)| {
                    atoms
                        .iter()
                        .map(|(_, a)| {
                            let image = a
                                .args
                                .iter()
                                .map(|e| match e.sort {
                                    Sort::Thing => tp[e.index],
                                    Sort::World => wp[e.index],
                                })
                                .collect();
                            index[&(a.pred.as_str(), image)]
                        })
                        .collect()
                })
                .collect()
        }
    };
    let problem = Problem {
        num_vars: set.num_vars(),
        num_table_vars,
        clauses: set.clauses().to_vec(),
        symmetries,
    };

    let split = SPLIT_BITS.min(num_table_vars);
    let jobs: Vec<Vec<Lit>> = (0..1usize << split)
        .map(|bits| {
            (0..split)
                .map(|i| Lit::new(i, bits >> (split - 1 - i) & 1 == 1))
                .collect()
        })
        .collect();
    let results: Mutex<Vec<Option<(Outcome, SolverStats)>>> = Mutex::new(vec![None; jobs.len()]);
    let best = AtomicUsize::new(usize::MAX);
    let next = AtomicUsize::new(0);
    let workers = config.workers.clamp(1, jobs.len());
    let run_jobs = || loop {
        let job = next.fetch_add(1, Ordering::Relaxed);
        if job >= jobs.len() || job > best.load(Ordering::Relaxed) {
            break;
        }
        let cancel = Cancel { best: &best, job };
        let (outcome, s) = sat::solve(&problem, &jobs[job], config.node_budget, Some(&cancel));
        if matches!(outcome, Outcome::Sat(_)) {
            best.fetch_min(job, Ordering::Relaxed);
        }
        results
            .lock()
            .expect("no worker panics while holding the lock")[job] = Some((outcome, s));
    };
    if workers == 1 {
        run_jobs();
    } else {
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(run_jobs);
            }
        });
    }

    let results = results.into_inner().expect("workers have finished");
    let winner = best.into_inner();
    let considered = winner.min(jobs.len() - 1);
    let mut size_stats = SolverStats::default();
    let mut over_budget = false;
    for r in &results[..=considered] {
        let (outcome, s) = r
            .as_ref()
            .expect("every job up to the winner runs to completion");
        size_stats.add(s);
        over_budget |= matches!(outcome, Outcome::BudgetExceeded | Outcome::Cancelled);
    }
    stats.absorb(&size_stats);
    if over_budget || size_stats.propagations > config.node_budget {
        return Err(SearchError::ResourceLimit {
            things: skeleton.things,
            worlds: skeleton.worlds,
            budget: config.node_budget,
        });
    }
    let Some((Outcome::Sat(assignment), _)) = results.get(winner).cloned().flatten() else {
        return Ok(None);
    };

    let mut model = FiniteModel::with_sizes("countermodel", skeleton.things, skeleton.worlds)
        .expect("skeleton has at least one thing");
    for (pred, sorts) in support {
        let tuples = atoms
            .iter()
            .filter(|(v, a)| &a.pred == pred && assignment[*v])
            .map(|(_, a)| a.indices());
        model
            .set_table_indices(pred, sorts, tuples)
            .expect("atoms lie inside the skeleton");
    }
    recheck(&model, premises, target)?;
    Ok(Some(model))
}

/// Thing and world permutation pairs other than the identity.
fn symmetry_group(skeleton: Skeleton) -> Vec<(Vec<usize>, Vec<usize>)> {
    let full = |n: usize| (1..=n).product::<usize>();
    let id = |n: usize| (0..n).collect::<Vec<_>>();
    let transpositions = |n: usize| {
        (0..n.saturating_sub(1))
            .map(|i| {
                let mut p = id(n);
                p.swap(i, i + 1);
                p
            })
            .collect::<Vec<_>>()
    };
    let (t, w) = (skeleton.things, skeleton.worlds);
    if full(t) * full(w) <= MAX_SYMMETRIES {
        let wps = canon::permutations(w);
        let mut out = Vec::new();
        for tp in canon::permutations(t) {
            for wp in &wps {
                if tp != id(t) || *wp != id(w) {
                    out.push((tp.clone(), wp.clone()));
                }
            }
        }
        out
    } else {
        transpositions(t)
            .into_iter()
            .map(|tp| (tp, id(w)))
            .chain(transpositions(w).into_iter().map(|wp| (id(t), wp)))
            .collect()
    }
}

fn recheck(
    model: &FiniteModel,
    premises: &[&Formula],
    target: &Formula,
) -> Result<(), SearchError> {
    let asg = Default::default();
    for (i, p) in premises.iter().enumerate() {
        if !evaluate(p, model, &asg).map_err(|e| SearchError::Unsound(e.to_string()))? {
            return Err(SearchError::Unsound(format!("premise {} is false", i + 1)));
        }
    }
    if evaluate(target, model, &asg).map_err(|e| SearchError::Unsound(e.to_string()))? {
        return Err(SearchError::Unsound("target holds".into()));
    }
    Ok(())
}
