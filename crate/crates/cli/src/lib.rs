//! The `ethica` command-line driver.
//!
//! Exit codes: 0 when the command ran and every attached expectation held,
//! 1 when an expectation or verification failed, 2 for usage, parse and
//! evaluation errors, 3 when a search ran out of its node budget.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use ethica_core::corpus::{
    corpus_model, parse_model, serialize_model, verify, verify_corpus, Verdict, VerificationReport,
    CORPUS_NAMES,
};
use ethica_core::experiments::{
    bundled_experiments, conjecture_probe_full_register, experiment, reducibility_table,
    run_experiment, run_query, ExperimentError, Query, RunOptions, EXPERIMENT_NAMES,
    PROBE_PREMISES, PROBE_TARGET,
};
use ethica_core::registry::{catalogue, parse_selector_list, BUNDLES};
use ethica_core::search::{Pruning, SearchConfig, SearchError, NODE_BUDGET_ENV};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ethica",
    version,
    about = "Finite-model workbench for the Ethica Pars I axiom register"
)]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Print verdicts only, without outcome labels.
    #[arg(long, global = true)]
    strict_claims: bool,
    /// Search worker threads (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Disable lex-leader symmetry pruning.
    #[arg(long, global = true)]
    no_prune: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a model against premises and a falsification target.
    Verify {
        /// A model file, or corpus:NAME.
        model: String,
        #[arg(long)]
        premises: String,
        #[arg(long)]
        target: String,
    },
    /// Search for a counter-model up to a size bound.
    Search(SearchArgs),
    /// Like search, reporting the verdict only.
    Entail(SearchArgs),
    /// Bundled demote experiments.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
    /// The reducibility table of the four demote experiments.
    Table,
    /// Exploratory searches without expected outcomes.
    #[command(subcommand)]
    Probe(ProbeCommand),
    /// The axiom catalogue and bundles.
    ExportAxioms,
}

#[derive(Debug, Args)]
struct SearchArgs {
    /// Comma-separated axiom ids and bundle names.
    #[arg(long)]
    premises: String,
    #[arg(long)]
    target: String,
    #[arg(long, default_value_t = 4)]
    max_things: usize,
    #[arg(long)]
    max_worlds: Option<usize>,
    /// Comma-separated predicates allowed non-empty tables.
    #[arg(long)]
    support: Option<String>,
}

#[derive(Debug, Subcommand)]
enum ExperimentCommand {
    /// Run one experiment by name, or `all`.
    Run { name: String },
    /// List bundled experiments.
    List,
}

#[derive(Debug, Subcommand)]
enum ProbeCommand {
    /// Search for a model of SectionIBridges + A22 falsifying A12.
    FullRegister {
        #[arg(long, default_value_t = 3)]
        max_things: usize,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        let code = match e {
            SearchError::ResourceLimit { .. } => EXIT_RESOURCE,
            SearchError::Unsound(_) => EXIT_FAILED,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        let code = if e.is_resource_limit() {
            EXIT_RESOURCE
        } else {
            EXIT_USAGE
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

struct Ctx<'a> {
    json: bool,
    strict: bool,
    options: RunOptions,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn print(&mut self, text: &str) {
        let _ = self.out.write_all(text.as_bytes());
    }

    fn print_json(&mut self, v: &Value) {
        let text = serde_json::to_string_pretty(v).expect("json values serialize");
        let _ = writeln!(self.out, "{text}");
    }
}

fn node_budget_from_env() -> Result<Option<u64>, Failure> {
    match std::env::var(NODE_BUDGET_ENV) {
        Ok(v) => v.trim().parse::<u64>().map(Some).map_err(|_| {
            Failure::usage(format!(
                "{NODE_BUDGET_ENV} must be a non-negative integer, got `{v}`"
            ))
        }),
        Err(_) => Ok(None),
    }
}

/// Runs the driver on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(rendered.as_bytes());
            } else {
                let _ = out.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let options = RunOptions {
        workers: cli.workers,
        pruning: cli.no_prune.then_some(Pruning::None),
        node_budget: node_budget_from_env()?,
    };
    let mut ctx = Ctx {
        json: cli.json,
        strict: cli.strict_claims,
        options,
        out,
    };
    match cli.command {
        Command::Verify {
            model,
            premises,
            target,
        } => cmd_verify(&mut ctx, &model, &premises, &target),
        Command::Search(args) => cmd_search(&mut ctx, &args, false),
        Command::Entail(args) => cmd_search(&mut ctx, &args, true),
        Command::Experiment(ExperimentCommand::Run { name }) => cmd_experiment(&mut ctx, &name),
        Command::Experiment(ExperimentCommand::List) => cmd_experiment_list(&mut ctx),
        Command::Table => cmd_table(&mut ctx),
        Command::Probe(ProbeCommand::FullRegister { max_things }) => {
            cmd_probe(&mut ctx, max_things)
        }
        Command::ExportAxioms => cmd_export(&mut ctx),
    }
}

fn report_json(r: &VerificationReport) -> Value {
    json!({
        "model": r.model,
        "premises": r.premises,
        "target": r.target,
        "target_holds": r.target_holds,
        "witness_vars": r.witness_vars,
        "witnesses": r.witnesses,
        "fidelity_flags": r.fidelity_flags,
        "verdict": r.verdict.to_string(),
    })
}

fn report_text(r: &VerificationReport) -> String {
    let mut s = format!("model {}\n", r.model);
    for p in &r.premises {
        s.push_str(&format!("  premise {}: {}\n", p.id, p.holds));
    }
    s.push_str(&format!("  target {}: {}\n", r.target, r.target_holds));
    if !r.fidelity_flags.is_empty() {
        let flags: Vec<&str> = r.fidelity_flags.iter().map(|f| f.as_str()).collect();
        s.push_str(&format!("  fidelity flags: {}\n", flags.join(", ")));
    }
    s.push_str(&format!("{}\n", r.summary()));
    s
}

fn cmd_verify(ctx: &mut Ctx, source: &str, premises: &str, target: &str) -> Result<i32, Failure> {
    let premises = parse_selector_list(premises);
    let report = if let Some(name) = source.strip_prefix("corpus:") {
        let corpus = corpus_model(name).ok_or_else(|| {
            Failure::usage(format!(
                "unknown corpus model {name}; available: {}",
                CORPUS_NAMES.join(", ")
            ))
        })?;
        verify_corpus(&corpus, &premises, target)
    } else {
        let text = std::fs::read_to_string(source)
            .map_err(|e| Failure::usage(format!("{source}: {e}")))?;
        let model = parse_model(&text).map_err(|e| Failure::usage(format!("{source}: {e}")))?;
        verify(&model, &premises, target)
    }
    .map_err(|e| Failure::usage(e.to_string()))?;
    if ctx.json {
        ctx.print_json(&report_json(&report));
    } else {
        ctx.print(&report_text(&report));
    }
    Ok(if report.verdict == Verdict::Confirmed {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}

fn cmd_search(ctx: &mut Ctx, args: &SearchArgs, verdict_only: bool) -> Result<i32, Failure> {
    let premises = parse_selector_list(&args.premises);
    let mut config = SearchConfig {
        max_things: args.max_things,
        max_worlds: args.max_worlds,
        support: args.support.as_deref().map(parse_selector_list),
        ..Default::default()
    };
    ctx.options.apply(&mut config);
    let query = Query {
        premises: premises.clone(),
        target: args.target.clone(),
    };
    let query = run_query(&query, &config)?;
    let verification = query
        .verdict
        .model()
        .map(|m| verify(m, &premises, &args.target))
        .transpose()
        .map_err(|e| Failure::usage(e.to_string()))?;
    if ctx.json {
        let mut v = query.to_json();
        if !verdict_only {
            let s = &query.stats;
            v["stats"] = json!({
                "decisions": s.decisions,
                "propagations": s.propagations,
                "conflicts": s.conflicts,
                "pruned_subtrees": s.pruned_subtrees,
                "sizes_exhausted": s.sizes_exhausted,
            });
            if let Some(r) = &verification {
                v["verification"] = report_json(r);
            }
        }
        ctx.print_json(&v);
    } else if verdict_only || ctx.strict {
        ctx.print(&format!("{}\n", query.verdict));
    } else {
        let s = &query.stats;
        let mut text = format!(
            "premises: {{{}}}\ntarget: {}\nverdict: {}\nbound: {}\nsupport: {}\n",
            query.premises.join(", "),
            query.target,
            query.verdict,
            query.bound_text(),
            s.within_support.join(", "),
        );
        let exhausted: Vec<String> = s
            .sizes_exhausted
            .iter()
            .map(|&(t, w)| {
                if w == 0 {
                    t.to_string()
                } else {
                    format!("{t}/{w}")
                }
            })
            .collect();
        text.push_str(&format!(
            "sizes exhausted: {}\nstats: {} decisions, {} propagations, {} conflicts, {} pruned subtrees\n",
            if exhausted.is_empty() { "none".to_string() } else { exhausted.join(", ") },
            s.decisions,
            s.propagations,
            s.conflicts,
            s.pruned_subtrees,
        ));
        if let Some(m) = query.verdict.model() {
            text.push_str("model:\n");
            text.push_str(&serialize_model(m));
        }
        if let Some(r) = &verification {
            text.push_str(&format!("verify: {}\n", r.summary()));
        }
        ctx.print(&text);
    }
    let sound = verification
        .as_ref()
        .is_none_or(|r| r.verdict == Verdict::Confirmed);
    Ok(if sound { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_experiment(ctx: &mut Ctx, name: &str) -> Result<i32, Failure> {
    let specs = if name == "all" {
        bundled_experiments()
    } else {
        vec![experiment(name).ok_or_else(|| {
            Failure::usage(format!(
                "unknown experiment {name}; available: {}, all",
                EXPERIMENT_NAMES.join(", ")
            ))
        })?]
    };
    let mut results = Vec::new();
    for mut spec in specs {
        ctx.options.apply(&mut spec.config);
        results.push(run_experiment(&spec)?);
    }
    if ctx.json {
        let values: Vec<Value> = results.iter().map(|r| r.to_json()).collect();
        ctx.print_json(&if values.len() == 1 {
            values[0].clone()
        } else {
            Value::Array(values)
        });
    } else {
        for r in &results {
            ctx.print(&r.render(ctx.strict));
        }
    }
    Ok(if results.iter().all(|r| r.passed()) {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}

fn cmd_experiment_list(ctx: &mut Ctx) -> Result<i32, Failure> {
    let mut text = String::new();
    for spec in bundled_experiments() {
        text.push_str(&format!(
            "{}: {{{}}} vs {}, bound {}\n",
            spec.name,
            spec.forward.premises.join(", "),
            spec.forward.target,
            spec.config.max_things
        ));
    }
    ctx.print(&text);
    Ok(EXIT_OK)
}

fn cmd_table(ctx: &mut Ctx) -> Result<i32, Failure> {
    let table = reducibility_table(&ctx.options)?;
    if ctx.json {
        ctx.print_json(&table.to_json(ctx.strict));
    } else {
        ctx.print(&table.to_markdown(ctx.strict));
    }
    Ok(if table.passed() { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_probe(ctx: &mut Ctx, max_things: usize) -> Result<i32, Failure> {
    let mut config = SearchConfig::with_max_things(max_things);
    ctx.options.apply(&mut config);
    let probe = conjecture_probe_full_register(&config)?;
    let q = &probe.query;
    if ctx.json {
        let mut v = q.to_json();
        v["stats"] = json!({
            "decisions": q.stats.decisions,
            "propagations": q.stats.propagations,
            "conflicts": q.stats.conflicts,
            "pruned_subtrees": q.stats.pruned_subtrees,
            "sizes_exhausted": q.stats.sizes_exhausted,
        });
        if let Some(r) = &probe.verification {
            v["verification"] = report_json(r);
        }
        ctx.print_json(&v);
    } else {
        let mut text = format!(
            "probe full-register: {{{}}} vs {}\nverdict: {}\n",
            PROBE_PREMISES.join(", "),
            PROBE_TARGET,
            q.summary()
        );
        if !ctx.strict {
            text.push_str("no expected outcome: the transfer of the A12 counter-model to the full register is an open conjecture\n");
            text.push_str(&format!(
                "stats: {} decisions, {} propagations, {} conflicts, {} pruned subtrees\n",
                q.stats.decisions, q.stats.propagations, q.stats.conflicts, q.stats.pruned_subtrees
            ));
        }
        if let Some(m) = probe.model() {
            text.push_str("model:\n");
            text.push_str(&serialize_model(m));
        }
        if let Some(r) = &probe.verification {
            text.push_str(&format!("verify: {}\n", r.summary()));
        }
        ctx.print(&text);
    }
    let sound = probe
        .verification
        .as_ref()
        .is_none_or(|r| r.verdict == Verdict::Confirmed);
    Ok(if sound { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_export(ctx: &mut Ctx) -> Result<i32, Failure> {
    if ctx.json {
        let axioms: Vec<Value> = catalogue()
            .iter()
            .map(|e| {
                json!({
                    "id": e.id,
                    "name": e.name,
                    "section": e.section,
                    "statement": e.statement,
                    "formula": e.formula.to_string(),
                    "citation": e.citation,
                    "status": e.status,
                })
            })
            .collect();
        let bundles: Vec<Value> = BUNDLES
            .iter()
            .map(|(name, ids)| json!({"name": name, "members": ids}))
            .collect();
        ctx.print_json(&json!({"axioms": axioms, "bundles": bundles}));
    } else {
        let mut text =
            String::from("| Id | Section | Status | Formula | Citation |\n|---|---|---|---|---|\n");
        for e in catalogue() {
            text.push_str(&format!(
                "| {} | {} | {} | `{}` | {} |\n",
                e.id,
                e.section,
                e.status,
                e.formula,
                e.citation.replace('|', "\\|")
            ));
        }
        text.push_str("\n| Bundle | Members |\n|---|---|\n");
        for (name, ids) in BUNDLES {
            text.push_str(&format!("| {name} | {} |\n", ids.join(", ")));
        }
        ctx.print(&text);
    }
    Ok(EXIT_OK)
}
