use serde_json::{json, Value};

use super::{experiment, run_experiment, ExperimentError, ExperimentResult, RunOptions};

/// The experiments behind the four table rows, in row order.
pub const TABLE_EXPERIMENTS: [&str; 4] =
    ["A12_demote", "A13_demote", "A14_demote", "A15_plenitude"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducibilityTable {
    pub rows: Vec<ExperimentResult>,
}

/// Runs the four table experiments concurrently and assembles the rows in
/// fixed order.
pub fn reducibility_table(options: &RunOptions) -> Result<ReducibilityTable, ExperimentError> {
    let specs: Vec<_> = TABLE_EXPERIMENTS
        .iter()
        .map(|n| {
            let mut spec = experiment(n).expect("bundled name");
            options.apply(&mut spec.config);
            spec
        })
        .collect();
    let results: Vec<Result<ExperimentResult, ExperimentError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = specs
            .iter()
            .map(|spec| scope.spawn(move || run_experiment(spec)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("experiment threads do not panic"))
            .collect()
    });
    let mut rows = Vec::new();
    for (spec, r) in specs.iter().zip(results) {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => {
                return Err(ExperimentError::Table {
                    failed: spec.axiom.clone(),
                    partial: ReducibilityTable { rows }.to_markdown(false),
                    source: Box::new(e),
                })
            }
        }
    }
    Ok(ReducibilityTable { rows })
}

fn sigma_cell(row: &ExperimentResult) -> String {
    format!("{} ({})", row.sigma_label, row.forward.premises.join(", "))
}

fn verdict_cell(row: &ExperimentResult) -> String {
    let mut parts = vec![format!("forward {}", row.forward.summary())];
    if let Some(b) = &row.backward {
        parts.push(format!("backward {}", b.summary()));
    }
    if let Some(a) = &row.auxiliary {
        parts.push(format!("auxiliary vs {} {}", a.target, a.summary()));
    }
    for c in &row.components {
        parts.push(format!("{{{}}} {}", c.premises.join(", "), c.summary()));
    }
    parts.join("; ")
}

impl ReducibilityTable {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(ExperimentResult::passed)
    }

    /// Markdown table. With `strict`, the outcome labels are replaced by the
    /// underlying verdicts.
    pub fn to_markdown(&self, strict: bool) -> String {
        let mut out = String::new();
        if strict {
            out.push_str("| Axiom | Demote Σ | Verdicts |\n|---|---|---|\n");
            for row in &self.rows {
                out.push_str(&format!(
                    "| {} | {} | {} |\n",
                    row.axiom,
                    sigma_cell(row),
                    verdict_cell(row)
                ));
            }
            return out;
        }
        out.push_str("| Axiom | Demote Σ | Outcome | Class |\n|---|---|---|---|\n");
        for row in &self.rows {
            out.push_str(&format!(
                "| {} | {} | {} | {} |\n",
                row.axiom,
                sigma_cell(row),
                row.label,
                row.outcome
            ));
        }
        out.push_str("\nCaveats:\n");
        let shared: Vec<&String> = self
            .rows
            .first()
            .map(|first| {
                first
                    .caveats
                    .iter()
                    .filter(|c| self.rows.iter().all(|r| r.caveats.contains(c)))
                    .collect()
            })
            .unwrap_or_default();
        for c in &shared {
            out.push_str(&format!("- {c}\n"));
        }
        for row in &self.rows {
            for c in row.caveats.iter().filter(|c| !shared.contains(c)) {
                out.push_str(&format!("- {}: {c}\n", row.axiom));
            }
        }
        out
    }

    pub fn to_json(&self, strict: bool) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let mut v = json!({
                        "axiom": row.axiom,
                        "experiment": row.name,
                        "sigma": row.forward.premises,
                        "bound": {"things": row.forward.bound.0, "worlds": row.forward.bound.1},
                        "verdicts": verdict_cell(row),
                    });
                    if !strict {
                        v["outcome"] = json!(row.outcome.as_str());
                        v["label"] = json!(row.label);
                        v["caveats"] = json!(row.caveats);
                        v["fidelity_flags"] = json!(row.fidelity_flags);
                    }
                    v
                })
                .collect(),
        )
    }
}
