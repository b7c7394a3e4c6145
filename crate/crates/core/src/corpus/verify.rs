use serde::Serialize;
use thiserror::Error;

use super::fixtures::{CorpusModel, FidelityFlag};
use crate::logic::{
    all_tuples, check_sorted, evaluate, evaluate_at, Element, EvalError, FiniteModel, ModelError,
    SortError,
};
use crate::registry::{axiom, axiom_set, ethica_signature, RegistryError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sort(#[from] SortError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PremiseResult {
    pub id: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "axiom", rename_all = "kebab-case")]
pub enum Verdict {
    Confirmed,
    PremiseFailure(String),
    TargetNotFalsified,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Confirmed => f.write_str("confirmed"),
            Verdict::PremiseFailure(id) => write!(f, "premise-failure({id})"),
            Verdict::TargetNotFalsified => f.write_str("target-not-falsified"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub model: String,
    pub premises: Vec<PremiseResult>,
    pub target: String,
    pub target_holds: bool,
    /// Variables of the target's outermost universal block.
    pub witness_vars: Vec<String>,
    /// Every tuple (as labels) falsifying the target's matrix, in universe order.
    pub witnesses: Vec<Vec<String>>,
    pub fidelity_flags: Vec<FidelityFlag>,
    pub verdict: Verdict,
}

impl VerificationReport {
    /// `(s1, s2, a_shared)`
    pub fn render_witness(w: &[String]) -> String {
        format!("({})", w.join(", "))
    }

    /// `confirmed; witness (s1, s2, a_shared) (also (s2, s1, a_shared))`
    pub fn summary(&self) -> String {
        if self.verdict != Verdict::Confirmed || self.witnesses.is_empty() {
            return self.verdict.to_string();
        }
        let ws: Vec<String> = self
            .witnesses
            .iter()
            .map(|w| Self::render_witness(w))
            .collect();
        let mut s = format!("{}; witness {}", self.verdict, ws[0]);
        if ws.len() > 1 {
            s.push_str(&format!(" (also {})", ws[1..].join(", ")));
        }
        s
    }
}

/// Evaluates every premise and the target on `model` and enumerates the
/// falsifying instances of the target's leading universal quantifiers.
///
/// The verdict is the first failing premise in the given order if any,
/// otherwise `TargetNotFalsified` when the target holds, otherwise `Confirmed`.
pub fn verify<S: AsRef<str>>(
    model: &FiniteModel,
    premises: &[S],
    target: &str,
) -> Result<VerificationReport, VerifyError> {
    let sig = ethica_signature();
    model.validate(sig)?;
    let premise_entries = axiom_set(premises)?;
    let target_entry = axiom(target)?;

    let mut results = Vec::with_capacity(premise_entries.len());
    for entry in &premise_entries {
        check_sorted(&entry.formula, sig)?;
        results.push(PremiseResult {
            id: entry.id.to_string(),
            holds: evaluate(&entry.formula, model, &Default::default())?,
        });
    }
    check_sorted(&target_entry.formula, sig)?;
    let target_holds = evaluate(&target_entry.formula, model, &Default::default())?;

    let (prefix, matrix) = target_entry.formula.universal_prefix();
    let mut witnesses = Vec::new();
    if !target_holds {
        let sizes: Vec<usize> = prefix.iter().map(|(_, s)| model.size(*s)).collect();
        for tuple in all_tuples(&sizes) {
            let bindings: Vec<_> = prefix
                .iter()
                .zip(&tuple)
                .map(|((v, s), &index)| (v.clone(), *s, Element { sort: *s, index }))
                .collect();
            if !evaluate_at(matrix, model, &bindings)? {
                witnesses.push(
                    bindings
                        .iter()
                        .map(|(_, _, e)| model.label(*e).to_string())
                        .collect(),
                );
            }
        }
    }

    let verdict = if let Some(failed) = results.iter().find(|r| !r.holds) {
        Verdict::PremiseFailure(failed.id.clone())
    } else if target_holds || witnesses.is_empty() {
        Verdict::TargetNotFalsified
    } else {
        Verdict::Confirmed
    };
    Ok(VerificationReport {
        model: model.name.clone(),
        premises: results,
        target: target_entry.id.to_string(),
        target_holds,
        witness_vars: prefix.into_iter().map(|(v, _)| v).collect(),
        witnesses,
        fidelity_flags: Vec::new(),
        verdict,
    })
}

/// [`verify`] on a corpus model, echoing its fidelity flags.
pub fn verify_corpus<S: AsRef<str>>(
    corpus: &CorpusModel,
    premises: &[S],
    target: &str,
) -> Result<VerificationReport, VerifyError> {
    let mut report = verify(&corpus.model, premises, target)?;
    report.fidelity_flags = corpus.fidelity_flags.clone();
    Ok(report)
}
