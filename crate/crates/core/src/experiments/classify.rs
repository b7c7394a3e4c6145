use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// The five outcomes a demote experiment can have.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum OutcomeClass {
    FullReduction,
    EqualStrengthTranslation,
    PartialReduction,
    DecompositionOnly,
    FullIrreducibility,
}

impl OutcomeClass {
    pub fn as_str(self) -> &'static str {
        match self {
            OutcomeClass::FullReduction => "FullReduction",
            OutcomeClass::EqualStrengthTranslation => "EqualStrengthTranslation",
            OutcomeClass::PartialReduction => "PartialReduction",
            OutcomeClass::DecompositionOnly => "DecompositionOnly",
            OutcomeClass::FullIrreducibility => "FullIrreducibility",
        }
    }
}

impl fmt::Display for OutcomeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The two results of a bounded entailment check, without the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VerdictKind {
    Refuted,
    NoCounterexample,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictKind::Refuted => "Refuted",
            VerdictKind::NoCounterexample => "NoCounterexample",
        })
    }
}

/// Verdicts gathered by one experiment.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Evidence {
    /// Σ against the target.
    pub forward: Option<VerdictKind>,
    /// The target against Σ.
    pub backward: Option<VerdictKind>,
    /// Σ against a restricted form of the target.
    pub auxiliary: Option<VerdictKind>,
    /// Each maximal proper subset of a multi-axiom Σ against the target.
    pub components: Vec<VerdictKind>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("insufficient evidence: {0}")]
    InsufficientEvidence(&'static str),
}

/// Assigns an outcome class from verdicts alone.
///
/// * forward refuted, restricted form not refuted: partial reduction
/// * forward refuted otherwise: full irreducibility against the tested Σ
/// * forward holds, every proper component refuted: decomposition only
/// * forward holds, backward holds or untested: equal-strength translation
/// * forward holds, backward refuted: full reduction
pub fn classify_outcome(e: &Evidence) -> Result<OutcomeClass, ClassifyError> {
    use VerdictKind::*;
    match e.forward {
        None => Err(ClassifyError::InsufficientEvidence("no forward verdict")),
        Some(Refuted) => Ok(match e.auxiliary {
            Some(NoCounterexample) => OutcomeClass::PartialReduction,
            _ => OutcomeClass::FullIrreducibility,
        }),
        Some(NoCounterexample) if !e.components.is_empty() => {
            if e.components.iter().all(|c| *c == Refuted) {
                Ok(OutcomeClass::DecompositionOnly)
            } else {
                Err(ClassifyError::InsufficientEvidence(
                    "a proper subset of Σ already suffices; test that subset instead",
                ))
            }
        }
        Some(NoCounterexample) => Ok(match e.backward {
            Some(Refuted) => OutcomeClass::FullReduction,
            Some(NoCounterexample) | None => OutcomeClass::EqualStrengthTranslation,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use VerdictKind::*;

    fn ev(forward: Option<VerdictKind>) -> Evidence {
        Evidence {
            forward,
            ..Default::default()
        }
    }

    #[test]
    fn five_outcomes() {
        let partial = Evidence {
            auxiliary: Some(NoCounterexample),
            ..ev(Some(Refuted))
        };
        assert_eq!(
            classify_outcome(&partial),
            Ok(OutcomeClass::PartialReduction)
        );
        assert_eq!(
            classify_outcome(&ev(Some(Refuted))),
            Ok(OutcomeClass::FullIrreducibility)
        );
        let aux_refuted = Evidence {
            auxiliary: Some(Refuted),
            ..ev(Some(Refuted))
        };
        assert_eq!(
            classify_outcome(&aux_refuted),
            Ok(OutcomeClass::FullIrreducibility)
        );
        let decomposition = Evidence {
            components: vec![Refuted, Refuted],
            ..ev(Some(NoCounterexample))
        };
        assert_eq!(
            classify_outcome(&decomposition),
            Ok(OutcomeClass::DecompositionOnly)
        );
        let equal = Evidence {
            backward: Some(NoCounterexample),
            ..ev(Some(NoCounterexample))
        };
        assert_eq!(
            classify_outcome(&equal),
            Ok(OutcomeClass::EqualStrengthTranslation)
        );
        let full = Evidence {
            backward: Some(Refuted),
            ..ev(Some(NoCounterexample))
        };
        assert_eq!(classify_outcome(&full), Ok(OutcomeClass::FullReduction));
    }

    #[test]
    fn insufficient_evidence() {
        assert!(classify_outcome(&ev(None)).is_err());
        let subset_suffices = Evidence {
            components: vec![Refuted, NoCounterexample],
            ..ev(Some(NoCounterexample))
        };
        assert!(classify_outcome(&subset_suffices).is_err());
    }

    #[test]
    fn untested_converse_stays_equal_strength() {
        assert_eq!(
            classify_outcome(&ev(Some(NoCounterexample))),
            Ok(OutcomeClass::EqualStrengthTranslation)
        );
    }
}
