//! The two published counter-models, a line-oriented model DSL, and a
//! verifier that checks a model against a premise set and a target.

mod dsl;
mod fixtures;
mod verify;

pub use dsl::{parse_model, parse_model_with, serialize_model, ParseError, ParseErrorKind};
pub use fixtures::{
    a12_counter_model, a15_counter_model, corpus_model, CorpusModel, FidelityFlag, CORPUS_NAMES,
};
pub use verify::{verify, verify_corpus, PremiseResult, Verdict, VerificationReport, VerifyError};
