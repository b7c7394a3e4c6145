//! A finite-model workbench for the formalized register of *Ethica* Pars I.
//!
//! The crate evaluates first-order axioms over finite two-sorted models,
//! verifies hand-built counter-models, searches for counter-models up to a
//! size bound, and classifies demote experiments by their outcome.

pub mod corpus;
pub mod experiments;
pub mod logic;
pub mod random;
pub mod registry;
pub mod search;
