//! Formulas, signatures, finite models, evaluation, and grounding.

pub mod eval;
pub mod formula;
pub mod ground;
pub mod model;
pub mod signature;

pub use eval::{evaluate, evaluate_at, Assignment, EvalError};
pub use formula::{Element, Formula, Sort, Term};
pub use ground::{
    evaluate_via_grounding, ground, Clause, GroundAtom, GroundConstraintSet, GroundError, Grounder,
    Lit, Skeleton,
};
pub use model::{all_tuples, FiniteModel, ModelError, Table};
pub use signature::{
    check_sorted, check_sorted_with, PredicateDecl, Signature, SignatureError, SortError,
};
