use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use super::formula::{Formula, Sort, Term};

/// Predicates are unary or binary, except the world-relative causal family
/// which needs three places.
pub const MAX_ARITY: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PredicateDecl {
    pub name: String,
    pub argument_sorts: Vec<Sort>,
}

impl PredicateDecl {
    pub fn new(name: &str, argument_sorts: &[Sort]) -> Self {
        PredicateDecl {
            name: name.to_string(),
            argument_sorts: argument_sorts.to_vec(),
        }
    }

    pub fn arity(&self) -> usize {
        self.argument_sorts.len()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SignatureError {
    #[error("predicate {0} declared twice")]
    Duplicate(String),
    #[error("predicate {name} has arity {arity}; arity must be between 1 and {MAX_ARITY}")]
    BadArity { name: String, arity: usize },
    #[error("extension would re-type predicate {0}")]
    Retyped(String),
}

/// An ordered, name-unique set of predicate declarations.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Signature {
    predicates: Vec<PredicateDecl>,
    #[serde(skip)]
    index: BTreeMap<String, usize>,
}

impl Signature {
    pub fn new(decls: impl IntoIterator<Item = PredicateDecl>) -> Result<Self, SignatureError> {
        let mut sig = Signature::default();
        for d in decls {
            sig.add(d)?;
        }
        Ok(sig)
    }

    fn add(&mut self, decl: PredicateDecl) -> Result<(), SignatureError> {
        if decl.arity() == 0 || decl.arity() > MAX_ARITY {
            return Err(SignatureError::BadArity {
                arity: decl.arity(),
                name: decl.name,
            });
        }
        if self.index.contains_key(&decl.name) {
            return Err(SignatureError::Duplicate(decl.name));
        }
        self.index.insert(decl.name.clone(), self.predicates.len());
        self.predicates.push(decl);
        Ok(())
    }

    /// Adds declarations on top of this signature. Existing predicates may be
    /// repeated with identical sorts but never re-typed or removed.
    pub fn extend(
        &self,
        decls: impl IntoIterator<Item = PredicateDecl>,
    ) -> Result<Self, SignatureError> {
        let mut sig = self.clone();
        for d in decls {
            match sig.get(&d.name) {
                Some(existing) if existing == &d => {}
                Some(_) => return Err(SignatureError::Retyped(d.name)),
                None => sig.add(d)?,
            }
        }
        Ok(sig)
    }

    pub fn get(&self, name: &str) -> Option<&PredicateDecl> {
        self.index.get(name).map(|&i| &self.predicates[i])
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn predicates(&self) -> &[PredicateDecl] {
        &self.predicates
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SortError {
    #[error("unknown predicate {0}")]
    UnknownPredicate(String),
    #[error("{name} expects {expected} argument{}, found {found} in `{node}`", if *expected == 1 { "" } else { "s" })]
    Arity {
        name: String,
        expected: usize,
        found: usize,
        node: String,
    },
    #[error(
        "{name} expects ({}) but `{node}` supplies ({})",
        join_sorts(expected),
        join_sorts(found)
    )]
    ArgumentSort {
        name: String,
        expected: Vec<Sort>,
        found: Vec<Sort>,
        node: String,
    },
    #[error("equality between different sorts in `{node}`: {lhs} vs {rhs}")]
    EqualitySort { node: String, lhs: Sort, rhs: Sort },
    #[error("variable {var} is not bound in `{node}`")]
    Unbound { var: String, node: String },
    #[error("variable {var} is bound twice on one path in `{node}`")]
    Rebound { var: String, node: String },
}

fn join_sorts(s: &[Sort]) -> String {
    s.iter().map(Sort::to_string).collect::<Vec<_>>().join(", ")
}

/// Checks arity and sorts of every predicate application and equality, and
/// that every variable is bound exactly once on each path. Free variables are
/// rejected: only closed formulas pass.
pub fn check_sorted(formula: &Formula, signature: &Signature) -> Result<(), SortError> {
    check_sorted_with(formula, signature, &[])
}

/// Like [`check_sorted`] but with some variables already in scope.
pub fn check_sorted_with(
    formula: &Formula,
    signature: &Signature,
    free: &[(String, Sort)],
) -> Result<(), SortError> {
    let mut scope: Vec<(String, Sort)> = free.to_vec();
    check_node(formula, signature, &mut scope)
}

fn term_sort(t: &Term, scope: &[(String, Sort)], node: &Formula) -> Result<Sort, SortError> {
    match t {
        Term::Const(e) => Ok(e.sort),
        Term::Var(v) => scope
            .iter()
            .rev()
            .find(|(name, _)| name == v)
            .map(|(_, s)| *s)
            .ok_or_else(|| SortError::Unbound {
                var: v.clone(),
                node: node.to_string(),
            }),
    }
}

fn check_node(
    f: &Formula,
    sig: &Signature,
    scope: &mut Vec<(String, Sort)>,
) -> Result<(), SortError> {
    match f {
        Formula::True | Formula::False => Ok(()),
        Formula::Pred(name, args) => {
            let decl = sig
                .get(name)
                .ok_or_else(|| SortError::UnknownPredicate(name.clone()))?;
            if decl.arity() != args.len() {
                return Err(SortError::Arity {
                    name: name.clone(),
                    expected: decl.arity(),
                    found: args.len(),
                    node: f.to_string(),
                });
            }
            let found = args
                .iter()
                .map(|t| term_sort(t, scope, f))
                .collect::<Result<Vec<_>, _>>()?;
            if found != decl.argument_sorts {
                return Err(SortError::ArgumentSort {
                    name: name.clone(),
                    expected: decl.argument_sorts.clone(),
                    found,
                    node: f.to_string(),
                });
            }
            Ok(())
        }
        Formula::Equal(a, b) => {
            let (lhs, rhs) = (term_sort(a, scope, f)?, term_sort(b, scope, f)?);
            if lhs != rhs {
                return Err(SortError::EqualitySort {
                    node: f.to_string(),
                    lhs,
                    rhs,
                });
            }
            Ok(())
        }
        Formula::Not(a) => check_node(a, sig, scope),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            check_node(a, sig, scope)?;
            check_node(b, sig, scope)
        }
        Formula::ForAll(v, s, body) | Formula::Exists(v, s, body) => {
            if scope.iter().any(|(name, _)| name == v) {
                return Err(SortError::Rebound {
                    var: v.clone(),
                    node: f.to_string(),
                });
            }
            scope.push((v.clone(), *s));
            let r = check_node(body, sig, scope);
            scope.pop();
            r
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new([
            PredicateDecl::new("p", &[Sort::Thing]),
            PredicateDecl::new("r", &[Sort::Thing, Sort::World]),
        ])
        .unwrap()
    }

    #[test]
    fn rejects_duplicates_and_bad_arity() {
        assert!(matches!(
            Signature::new([
                PredicateDecl::new("p", &[Sort::Thing]),
                PredicateDecl::new("p", &[Sort::Thing])
            ]),
            Err(SignatureError::Duplicate(_))
        ));
        assert!(matches!(
            Signature::new([PredicateDecl::new("q", &[])]),
            Err(SignatureError::BadArity { .. })
        ));
    }

    #[test]
    fn extension_adds_but_never_retypes() {
        let s = sig();
        let ext = s.extend([PredicateDecl::new("q", &[Sort::Thing])]).unwrap();
        assert!(ext.contains("q") && ext.contains("p"));
        assert_eq!(
            s.extend([PredicateDecl::new("p", &[Sort::World])]),
            Err(SignatureError::Retyped("p".into()))
        );
    }

    #[test]
    fn detects_unbound_and_rebound() {
        let s = sig();
        assert!(matches!(
            check_sorted(&Formula::pred("p", ["x"]), &s),
            Err(SortError::Unbound { .. })
        ));
        let f = Formula::forall(
            "x",
            Sort::Thing,
            Formula::forall("x", Sort::Thing, Formula::pred("p", ["x"])),
        );
        assert!(matches!(
            check_sorted(&f, &s),
            Err(SortError::Rebound { .. })
        ));
        // sibling scopes may reuse a name
        let g = Formula::and(
            Formula::forall("x", Sort::Thing, Formula::pred("p", ["x"])),
            Formula::exists("x", Sort::Thing, Formula::pred("p", ["x"])),
        );
        assert_eq!(check_sorted(&g, &s), Ok(()));
    }

    #[test]
    fn equality_must_be_same_sort() {
        let f = Formula::forall(
            "x",
            Sort::Thing,
            Formula::forall("w", Sort::World, Formula::eq("x", "w")),
        );
        assert!(matches!(
            check_sorted(&f, &sig()),
            Err(SortError::EqualitySort { .. })
        ));
    }
}
