use std::collections::{BTreeMap, BTreeSet};

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use super::formula::{Element, Sort};
use super::signature::Signature;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("the thing universe must be non-empty")]
    EmptyThings,
    #[error("duplicate {sort} label {label}")]
    DuplicateLabel { sort: Sort, label: String },
    #[error("unknown predicate {0}")]
    UnknownPredicate(String),
    #[error("predicate {pred}: tuple {tuple:?} has the wrong length (expected {expected})")]
    TupleArity {
        pred: String,
        tuple: Vec<String>,
        expected: usize,
    },
    #[error("predicate {pred}: {label} is not a {sort} of this model")]
    OutOfUniverse {
        pred: String,
        label: String,
        sort: Sort,
    },
    #[error("predicate {pred}: index {index} out of range for sort {sort}")]
    IndexOutOfRange {
        pred: String,
        index: usize,
        sort: Sort,
    },
    #[error("predicate {pred} is declared with sorts {declared:?} but the table has {found:?}")]
    TableSorts {
        pred: String,
        declared: Vec<Sort>,
        found: Vec<Sort>,
    },
}

/// The extension of one predicate: its argument sorts and the tuples (element
/// indices) on which it holds.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Table {
    pub sorts: Vec<Sort>,
    pub tuples: BTreeSet<Vec<usize>>,
}

/// A finite structure: one labelled universe per sort and a truth table per
/// predicate. Predicates without a table are false everywhere; empty tables
/// are never stored, so two models with the same extensions compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteModel {
    pub name: String,
    things: Vec<String>,
    worlds: Vec<String>,
    tables: BTreeMap<String, Table>,
}

impl FiniteModel {
    pub fn new(
        name: impl Into<String>,
        things: Vec<String>,
        worlds: Vec<String>,
    ) -> Result<Self, ModelError> {
        if things.is_empty() {
            return Err(ModelError::EmptyThings);
        }
        for (sort, labels) in [(Sort::Thing, &things), (Sort::World, &worlds)] {
            let mut seen = BTreeSet::new();
            for l in labels {
                if !seen.insert(l) {
                    return Err(ModelError::DuplicateLabel {
                        sort,
                        label: l.clone(),
                    });
                }
            }
        }
        Ok(FiniteModel {
            name: name.into(),
            things,
            worlds,
            tables: BTreeMap::new(),
        })
    }

    /// A model with generated labels `e0, e1, …` and `w0, w1, …`.
    pub fn with_sizes(
        name: impl Into<String>,
        things: usize,
        worlds: usize,
    ) -> Result<Self, ModelError> {
        FiniteModel::new(
            name,
            (0..things).map(|i| format!("e{i}")).collect(),
            (0..worlds).map(|i| format!("w{i}")).collect(),
        )
    }

    pub fn things(&self) -> &[String] {
        &self.things
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn universe(&self, sort: Sort) -> &[String] {
        match sort {
            Sort::Thing => &self.things,
            Sort::World => &self.worlds,
        }
    }

    pub fn size(&self, sort: Sort) -> usize {
        self.universe(sort).len()
    }

    pub fn label(&self, e: Element) -> &str {
        &self.universe(e.sort)[e.index]
    }

    pub fn element(&self, sort: Sort, label: &str) -> Option<Element> {
        self.universe(sort)
            .iter()
            .position(|l| l == label)
            .map(|index| Element { sort, index })
    }

    pub fn tables(&self) -> &BTreeMap<String, Table> {
        &self.tables
    }

    pub fn table(&self, pred: &str) -> Option<&Table> {
        self.tables.get(pred)
    }

    pub fn holds(&self, pred: &str, args: &[usize]) -> bool {
        self.tables
            .get(pred)
            .is_some_and(|t| t.tuples.contains(args))
    }

    /// Replaces the table of `pred` with tuples given by element index.
    pub fn set_table_indices(
        &mut self,
        pred: &str,
        sorts: &[Sort],
        tuples: impl IntoIterator<Item = Vec<usize>>,
    ) -> Result<(), ModelError> {
        let mut set = BTreeSet::new();
        for t in tuples {
            if t.len() != sorts.len() {
                return Err(ModelError::TupleArity {
                    pred: pred.to_string(),
                    tuple: t.iter().map(usize::to_string).collect(),
                    expected: sorts.len(),
                });
            }
            for (&i, &s) in t.iter().zip(sorts) {
                if i >= self.size(s) {
                    return Err(ModelError::IndexOutOfRange {
                        pred: pred.to_string(),
                        index: i,
                        sort: s,
                    });
                }
            }
            set.insert(t);
        }
        if set.is_empty() {
            self.tables.remove(pred);
        } else {
            self.tables.insert(
                pred.to_string(),
                Table {
                    sorts: sorts.to_vec(),
                    tuples: set,
                },
            );
        }
        Ok(())
    }

    /// Replaces the table of `pred` (declared in `sig`) with tuples given by label.
    pub fn set_table<I, T, S>(
        &mut self,
        sig: &Signature,
        pred: &str,
        tuples: I,
    ) -> Result<(), ModelError>
    where
        I: IntoIterator<Item = T>,
        T: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let decl = sig
            .get(pred)
            .ok_or_else(|| ModelError::UnknownPredicate(pred.to_string()))?;
        let mut idx_tuples = Vec::new();
        for t in tuples {
            let labels: Vec<String> = t.into_iter().map(|s| s.as_ref().to_string()).collect();
            if labels.len() != decl.arity() {
                return Err(ModelError::TupleArity {
                    pred: pred.to_string(),
                    tuple: labels,
                    expected: decl.arity(),
                });
            }
            let idx = labels
                .iter()
                .zip(&decl.argument_sorts)
                .map(|(l, &s)| {
                    self.element(s, l)
                        .map(|e| e.index)
                        .ok_or_else(|| ModelError::OutOfUniverse {
                            pred: pred.to_string(),
                            label: l.clone(),
                            sort: s,
                        })
                })
                .collect::<Result<Vec<_>, _>>()?;
            idx_tuples.push(idx);
        }
        self.set_table_indices(pred, &decl.argument_sorts, idx_tuples)
    }

    /// Makes `pred` true on every tuple of its argument sorts.
    pub fn set_full_table(&mut self, sig: &Signature, pred: &str) -> Result<(), ModelError> {
        let decl = sig
            .get(pred)
            .ok_or_else(|| ModelError::UnknownPredicate(pred.to_string()))?;
        let sorts = decl.argument_sorts.clone();
        let all = all_tuples(&sorts.iter().map(|&s| self.size(s)).collect::<Vec<_>>());
        self.set_table_indices(pred, &sorts, all)
    }

    /// True when `pred`'s table contains every tuple of its sorts.
    pub fn is_full(&self, pred: &str) -> bool {
        self.tables.get(pred).is_some_and(|t| {
            let total: usize = t.sorts.iter().map(|&s| self.size(s)).product();
            t.tuples.len() == total
        })
    }

    /// Checks every table against the declarations of `sig`.
    pub fn validate(&self, sig: &Signature) -> Result<(), ModelError> {
        for (name, table) in &self.tables {
            let decl = sig
                .get(name)
                .ok_or_else(|| ModelError::UnknownPredicate(name.clone()))?;
            if decl.argument_sorts != table.sorts {
                return Err(ModelError::TableSorts {
                    pred: name.clone(),
                    declared: decl.argument_sorts.clone(),
                    found: table.sorts.clone(),
                });
            }
        }
        Ok(())
    }

    /// Returns a copy with the universes relabelled positionally; tables are untouched.
    pub fn relabelled(&self, things: Vec<String>, worlds: Vec<String>) -> Result<Self, ModelError> {
        assert_eq!(things.len(), self.things.len());
        assert_eq!(worlds.len(), self.worlds.len());
        let mut m = FiniteModel::new(self.name.clone(), things, worlds)?;
        m.tables = self.tables.clone();
        Ok(m)
    }

    /// Applies element permutations: element `i` of a sort becomes element `perm[i]`.
    pub fn permuted(&self, thing_perm: &[usize], world_perm: &[usize]) -> FiniteModel {
        let map = |s: Sort, i: usize| match s {
            Sort::Thing => thing_perm[i],
            Sort::World => world_perm[i],
        };
        let mut out = self.clone();
        for table in out.tables.values_mut() {
            table.tuples = table
                .tuples
                .iter()
                .map(|t| {
                    t.iter()
                        .zip(&table.sorts)
                        .map(|(&i, &s)| map(s, i))
                        .collect()
                })
                .collect();
        }
        out
    }

    /// Tuples of `pred` rendered with element labels, in universe order.
    pub fn labelled_tuples(&self, pred: &str) -> Vec<Vec<&str>> {
        self.tables
            .get(pred)
            .map(|t| {
                t.tuples
                    .iter()
                    .map(|tuple| {
                        tuple
                            .iter()
                            .zip(&t.sorts)
                            .map(|(&i, &s)| self.universe(s)[i].as_str())
                            .collect()
                    })
                    .collect()
            })
            .unwrap_or_default()
    }
}

impl Serialize for FiniteModel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        struct Tables<'a>(&'a FiniteModel);
        impl Serialize for Tables<'_> {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                let mut map = serializer.serialize_map(Some(self.0.tables.len()))?;
                for name in self.0.tables.keys() {
                    map.serialize_entry(name, &self.0.labelled_tuples(name))?;
                }
                map.end()
            }
        }
        let mut map = serializer.serialize_map(Some(4))?;
        map.serialize_entry("name", &self.name)?;
        map.serialize_entry("things", &self.things)?;
        map.serialize_entry("worlds", &self.worlds)?;
        map.serialize_entry("tables", &Tables(self))?;
        map.end()
    }
}

/// Every index tuple over the given per-position universe sizes, in
/// lexicographic order.
pub fn all_tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &n in sizes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..n).map(move |i| {
                    let mut t = prefix.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::signature::PredicateDecl;

    fn sig() -> Signature {
        Signature::new([
            PredicateDecl::new("p", &[Sort::Thing]),
            PredicateDecl::new("r", &[Sort::Thing, Sort::World]),
        ])
        .unwrap()
    }

    #[test]
    fn universes_are_validated() {
        assert_eq!(
            FiniteModel::new("m", vec![], vec![]),
            Err(ModelError::EmptyThings)
        );
        assert!(matches!(
            FiniteModel::new("m", vec!["a".into(), "a".into()], vec![]),
            Err(ModelError::DuplicateLabel { .. })
        ));
        // the same label may name a thing and a world
        assert!(FiniteModel::new("m", vec!["a".into()], vec!["a".into()]).is_ok());
    }

    #[test]
    fn tables_reject_out_of_universe_labels() {
        let mut m = FiniteModel::new("m", vec!["a".into()], vec!["w".into()]).unwrap();
        assert!(matches!(
            m.set_table(&sig(), "r", [["a", "a"]]),
            Err(ModelError::OutOfUniverse { .. })
        ));
        m.set_table(&sig(), "r", [["a", "w"]]).unwrap();
        assert!(m.holds("r", &[0, 0]));
        assert!(!m.holds("p", &[0]));
    }

    #[test]
    fn empty_tables_are_not_stored() {
        let mut m = FiniteModel::with_sizes("m", 2, 0).unwrap();
        m.set_table(&sig(), "p", Vec::<Vec<&str>>::new()).unwrap();
        assert!(m.tables().is_empty());
        assert_eq!(m, FiniteModel::with_sizes("m", 2, 0).unwrap());
    }

    #[test]
    fn all_tuples_is_lexicographic() {
        assert_eq!(
            all_tuples(&[2, 2]),
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]
        );
        assert_eq!(all_tuples(&[]), vec![Vec::<usize>::new()]);
    }
}
