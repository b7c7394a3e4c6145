//! Brute-force helpers shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use ethica_core::logic::{all_tuples, evaluate, Assignment, FiniteModel, Formula, Sort};
use ethica_core::registry::{axiom, axiom_set, ethica_signature};

/// Atoms of the given predicates on `things`/`worlds`, predicates in name
/// order, tuples in lexicographic order.
pub fn atoms(
    preds: &BTreeSet<String>,
    things: usize,
    worlds: usize,
) -> Vec<(String, Vec<Sort>, Vec<usize>)> {
    let sig = ethica_signature();
    let mut out = Vec::new();
    for p in preds {
        let sorts = sig
            .get(p)
            .expect("registry predicate")
            .argument_sorts
            .clone();
        let sizes: Vec<usize> = sorts
            .iter()
            .map(|s| match s {
                Sort::Thing => things,
                Sort::World => worlds,
            })
            .collect();
        for t in all_tuples(&sizes) {
            out.push((p.clone(), sorts.clone(), t));
        }
    }
    out
}

pub fn model_from_bits(
    atoms: &[(String, Vec<Sort>, Vec<usize>)],
    bits: &[bool],
    things: usize,
    worlds: usize,
) -> FiniteModel {
    let mut m = FiniteModel::with_sizes("oracle", things, worlds).unwrap();
    let mut preds: BTreeSet<&str> = BTreeSet::new();
    for (p, _, _) in atoms {
        preds.insert(p);
    }
    for p in preds {
        let sorts = &atoms.iter().find(|a| a.0 == p).unwrap().1;
        let tuples: Vec<Vec<usize>> = atoms
            .iter()
            .zip(bits)
            .filter(|((q, _, _), &b)| q == p && b)
            .map(|((_, _, t), _)| t.clone())
            .collect();
        m.set_table_indices(p, sorts, tuples).unwrap();
    }
    m
}

pub fn bits_of(model: &FiniteModel, atoms: &[(String, Vec<Sort>, Vec<usize>)]) -> Vec<bool> {
    atoms.iter().map(|(p, _, t)| model.holds(p, t)).collect()
}

pub fn query_formulas(premises: &[&str], target: &str) -> (Vec<Formula>, Formula) {
    let ps = axiom_set(premises)
        .unwrap()
        .iter()
        .map(|e| e.formula.clone())
        .collect();
    (ps, axiom(target).unwrap().formula.clone())
}

pub fn mentioned(premises: &[Formula], target: &Formula) -> BTreeSet<String> {
    premises
        .iter()
        .chain([target])
        .flat_map(|f| f.predicates())
        .collect()
}

/// The lexicographically least table assignment over the mentioned
/// predicates under which every premise holds and the target fails, found by
/// counting through all assignments in order.
pub fn least_countermodel(
    premises: &[&str],
    target: &str,
    things: usize,
    worlds: usize,
) -> Option<Vec<bool>> {
    let (ps, t) = query_formulas(premises, target);
    let atoms = atoms(&mentioned(&ps, &t), things, worlds);
    let n = atoms.len();
    assert!(n <= 20, "{n} atoms is too many to enumerate");
    for k in 0u64..(1 << n) {
        let bits: Vec<bool> = (0..n).map(|i| (k >> (n - 1 - i)) & 1 == 1).collect();
        let m = model_from_bits(&atoms, &bits, things, worlds);
        let asg = Assignment::new();
        if !evaluate(&t, &m, &asg).unwrap() && ps.iter().all(|p| evaluate(p, &m, &asg).unwrap()) {
            return Some(bits);
        }
    }
    None
}

pub fn atom_count(premises: &[&str], target: &str, things: usize, worlds: usize) -> usize {
    let (ps, t) = query_formulas(premises, target);
    atoms(&mentioned(&ps, &t), things, worlds).len()
}
