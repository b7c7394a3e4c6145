use itertools::Itertools;

use crate::logic::{all_tuples, FiniteModel, Sort};

/// The model's tables as one bit string: predicates in name order, tuples in
/// lexicographic order.
pub fn table_encoding(model: &FiniteModel) -> Vec<bool> {
    let mut bits = Vec::new();
    for (pred, table) in model.tables() {
        let sizes: Vec<usize> = table.sorts.iter().map(|&s| model.size(s)).collect();
        bits.extend(all_tuples(&sizes).iter().map(|t| model.holds(pred, t)));
    }
    bits
}

/// Every permutation of `0..n`, in lexicographic order.
pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    (0..n).permutations(n).collect()
}

/// The isomorphic copy of `model` whose table encoding is lexicographically
/// least. Labels stay in place; only the tables move.
///
/// Every permutation of each universe is tried, so this is meant for the
/// small models the workbench deals with.
pub fn canonical_form(model: &FiniteModel) -> FiniteModel {
    let thing_perms = permutations(model.size(Sort::Thing));
    let world_perms = permutations(model.size(Sort::World));
    let mut best = model.clone();
    let mut best_bits = table_encoding(model);
    for tp in &thing_perms {
        for wp in &world_perms {
            let candidate = model.permuted(tp, wp);
            let bits = table_encoding(&candidate);
            if bits < best_bits {
                best_bits = bits;
                best = candidate;
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::a12_counter_model;

    #[test]
    fn single_element_model_is_canonical() {
        let mut m = FiniteModel::with_sizes("m", 1, 0).unwrap();
        m.set_table_indices("p", &[Sort::Thing], [vec![0]]).unwrap();
        assert_eq!(canonical_form(&m), m);
    }

    #[test]
    fn swapped_substances_share_a_canonical_form() {
        let m = a12_counter_model().model;
        let swapped = m.permuted(&[1, 0, 2, 3], &[]);
        assert_ne!(swapped, m);
        assert_eq!(canonical_form(&swapped), canonical_form(&m));
    }
}
