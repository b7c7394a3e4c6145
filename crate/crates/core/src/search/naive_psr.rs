use crate::logic::FiniteModel;

/// A subset of the thing universe holding of the first element of a pair
/// and not of the second.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discriminator {
    pub pair: (String, String),
    pub subset: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaivePsrReport {
    pub holds: bool,
    pub witnesses: Vec<Discriminator>,
}

impl NaivePsrReport {
    pub fn describe(&self) -> String {
        if self.witnesses.is_empty() {
            return "holds vacuously: no pair of distinct things".to_string();
        }
        self.witnesses
            .iter()
            .map(|d| format!("({}, {}): {{{}}}", d.pair.0, d.pair.1, d.subset.join(", ")))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// Evaluates `∀ x y, x ≠ y → ∃ φ ⊆ Thing, φ(x) ∧ ¬φ(y)` by searching the
/// subsets of the thing universe for each ordered pair, smallest subsets
/// first. The first subset found for `(x, y)` is always `{x}`.
pub fn check_naive_psr(model: &FiniteModel) -> NaivePsrReport {
    let n = model.things().len();
    let label = |i: usize| model.things()[i].clone();
    let mut witnesses = Vec::new();
    let mut holds = true;
    for x in 0..n {
        for y in (0..n).filter(|&y| y != x) {
            match subsets_by_size(n).find(|s| s.contains(&x) && !s.contains(&y)) {
                Some(s) => witnesses.push(Discriminator {
                    pair: (label(x), label(y)),
                    subset: s.into_iter().map(label).collect(),
                }),
                None => holds = false,
            }
        }
    }
    NaivePsrReport { holds, witnesses }
}

/// Subsets of `0..n` ordered by size, then lexicographically.
fn subsets_by_size(n: usize) -> impl Iterator<Item = Vec<usize>> {
    use itertools::Itertools;
    (0..=n).flat_map(move |k| (0..n).combinations(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::a12_counter_model;

    #[test]
    fn singleton_witness() {
        let r = check_naive_psr(&a12_counter_model().model);
        assert!(r.holds);
        assert_eq!(r.witnesses.len(), 12);
        assert_eq!(r.witnesses[0].pair, ("s1".to_string(), "s2".to_string()));
        assert_eq!(r.witnesses[0].subset, ["s1"]);
    }

    #[test]
    fn vacuous_on_one_element() {
        let r = check_naive_psr(&FiniteModel::with_sizes("m", 1, 0).unwrap());
        assert!(r.holds);
        assert!(r.witnesses.is_empty());
        assert!(r.describe().contains("vacuously"));
    }
}
