//! Seeded pseudo-random models over the Ethica signature.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::logic::{all_tuples, FiniteModel};
use crate::registry::ethica_signature;

/// A model with `things` things and `worlds` worlds in which every tuple of
/// every predicate holds with probability `density`. Predicates over World
/// are left empty when `worlds` is zero.
pub fn random_model(
    rng: &mut impl Rng,
    name: &str,
    things: usize,
    worlds: usize,
    density: f64,
) -> FiniteModel {
    let mut m = FiniteModel::with_sizes(name, things, worlds).expect("things > 0");
    for decl in ethica_signature().predicates() {
        let sizes: Vec<usize> = decl.argument_sorts.iter().map(|&s| m.size(s)).collect();
        let tuples: Vec<Vec<usize>> = all_tuples(&sizes)
            .into_iter()
            .filter(|_| rng.gen_bool(density))
            .collect();
        m.set_table_indices(&decl.name, &decl.argument_sorts, tuples)
            .expect("tuples come from the model's own universes");
    }
    m
}

/// `count` models with sizes drawn uniformly from `1..=max_things` and
/// `0..=max_worlds`, reproducible from `seed`.
pub fn random_models(
    seed: u64,
    count: usize,
    max_things: usize,
    max_worlds: usize,
) -> Vec<FiniteModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let things = rng.gen_range(1..=max_things);
            let worlds = rng.gen_range(0..=max_worlds);
            let density = rng.gen_range(0.1..0.9);
            random_model(&mut rng, &format!("random{i}"), things, worlds, density)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_from_seed() {
        assert_eq!(random_models(3, 20, 4, 2), random_models(3, 20, 4, 2));
        assert_ne!(random_models(3, 20, 4, 2), random_models(4, 20, 4, 2));
    }

    #[test]
    fn models_validate() {
        for m in random_models(11, 50, 4, 2) {
            m.validate(ethica_signature()).unwrap();
            assert!((1..=4).contains(&m.things().len()));
        }
    }
}
