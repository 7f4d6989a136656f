//! Shared fixtures for the benchmark targets.

use dcqg_core::rasch::{simulate_responses, AbilityParams, ItemParams, ResponseMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// A simulated response matrix at the scale of the reference experiments:
/// `n_responders` abilities from N(0,1), `n_items` difficulties from
/// U(-3, 3).
pub fn recovery_matrix(n_responders: usize, n_items: usize, seed: u64) -> ResponseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let abilities = AbilityParams::from_abilities(
        (0..n_responders).map(|r| (format!("r{r:04}"), normal.sample(&mut rng))),
    );
    let items = ItemParams::from_difficulties(
        (0..n_items).map(|i| (format!("q{i:04}"), rng.random_range(-3.0..3.0))),
    );
    simulate_responses(&abilities, &items, seed ^ 0xbe9c).unwrap()
}
