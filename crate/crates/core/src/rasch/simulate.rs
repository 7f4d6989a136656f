//! Seeded Bernoulli simulation of response matrices, the desk-scale surrogate
//! for an ensemble of QA systems answering generated questions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{sigmoid, AbilityParams, ItemParams, RaschError, ResponseMatrix};
use crate::seed::derive_stream;

/// Draws every (responder, item) cell as Bernoulli(prob_correct(theta, b)).
///
/// Responder and item order follow the sorted parameter maps. Each responder
/// gets its own derived RNG stream, so the output is identical for identical
/// seeds regardless of scheduling.
pub fn simulate_responses(
    abilities: &AbilityParams,
    items: &ItemParams,
    seed: u64,
) -> Result<ResponseMatrix, RaschError> {
    let responders: Vec<(&String, f64)> =
        abilities.ability.iter().map(|(id, &t)| (id, t)).collect();
    let item_list: Vec<(&String, f64)> = items.difficulty.iter().map(|(id, &b)| (id, b)).collect();
    for &(_, theta) in &responders {
        if !theta.is_finite() {
            return Err(RaschError::NonFinite { name: "theta", value: theta });
        }
    }
    for &(_, b) in &item_list {
        if !b.is_finite() {
            return Err(RaschError::NonFinite { name: "b", value: b });
        }
    }

    let rows: Vec<Vec<bool>> = responders
        .par_iter()
        .enumerate()
        .map(|(r, &(_, theta))| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_stream(seed, r as u64));
            item_list
                .iter()
                .map(|&(_, b)| rng.random::<f64>() < sigmoid(theta - b))
                .collect()
        })
        .collect();

    let mut matrix = ResponseMatrix::new(
        responders.iter().map(|(id, _)| (*id).clone()).collect(),
        item_list.iter().map(|(id, _)| (*id).clone()).collect(),
    )?;
    for (r, row) in rows.iter().enumerate() {
        for (i, &correct) in row.iter().enumerate() {
            let outcome = if correct {
                super::Outcome::Correct
            } else {
                super::Outcome::Incorrect
            };
            matrix
                .record(responders[r].0, item_list[i].0, outcome)
                .expect("fresh matrix cell");
        }
    }
    Ok(matrix)
}
