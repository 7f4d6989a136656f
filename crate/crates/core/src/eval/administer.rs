//! Administering generated questions to simulated Rasch responders.

use super::{EvalError, GeneratedQuestion};
use crate::rasch::{simulate_responses, AbilityParams, ItemParams, ResponseMatrix};

/// Simulates every responder answering every question, drawing outcomes from
/// the Rasch probability at each question's latent difficulty.
///
/// This is the simulation-mode stand-in for collecting real responses; real
/// response matrices enter the pipeline through the CSV format instead and
/// skip this call.
pub fn administer(
    questions: &[GeneratedQuestion],
    responders: &AbilityParams,
    seed: u64,
) -> Result<ResponseMatrix, EvalError> {
    if questions.is_empty() {
        return Err(EvalError::EmptyInput("questions"));
    }
    let mut items = ItemParams::default();
    for question in questions {
        let latent = question
            .latent_difficulty
            .ok_or_else(|| EvalError::MissingLatentDifficulty(question.question_id.clone()))?;
        items.difficulty.insert(question.question_id.clone(), latent);
    }
    Ok(simulate_responses(responders, &items, seed)?)
}
