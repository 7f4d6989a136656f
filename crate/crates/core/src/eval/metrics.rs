//! Difficulty-control metrics: correct-rate curves, the theoretical Rasch
//! curve, per-question difficulty re-estimation, and MAE.

use std::collections::{BTreeMap, HashMap};

use super::{EvalError, GeneratedQuestion};
use crate::grid::Tenths;
use crate::rasch::{
    estimate_single_item_difficulty, prob_correct, AbilityParams, Outcome, ResponseMatrix,
    SingleItemEstimate,
};

/// Pooled correct rate of one specified-difficulty bin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinRate {
    pub rate: f64,
    pub observations: usize,
}

/// Correct rates per specified-difficulty bin. Bins whose questions have no
/// scored responses are omitted and listed in `empty_bins`.
#[derive(Debug, Clone, Default)]
pub struct CorrectRateCurve {
    pub points: BTreeMap<Tenths, BinRate>,
    pub empty_bins: Vec<Tenths>,
}

/// Pools correct/incorrect outcomes over questions and responders within
/// each specified-difficulty bin.
pub fn correct_rate_curve(
    matrix: &ResponseMatrix,
    questions: &[GeneratedQuestion],
) -> Result<CorrectRateCurve, EvalError> {
    if questions.is_empty() {
        return Err(EvalError::EmptyInput("questions"));
    }
    let bin_of: HashMap<&str, Tenths> = questions
        .iter()
        .map(|q| (q.question_id.as_str(), q.specified_difficulty))
        .collect();
    let mut correct: BTreeMap<Tenths, usize> = BTreeMap::new();
    let mut total: BTreeMap<Tenths, usize> = BTreeMap::new();
    for (i, item_id) in matrix.item_ids().iter().enumerate() {
        let Some(&bin) = bin_of.get(item_id.as_str()) else {
            continue;
        };
        for (_, outcome) in matrix.item_column(i) {
            *total.entry(bin).or_default() += 1;
            if outcome == Outcome::Correct {
                *correct.entry(bin).or_default() += 1;
            }
        }
    }
    let mut curve = CorrectRateCurve::default();
    let mut bins_requested: Vec<Tenths> = questions.iter().map(|q| q.specified_difficulty).collect();
    bins_requested.sort_unstable();
    bins_requested.dedup();
    for bin in bins_requested {
        match total.get(&bin) {
            Some(&n) if n > 0 => {
                let c = correct.get(&bin).copied().unwrap_or(0);
                curve
                    .points
                    .insert(bin, BinRate { rate: c as f64 / n as f64, observations: n });
            }
            _ => curve.empty_bins.push(bin),
        }
    }
    Ok(curve)
}

/// `prob_correct(theta_ref, b)` for each grid difficulty: the expected
/// correct rate of a reference responder, usually the panel's median.
pub fn theoretical_curve(theta_ref: f64, grid: &[f64]) -> Result<BTreeMap<Tenths, f64>, EvalError> {
    let mut curve = BTreeMap::new();
    for &b in grid {
        curve.insert(Tenths::from_logit(b), prob_correct(theta_ref, b)?);
    }
    Ok(curve)
}

/// Per-question difficulty estimates conditioned on fixed responder
/// abilities, plus the questions that could not be graded (no scored
/// responses).
#[derive(Debug, Clone, Default)]
pub struct DifficultyEstimates {
    pub estimates: BTreeMap<String, SingleItemEstimate>,
    pub dropped: Vec<(String, String)>,
}

/// Runs the single-item MLE for every item in the matrix. Abilities must be
/// known for every responder with scored cells.
pub fn estimate_generated_difficulties(
    matrix: &ResponseMatrix,
    responders: &AbilityParams,
) -> Result<DifficultyEstimates, EvalError> {
    let abilities: Vec<f64> = matrix
        .responder_ids()
        .iter()
        .map(|id| {
            responders.ability.get(id).copied().ok_or_else(|| {
                crate::rasch::RaschError::MissingParameter { kind: "responder", id: id.clone() }
            })
        })
        .collect::<Result<_, _>>()?;

    let mut out = DifficultyEstimates::default();
    for (i, item_id) in matrix.item_ids().iter().enumerate() {
        let mut responses: Vec<Option<Outcome>> = vec![None; matrix.n_responders()];
        for (r, outcome) in matrix.item_column(i) {
            responses[r] = Some(outcome);
        }
        match estimate_single_item_difficulty(&responses, &abilities) {
            Ok(estimate) => {
                out.estimates.insert(item_id.clone(), estimate);
            }
            Err(err) => out.dropped.push((item_id.clone(), err.to_string())),
        }
    }
    Ok(out)
}

/// Mean absolute error between specified and estimated difficulties.
pub fn mae_difficulty(pairs: &[(f64, f64)]) -> Result<f64, EvalError> {
    if pairs.is_empty() {
        return Err(EvalError::EmptyInput("difficulty pairs"));
    }
    Ok(pairs
        .iter()
        .map(|(specified, estimated)| (specified - estimated).abs())
        .sum::<f64>()
        / pairs.len() as f64)
}
