//! Rasch-model calibration.
//!
//! The Rasch model gives the probability that a responder of ability `theta`
//! answers an item of difficulty `b` correctly as `sigmoid(theta - b)`. This
//! module estimates item difficulties by marginal maximum likelihood
//! (Bock-Aitkin EM over a quadrature grid), responder abilities by
//! conditional maximum likelihood, and single-item difficulties given fixed
//! abilities, and simulates response matrices for recovery testing.

mod ability;
mod em;
mod matrix;
mod params;
mod quadrature;
mod simulate;

pub use ability::{estimate_abilities_mle, estimate_single_item_difficulty, SingleItemEstimate};
pub use em::{estimate_difficulties_mml, EmConfig};
pub use matrix::{Outcome, ResponseMatrix};
pub use params::{AbilityParams, ItemParams, ParameterSet};
pub use quadrature::QuadratureGrid;
pub use simulate::simulate_responses;

use thiserror::Error;

/// Difficulties and abilities are confined to `[-LOGIT_BOUND, LOGIT_BOUND]`.
/// Estimates that would diverge (all-correct columns and the like) clamp here
/// and are flagged instead of being dropped.
pub const LOGIT_BOUND: f64 = 6.0;

#[derive(Debug, Error)]
pub enum RaschError {
    #[error("non-finite {name}: {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("unknown responder id {0:?}")]
    UnknownResponder(String),
    #[error("unknown item id {0:?}")]
    UnknownItem(String),
    #[error("duplicate observation for responder {responder:?} on item {item:?}")]
    DuplicateObservation { responder: String, item: String },
    #[error("items with no scored responses: {}", ids.join(", "))]
    ItemsWithoutResponses { ids: Vec<String> },
    #[error("responders with no scored responses: {}", ids.join(", "))]
    RespondersWithoutResponses { ids: Vec<String> },
    #[error("no parameter for {kind} {id:?}")]
    MissingParameter { kind: &'static str, id: String },
    #[error("{kind} for {id:?} out of range: {value}")]
    OutOfRange { kind: &'static str, id: String, value: f64 },
    #[error("all responses missing")]
    AllMissing,
    #[error("invalid quadrature grid: {0}")]
    InvalidGrid(String),
    #[error("response csv line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("parameter json: {0}")]
    Json(#[from] serde_json::Error),
}

fn check_finite(name: &'static str, value: f64) -> Result<(), RaschError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(RaschError::NonFinite { name, value })
    }
}

/// Logistic sigmoid.
///
/// The negative branch is written as `1 - sigmoid(-z)` so that
/// `sigmoid(z) + sigmoid(-z) == 1.0` holds exactly in floating point
/// (the subtraction is exact by the Sterbenz lemma), which makes the
/// antisymmetry and Fisher-symmetry identities bit-level testable.
pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        1.0 - 1.0 / (1.0 + z.exp())
    }
}

/// log(sigmoid(z)), numerically stable for large |z|.
pub(crate) fn log_sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        -(-z).exp().ln_1p()
    } else {
        z - z.exp().ln_1p()
    }
}

/// Probability that a responder of ability `theta` answers an item of
/// difficulty `b` correctly: `sigmoid(theta - b)`.
pub fn prob_correct(theta: f64, b: f64) -> Result<f64, RaschError> {
    check_finite("theta", theta)?;
    check_finite("b", b)?;
    Ok(sigmoid(theta - b))
}

/// Fisher information of one item at ability `theta`: `P(1 - P)`.
///
/// Peaks at 0.25 when `theta == b`; symmetric about that point.
pub fn fisher_information(theta: f64, b: f64) -> Result<f64, RaschError> {
    let p = prob_correct(theta, b)?;
    Ok(p * (1.0 - p))
}

/// Joint log-likelihood of every scored cell in the matrix under the given
/// parameters. Missing cells contribute nothing.
pub fn joint_log_likelihood(
    matrix: &ResponseMatrix,
    abilities: &AbilityParams,
    items: &ItemParams,
) -> Result<f64, RaschError> {
    let thetas: Vec<f64> = matrix
        .responder_ids()
        .iter()
        .map(|id| match abilities.ability.get(id) {
            Some(&t) => {
                check_finite("theta", t)?;
                Ok(t)
            }
            // only an error if the responder actually has scored cells
            None => Ok(f64::NAN),
        })
        .collect::<Result<_, RaschError>>()?;
    let bs: Vec<f64> = matrix
        .item_ids()
        .iter()
        .map(|id| items.difficulty.get(id).copied().unwrap_or(f64::NAN))
        .collect();

    let mut total = 0.0;
    for (r, &theta) in thetas.iter().enumerate() {
        for (i, outcome) in matrix.responder_row(r) {
            if theta.is_nan() {
                return Err(RaschError::MissingParameter {
                    kind: "responder",
                    id: matrix.responder_ids()[r].clone(),
                });
            }
            let b = bs[i];
            if b.is_nan() {
                return Err(RaschError::MissingParameter {
                    kind: "item",
                    id: matrix.item_ids()[i].clone(),
                });
            }
            check_finite("b", b)?;
            let z = theta - b;
            total += match outcome {
                Outcome::Correct => log_sigmoid(z),
                Outcome::Incorrect => log_sigmoid(-z),
            };
        }
    }
    Ok(total)
}
