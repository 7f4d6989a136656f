//! Training objectives over a small tabular autoregressive policy.
//!
//! The policy's output space is enumerable, so the SFT loss, the
//! KL-regularized reward objective, and the DPO loss can all be computed
//! exactly and cross-checked against closed forms; no sampling enters any
//! objective value.

mod checkpoint;
mod dpo;
mod model;
mod reward;
mod rlhf;
mod sft;
mod vocab;

pub use checkpoint::{load_checkpoint, save_checkpoint};
pub use dpo::{
    dpo_gradient, dpo_loss, dpo_margins, implicit_reward, train_dpo, DpoConfig,
    TokenPreferencePair,
};
pub use model::{enumerate_outputs, output_space_size, Grad, TokenId, ToyPolicy};
pub use reward::{squared_error_reward, RewardSpec};
pub use rlhf::{kl_regularized_optimum, rlhf_objective, rlhf_objective_of_distribution, OutputDistribution, ENUMERATION_CAP};
pub use sft::{sft_loss, train_sft, SftConfig};
pub use vocab::TokenVocabulary;

use std::io::Write;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("unknown token {0:?}")]
    UnknownToken(String),
    #[error("invalid sequence: {0}")]
    InvalidSequence(String),
    #[error("batch is empty")]
    EmptyBatch,
    #[error("output space holds {outputs} sequences, over the cap of {cap}")]
    CapacityExceeded { outputs: u128, cap: usize },
    #[error("training diverged at step {step}")]
    TrainingDiverged { step: usize },
    #[error("no difficulty entry for output {0:?}")]
    MissingReward(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown conditioning id {0}")]
    UnknownCondition(usize),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One training-log row. `mean_margin` is the mean DPO preference margin and
/// stays empty for SFT runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainStep {
    pub step: usize,
    pub loss: f64,
    pub mean_margin: Option<f64>,
}

/// Writes the `step,loss,mean_margin` training-log CSV.
pub fn write_training_log<W: Write>(writer: W, steps: &[TrainStep]) -> Result<(), PolicyError> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(["step", "loss", "mean_margin"])
        .map_err(|e| PolicyError::InvalidConfig(e.to_string()))?;
    for row in steps {
        csv.write_record([
            row.step.to_string(),
            format!("{:.12}", row.loss),
            row.mean_margin.map(|m| format!("{m:.12}")).unwrap_or_default(),
        ])
        .map_err(|e| PolicyError::InvalidConfig(e.to_string()))?;
    }
    csv.flush()?;
    Ok(())
}
