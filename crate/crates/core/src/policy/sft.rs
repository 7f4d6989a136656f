//! Supervised fine-tuning: mean negative log-likelihood and plain
//! gradient-descent training.

use super::{Grad, PolicyError, TokenId, ToyPolicy, TrainStep};

#[derive(Debug, Clone)]
pub struct SftConfig {
    pub learning_rate: f64,
    pub max_steps: usize,
    pub seed: u64,
}

impl Default for SftConfig {
    fn default() -> Self {
        SftConfig { learning_rate: 0.05, max_steps: 2000, seed: 0 }
    }
}

/// Mean of `-log pi(y | x)` over the batch; nonnegative.
pub fn sft_loss(
    policy: &ToyPolicy,
    batch: &[(usize, Vec<TokenId>)],
) -> Result<f64, PolicyError> {
    if batch.is_empty() {
        return Err(PolicyError::EmptyBatch);
    }
    let mut total = 0.0;
    for (condition, y) in batch {
        total -= policy.sequence_log_prob(*condition, y)?;
    }
    Ok(total / batch.len() as f64)
}

/// Exact gradient of [`sft_loss`] with respect to every logit.
pub fn sft_gradient(
    policy: &ToyPolicy,
    batch: &[(usize, Vec<TokenId>)],
) -> Result<Grad, PolicyError> {
    if batch.is_empty() {
        return Err(PolicyError::EmptyBatch);
    }
    let mut grad = policy.zero_grad();
    let weight = -1.0 / batch.len() as f64;
    for (condition, y) in batch {
        policy.accumulate_log_prob_grad(*condition, y, weight, &mut grad)?;
    }
    Ok(grad)
}

/// Full-batch gradient descent on the SFT loss. Returns the trained policy
/// and the per-step training log; the run is deterministic.
pub fn train_sft(
    policy: &ToyPolicy,
    dataset: &[(usize, Vec<TokenId>)],
    config: &SftConfig,
) -> Result<(ToyPolicy, Vec<TrainStep>), PolicyError> {
    if config.learning_rate <= 0.0 || !config.learning_rate.is_finite() {
        return Err(PolicyError::InvalidConfig(format!(
            "learning rate must be positive, got {}",
            config.learning_rate
        )));
    }
    let mut trained = policy.clone();
    let mut log = Vec::with_capacity(config.max_steps);
    for step in 0..config.max_steps {
        let loss = sft_loss(&trained, dataset)?;
        if !loss.is_finite() {
            return Err(PolicyError::TrainingDiverged { step });
        }
        log.push(TrainStep { step, loss, mean_margin: None });
        let grad = sft_gradient(&trained, dataset)?;
        trained.apply_gradient_step(&grad, config.learning_rate);
    }
    Ok((trained, log))
}
