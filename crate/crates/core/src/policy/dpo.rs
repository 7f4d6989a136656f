//! Direct preference optimization over the toy policy: loss, exact analytic
//! gradient, margins, implicit reward, and gradient-descent training.

use super::{Grad, PolicyError, TokenId, ToyPolicy, TrainStep};

/// One preference pair on the token level: under conditioning `condition`,
/// `preferred` should beat `dispreferred`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenPreferencePair {
    pub condition: usize,
    pub preferred: Vec<TokenId>,
    pub dispreferred: Vec<TokenId>,
}

#[derive(Debug, Clone)]
pub struct DpoConfig {
    pub beta: f64,
    pub learning_rate: f64,
    pub max_steps: usize,
    pub seed: u64,
}

impl Default for DpoConfig {
    fn default() -> Self {
        DpoConfig { beta: 0.1, learning_rate: 0.05, max_steps: 2000, seed: 0 }
    }
}

impl DpoConfig {
    fn validate(&self) -> Result<(), PolicyError> {
        if self.beta <= 0.0 || !self.beta.is_finite() {
            return Err(PolicyError::InvalidConfig(format!(
                "beta must be positive, got {}",
                self.beta
            )));
        }
        if self.learning_rate <= 0.0 || !self.learning_rate.is_finite() {
            return Err(PolicyError::InvalidConfig(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

/// `beta * (log pi(y|x) - log pi_ref(y|x))`, DPO's implicit reward of one
/// output.
pub fn implicit_reward(
    policy: &ToyPolicy,
    ref_policy: &ToyPolicy,
    condition: usize,
    y: &[TokenId],
    beta: f64,
) -> Result<f64, PolicyError> {
    Ok(beta
        * (policy.sequence_log_prob(condition, y)? - ref_policy.sequence_log_prob(condition, y)?))
}

/// Per-pair preference margins `beta * (delta_w - delta_l)` where
/// `delta = log pi - log pi_ref`.
pub fn dpo_margins(
    policy: &ToyPolicy,
    ref_policy: &ToyPolicy,
    pairs: &[TokenPreferencePair],
    beta: f64,
) -> Result<Vec<f64>, PolicyError> {
    if pairs.is_empty() {
        return Err(PolicyError::EmptyBatch);
    }
    pairs
        .iter()
        .map(|pair| {
            let won = implicit_reward(policy, ref_policy, pair.condition, &pair.preferred, beta)?;
            let lost =
                implicit_reward(policy, ref_policy, pair.condition, &pair.dispreferred, beta)?;
            Ok(won - lost)
        })
        .collect()
}

/// Mean over pairs of `-log sigmoid(margin)`, computed as
/// `softplus(-margin)`; strictly positive, and exactly `ln 2` per pair when
/// the policy equals the reference or `beta` is zero.
pub fn dpo_loss(
    policy: &ToyPolicy,
    ref_policy: &ToyPolicy,
    pairs: &[TokenPreferencePair],
    beta: f64,
) -> Result<f64, PolicyError> {
    let margins = dpo_margins(policy, ref_policy, pairs, beta)?;
    Ok(margins.iter().map(|&m| softplus(-m)).sum::<f64>() / margins.len() as f64)
}

/// Exact gradient of [`dpo_loss`] with respect to every policy logit.
/// Logits untouched by any pair's sequences get exactly zero.
pub fn dpo_gradient(
    policy: &ToyPolicy,
    ref_policy: &ToyPolicy,
    pairs: &[TokenPreferencePair],
    beta: f64,
) -> Result<Grad, PolicyError> {
    if pairs.is_empty() {
        return Err(PolicyError::EmptyBatch);
    }
    let mut grad = policy.zero_grad();
    let scale = 1.0 / pairs.len() as f64;
    for pair in pairs {
        let won = implicit_reward(policy, ref_policy, pair.condition, &pair.preferred, beta)?;
        let lost = implicit_reward(policy, ref_policy, pair.condition, &pair.dispreferred, beta)?;
        let margin = won - lost;
        // d/dmargin of softplus(-margin) is -sigmoid(-margin)
        let coefficient = -scale * beta * stable_sigmoid(-margin);
        policy.accumulate_log_prob_grad(pair.condition, &pair.preferred, coefficient, &mut grad)?;
        policy.accumulate_log_prob_grad(
            pair.condition,
            &pair.dispreferred,
            -coefficient,
            &mut grad,
        )?;
    }
    Ok(grad)
}

/// Full-batch gradient descent on the DPO loss, starting from a policy that
/// should be initialized from the reference. Deterministic per config.
pub fn train_dpo(
    policy: &ToyPolicy,
    ref_policy: &ToyPolicy,
    pairs: &[TokenPreferencePair],
    config: &DpoConfig,
) -> Result<(ToyPolicy, Vec<TrainStep>), PolicyError> {
    config.validate()?;
    if pairs.is_empty() {
        return Err(PolicyError::EmptyBatch);
    }
    let mut trained = policy.clone();
    let mut log = Vec::with_capacity(config.max_steps);
    for step in 0..config.max_steps {
        let margins = dpo_margins(&trained, ref_policy, pairs, config.beta)?;
        let loss =
            margins.iter().map(|&m| softplus(-m)).sum::<f64>() / margins.len() as f64;
        if !loss.is_finite() {
            return Err(PolicyError::TrainingDiverged { step });
        }
        let mean_margin = margins.iter().sum::<f64>() / margins.len() as f64;
        log.push(TrainStep { step, loss, mean_margin: Some(mean_margin) });
        let grad = dpo_gradient(&trained, ref_policy, pairs, config.beta)?;
        trained.apply_gradient_step(&grad, config.learning_rate);
    }
    Ok((trained, log))
}

/// ln(1 + e^x) without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn stable_sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let t = z.exp();
        t / (1.0 + t)
    }
}
