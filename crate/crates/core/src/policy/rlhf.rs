//! The KL-regularized reward objective and its closed-form maximizer,
//! both computed by exact enumeration of the output space.

use super::{
    enumerate_outputs, squared_error_reward, PolicyError, RewardSpec, TokenId, ToyPolicy,
};

/// Hard cap on enumerable output spaces for the exact objectives.
pub const ENUMERATION_CAP: usize = 1_000_000;

/// An explicit distribution over the canonical output enumeration.
#[derive(Debug, Clone)]
pub struct OutputDistribution {
    pub outputs: Vec<Vec<TokenId>>,
    pub probabilities: Vec<f64>,
}

impl OutputDistribution {
    /// The policy's distribution for one conditioning id.
    pub fn of_policy(policy: &ToyPolicy, condition: usize) -> Result<Self, PolicyError> {
        let outputs = enumerate_outputs(policy.vocab(), policy.max_length(), ENUMERATION_CAP)?;
        let probabilities = policy.output_probabilities(condition, &outputs)?;
        Ok(OutputDistribution { outputs, probabilities })
    }

    /// Total-variation distance to another distribution over the same
    /// enumeration.
    pub fn total_variation(&self, other: &OutputDistribution) -> f64 {
        0.5 * self
            .probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(p, q)| (p - q).abs())
            .sum::<f64>()
    }
}

/// `E_pi[r] - beta * KL(pi || pi_ref)`, evaluated exactly for a policy.
pub fn rlhf_objective(
    policy: &ToyPolicy,
    ref_policy: &ToyPolicy,
    condition: usize,
    spec: &RewardSpec,
    beta: f64,
) -> Result<f64, PolicyError> {
    let dist = OutputDistribution::of_policy(policy, condition)?;
    let ref_dist = OutputDistribution::of_policy(ref_policy, condition)?;
    rlhf_objective_of_distribution(&dist, &ref_dist, spec, beta)
}

/// Same objective for an explicit distribution (e.g. the closed-form
/// optimum), which need not factor autoregressively.
pub fn rlhf_objective_of_distribution(
    dist: &OutputDistribution,
    ref_dist: &OutputDistribution,
    spec: &RewardSpec,
    beta: f64,
) -> Result<f64, PolicyError> {
    if dist.outputs.len() != ref_dist.outputs.len() {
        return Err(PolicyError::InvalidConfig(
            "distributions enumerate different output spaces".into(),
        ));
    }
    let mut expected_reward = 0.0;
    let mut kl = 0.0;
    for ((y, &p), &q) in dist
        .outputs
        .iter()
        .zip(&dist.probabilities)
        .zip(&ref_dist.probabilities)
    {
        if p == 0.0 {
            continue;
        }
        expected_reward += p * squared_error_reward(spec, y)?;
        kl += p * (p / q).ln();
    }
    Ok(expected_reward - beta * kl)
}

/// The analytic maximizer of the KL-regularized objective:
/// `pi*(y) proportional to pi_ref(y) * exp(r(y) / beta)`, normalized over the
/// enumeration. Serves as the verification oracle for training claims.
pub fn kl_regularized_optimum(
    ref_policy: &ToyPolicy,
    condition: usize,
    spec: &RewardSpec,
    beta: f64,
) -> Result<OutputDistribution, PolicyError> {
    if beta <= 0.0 || !beta.is_finite() {
        return Err(PolicyError::InvalidConfig(format!("beta must be positive, got {beta}")));
    }
    let outputs = enumerate_outputs(ref_policy.vocab(), ref_policy.max_length(), ENUMERATION_CAP)?;
    let mut log_weights = Vec::with_capacity(outputs.len());
    for y in &outputs {
        let log_ref = ref_policy.sequence_log_prob(condition, y)?;
        log_weights.push(log_ref + squared_error_reward(spec, y)? / beta);
    }
    let max = log_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut probabilities: Vec<f64> = log_weights.iter().map(|lw| (lw - max).exp()).collect();
    let total: f64 = probabilities.iter().sum();
    for p in &mut probabilities {
        *p /= total;
    }
    Ok(OutputDistribution { outputs, probabilities })
}
