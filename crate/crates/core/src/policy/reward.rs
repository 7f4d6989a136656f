//! Difficulty-control reward: negative squared error between the specified
//! difficulty and the difficulty attached to a generated output.

use std::collections::HashMap;

use super::{PolicyError, TokenId};

/// The specified difficulty of a prompt plus a difficulty for every
/// enumerable output (the stand-in for re-estimating each generated
/// question's difficulty from responder data).
#[derive(Debug, Clone)]
pub struct RewardSpec {
    pub specified_difficulty: f64,
    output_difficulty: HashMap<Vec<TokenId>, f64>,
}

impl RewardSpec {
    pub fn new(specified_difficulty: f64) -> Self {
        RewardSpec { specified_difficulty, output_difficulty: HashMap::new() }
    }

    /// Builds a spec by assigning each output the difficulty `f` returns.
    pub fn from_fn<F>(specified_difficulty: f64, outputs: &[Vec<TokenId>], f: F) -> Self
    where
        F: Fn(&[TokenId]) -> f64,
    {
        let mut spec = RewardSpec::new(specified_difficulty);
        for y in outputs {
            spec.output_difficulty.insert(y.clone(), f(y));
        }
        spec
    }

    pub fn set_difficulty(&mut self, output: Vec<TokenId>, difficulty: f64) {
        self.output_difficulty.insert(output, difficulty);
    }

    pub fn difficulty(&self, output: &[TokenId]) -> Option<f64> {
        self.output_difficulty.get(output).copied()
    }
}

/// `-(b_specified - difficulty(y))^2`; zero only at an exact difficulty match.
pub fn squared_error_reward(spec: &RewardSpec, output: &[TokenId]) -> Result<f64, PolicyError> {
    let difficulty = spec
        .difficulty(output)
        .ok_or_else(|| PolicyError::MissingReward(format!("{output:?}")))?;
    Ok(-(spec.specified_difficulty - difficulty).powi(2))
}
