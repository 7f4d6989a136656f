//! The tabular autoregressive policy and its exact output-space enumeration.

use std::collections::HashMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rand::SeedableRng;

use super::{PolicyError, TokenVocabulary};

/// Index into a [`TokenVocabulary`].
pub type TokenId = usize;

/// Gradient (or any other tangent) with the same shape as the logit table:
/// `[condition][state][token]`.
pub type Grad = Vec<Vec<Vec<f64>>>;

/// A tabular autoregressive distribution over token sequences.
///
/// Each conditioning id (one per prompt class) owns an independent logit
/// table. The generation state is the window of the last `context_order`
/// content tokens; sequences end at the end-of-sequence token or are
/// truncated at `max_length`, so the sequence probabilities sum to one over
/// the enumerable output space.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyPolicy {
    vocab: TokenVocabulary,
    context_order: usize,
    max_length: usize,
    states: Vec<Vec<TokenId>>,
    state_index: HashMap<Vec<TokenId>, usize>,
    // [condition][state][token]
    logits: Vec<Vec<Vec<f64>>>,
}

impl ToyPolicy {
    /// Uniform policy (all logits zero).
    pub fn uniform(
        vocab: TokenVocabulary,
        context_order: usize,
        max_length: usize,
        n_conditions: usize,
    ) -> Result<Self, PolicyError> {
        if max_length == 0 {
            return Err(PolicyError::InvalidConfig("max_length must be positive".into()));
        }
        if n_conditions == 0 {
            return Err(PolicyError::InvalidConfig("need at least one conditioning id".into()));
        }
        let states = enumerate_states(&vocab, context_order, max_length);
        let state_index = states
            .iter()
            .enumerate()
            .map(|(idx, s)| (s.clone(), idx))
            .collect();
        let logits = vec![vec![vec![0.0; vocab.len()]; states.len()]; n_conditions];
        Ok(ToyPolicy { vocab, context_order, max_length, states, state_index, logits })
    }

    /// The default verification policy: six tokens, order-1 context,
    /// max length four, one conditioning id per requested prompt class.
    pub fn default_toy(n_conditions: usize) -> Self {
        ToyPolicy::uniform(TokenVocabulary::default_toy(), 1, 4, n_conditions)
            .expect("static configuration is valid")
    }

    /// Policy with logits drawn i.i.d. from `Normal(0, scale)`, seeded.
    pub fn seeded_random(
        vocab: TokenVocabulary,
        context_order: usize,
        max_length: usize,
        n_conditions: usize,
        scale: f64,
        seed: u64,
    ) -> Result<Self, PolicyError> {
        let mut policy = ToyPolicy::uniform(vocab, context_order, max_length, n_conditions)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, scale)
            .map_err(|e| PolicyError::InvalidConfig(e.to_string()))?;
        for table in &mut policy.logits {
            for row in table {
                for logit in row {
                    *logit = normal.sample(&mut rng);
                }
            }
        }
        Ok(policy)
    }

    pub fn vocab(&self) -> &TokenVocabulary {
        &self.vocab
    }

    pub fn context_order(&self) -> usize {
        self.context_order
    }

    pub fn max_length(&self) -> usize {
        self.max_length
    }

    pub fn n_conditions(&self) -> usize {
        self.logits.len()
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    /// Context windows in canonical state order (by length, then token ids).
    pub fn states(&self) -> &[Vec<TokenId>] {
        &self.states
    }

    pub fn logit(&self, condition: usize, state: usize, token: TokenId) -> f64 {
        self.logits[condition][state][token]
    }

    pub fn set_logit(
        &mut self,
        condition: usize,
        state: usize,
        token: TokenId,
        value: f64,
    ) -> Result<(), PolicyError> {
        if !value.is_finite() {
            return Err(PolicyError::InvalidConfig(format!("non-finite logit {value}")));
        }
        self.logits[condition][state][token] = value;
        Ok(())
    }

    pub(crate) fn tables(&self) -> &[Vec<Vec<f64>>] {
        &self.logits
    }

    pub(crate) fn from_parts(
        vocab: TokenVocabulary,
        context_order: usize,
        max_length: usize,
        logits: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self, PolicyError> {
        let template = ToyPolicy::uniform(vocab, context_order, max_length, logits.len())?;
        for table in &logits {
            if table.len() != template.states.len()
                || table.iter().any(|row| row.len() != template.vocab.len())
            {
                return Err(PolicyError::InvalidConfig("logit table shape mismatch".into()));
            }
            if table.iter().flatten().any(|l| !l.is_finite()) {
                return Err(PolicyError::InvalidConfig("non-finite logit".into()));
            }
        }
        Ok(ToyPolicy { logits, ..template })
    }

    pub fn zero_grad(&self) -> Grad {
        vec![vec![vec![0.0; self.vocab.len()]; self.states.len()]; self.logits.len()]
    }

    pub(crate) fn apply_gradient_step(&mut self, grad: &Grad, learning_rate: f64) {
        for (table, gtable) in self.logits.iter_mut().zip(grad) {
            for (row, grow) in table.iter_mut().zip(gtable) {
                for (logit, g) in row.iter_mut().zip(grow) {
                    *logit -= learning_rate * g;
                }
            }
        }
    }

    fn check_condition(&self, condition: usize) -> Result<(), PolicyError> {
        if condition >= self.logits.len() {
            return Err(PolicyError::UnknownCondition(condition));
        }
        Ok(())
    }

    /// Validates that `y` is a complete sequence: tokens in range, the
    /// end-of-sequence marker only terminal, and either EOS-terminated or
    /// exactly `max_length` long.
    fn check_sequence(&self, y: &[TokenId]) -> Result<(), PolicyError> {
        if y.is_empty() {
            return Err(PolicyError::InvalidSequence("empty sequence".into()));
        }
        if y.len() > self.max_length {
            return Err(PolicyError::InvalidSequence(format!(
                "length {} exceeds max_length {}",
                y.len(),
                self.max_length
            )));
        }
        for &t in y {
            if t >= self.vocab.len() {
                return Err(PolicyError::UnknownToken(format!("#{t}")));
            }
        }
        let eos = self.vocab.eos();
        if let Some(pos) = y.iter().position(|&t| t == eos) {
            if pos + 1 != y.len() {
                return Err(PolicyError::InvalidSequence(
                    "end-of-sequence before the end".into(),
                ));
            }
        } else if y.len() != self.max_length {
            return Err(PolicyError::InvalidSequence(format!(
                "unterminated sequence of length {} (max_length {})",
                y.len(),
                self.max_length
            )));
        }
        Ok(())
    }

    fn log_softmax_row(&self, condition: usize, state: usize) -> Vec<f64> {
        let row = &self.logits[condition][state];
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + row.iter().map(|&l| (l - max).exp()).sum::<f64>().ln();
        row.iter().map(|&l| l - lse).collect()
    }

    fn softmax_row(&self, condition: usize, state: usize) -> Vec<f64> {
        self.log_softmax_row(condition, state)
            .into_iter()
            .map(f64::exp)
            .collect()
    }

    /// Sum of per-step log-softmax values along `y`; always <= 0.
    pub fn sequence_log_prob(&self, condition: usize, y: &[TokenId]) -> Result<f64, PolicyError> {
        self.check_condition(condition)?;
        self.check_sequence(y)?;
        let mut window: Vec<TokenId> = Vec::with_capacity(self.context_order);
        let mut lp = 0.0;
        for &t in y {
            let state = self.state_index[&window];
            lp += self.log_softmax_row(condition, state)[t];
            if t != self.vocab.eos() {
                push_window(&mut window, t, self.context_order);
            }
        }
        Ok(lp)
    }

    /// Adds `weight * d log pi(y)/d logits` into `grad`.
    pub fn accumulate_log_prob_grad(
        &self,
        condition: usize,
        y: &[TokenId],
        weight: f64,
        grad: &mut Grad,
    ) -> Result<(), PolicyError> {
        self.check_condition(condition)?;
        self.check_sequence(y)?;
        let mut window: Vec<TokenId> = Vec::with_capacity(self.context_order);
        for &t in y {
            let state = self.state_index[&window];
            let probs = self.softmax_row(condition, state);
            let row = &mut grad[condition][state];
            for (v, &p) in probs.iter().enumerate() {
                row[v] -= weight * p;
            }
            row[t] += weight;
            if t != self.vocab.eos() {
                push_window(&mut window, t, self.context_order);
            }
        }
        Ok(())
    }

    /// Probability of each output in `outputs` (normally the canonical
    /// enumeration) under this policy.
    pub fn output_probabilities(
        &self,
        condition: usize,
        outputs: &[Vec<TokenId>],
    ) -> Result<Vec<f64>, PolicyError> {
        outputs
            .iter()
            .map(|y| self.sequence_log_prob(condition, y).map(f64::exp))
            .collect()
    }

    /// Draws one complete sequence.
    pub fn sample<R: Rng>(&self, condition: usize, rng: &mut R) -> Result<Vec<TokenId>, PolicyError> {
        self.check_condition(condition)?;
        let mut window: Vec<TokenId> = Vec::new();
        let mut y = Vec::new();
        loop {
            let state = self.state_index[&window];
            let probs = self.softmax_row(condition, state);
            let mut u: f64 = rng.random();
            let mut tok = self.vocab.len() - 1;
            for (v, &p) in probs.iter().enumerate() {
                if u < p {
                    tok = v;
                    break;
                }
                u -= p;
            }
            y.push(tok);
            if tok == self.vocab.eos() || y.len() == self.max_length {
                return Ok(y);
            }
            push_window(&mut window, tok, self.context_order);
        }
    }
}

fn push_window(window: &mut Vec<TokenId>, token: TokenId, context_order: usize) {
    if context_order == 0 {
        return;
    }
    window.push(token);
    if window.len() > context_order {
        window.remove(0);
    }
}

/// Number of complete sequences for a vocabulary size and maximum length.
pub fn output_space_size(vocab_size: usize, max_length: usize) -> u128 {
    let content = (vocab_size - 1) as u128;
    let mut eos_terminated = 0u128;
    let mut pow = 1u128;
    for _ in 0..max_length {
        eos_terminated = eos_terminated.saturating_add(pow);
        pow = pow.saturating_mul(content);
    }
    eos_terminated.saturating_add(pow)
}

/// All complete sequences in canonical depth-first order (token-id order at
/// each position). Errors when the space exceeds `cap`.
pub fn enumerate_outputs(
    vocab: &TokenVocabulary,
    max_length: usize,
    cap: usize,
) -> Result<Vec<Vec<TokenId>>, PolicyError> {
    let size = output_space_size(vocab.len(), max_length);
    if size > cap as u128 {
        return Err(PolicyError::CapacityExceeded { outputs: size, cap });
    }
    let mut outputs = Vec::with_capacity(size as usize);
    let mut prefix = Vec::new();
    walk(vocab, max_length, &mut prefix, &mut outputs);
    Ok(outputs)
}

fn walk(
    vocab: &TokenVocabulary,
    max_length: usize,
    prefix: &mut Vec<TokenId>,
    outputs: &mut Vec<Vec<TokenId>>,
) {
    for t in 0..vocab.len() {
        if t == vocab.eos() || prefix.len() + 1 == max_length {
            let mut y = prefix.clone();
            y.push(t);
            outputs.push(y);
        } else {
            prefix.push(t);
            walk(vocab, max_length, prefix, outputs);
            prefix.pop();
        }
    }
}

/// Context windows reachable at any generation step, in canonical order:
/// shorter windows first, token-id lexicographic within a length.
fn enumerate_states(
    vocab: &TokenVocabulary,
    context_order: usize,
    max_length: usize,
) -> Vec<Vec<TokenId>> {
    let max_window = context_order.min(max_length.saturating_sub(1));
    let content: Vec<TokenId> = vocab.content_tokens().collect();
    let mut states: Vec<Vec<TokenId>> = vec![Vec::new()];
    let mut frontier: Vec<Vec<TokenId>> = vec![Vec::new()];
    for _ in 0..max_window {
        let mut next = Vec::new();
        for window in &frontier {
            for &t in &content {
                let mut grown = window.clone();
                grown.push(t);
                next.push(grown);
            }
        }
        states.extend(next.iter().cloned());
        frontier = next;
    }
    states
}
