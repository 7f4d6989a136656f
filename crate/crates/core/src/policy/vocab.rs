//! Token vocabularies for the toy policy.

use serde::{Deserialize, Serialize};

use super::{PolicyError, TokenId};

/// Ordered list of distinct token symbols containing exactly one
/// end-of-sequence marker.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenVocabulary {
    tokens: Vec<String>,
    eos: TokenId,
}

impl TokenVocabulary {
    pub fn new<S: Into<String>>(tokens: Vec<S>, eos_token: &str) -> Result<Self, PolicyError> {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        if tokens.len() < 2 {
            return Err(PolicyError::InvalidConfig(
                "vocabulary needs at least two tokens".into(),
            ));
        }
        let mut sorted = tokens.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(PolicyError::InvalidConfig("tokens must be distinct".into()));
        }
        let eos_positions: Vec<usize> = tokens
            .iter()
            .enumerate()
            .filter(|(_, t)| t.as_str() == eos_token)
            .map(|(i, _)| i)
            .collect();
        match eos_positions.as_slice() {
            [eos] => Ok(TokenVocabulary { tokens, eos: *eos }),
            _ => Err(PolicyError::InvalidConfig(format!(
                "end-of-sequence token {eos_token:?} must appear exactly once"
            ))),
        }
    }

    /// The default six-token toy vocabulary: five content tokens plus `</s>`.
    pub fn default_toy() -> Self {
        TokenVocabulary::new(vec!["a", "b", "c", "d", "e", "</s>"], "</s>")
            .expect("static vocabulary is valid")
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn eos(&self) -> TokenId {
        self.eos
    }

    pub fn token(&self, id: TokenId) -> &str {
        &self.tokens[id]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn id(&self, token: &str) -> Option<TokenId> {
        self.tokens.iter().position(|t| t == token)
    }

    /// Token ids in vocabulary order, end-of-sequence excluded.
    pub fn content_tokens(&self) -> impl Iterator<Item = TokenId> + '_ {
        (0..self.tokens.len()).filter(move |&id| id != self.eos)
    }

    /// Translates token symbols to ids; unknown symbols are an error.
    pub fn encode<S: AsRef<str>>(&self, symbols: &[S]) -> Result<Vec<TokenId>, PolicyError> {
        symbols
            .iter()
            .map(|s| {
                self.id(s.as_ref())
                    .ok_or_else(|| PolicyError::UnknownToken(s.as_ref().to_owned()))
            })
            .collect()
    }

    pub fn decode(&self, ids: &[TokenId]) -> Vec<String> {
        ids.iter().map(|&id| self.tokens[id].clone()).collect()
    }
}
