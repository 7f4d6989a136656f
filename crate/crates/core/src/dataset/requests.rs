//! Generation requests: one rendered prompt per (passage, grid difficulty).

use std::collections::HashSet;
use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use super::{render_generation_prompt, DatasetError, QuestionRecord};
use crate::grid::{difficulty_grid, Tenths};

/// A prompt asking for a question at one specified difficulty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationRequest {
    pub passage_id: String,
    #[serde(with = "tenths_as_logit")]
    pub specified_difficulty: Tenths,
    pub prompt: String,
}

mod tenths_as_logit {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::grid::Tenths;

    pub fn serialize<S: Serializer>(value: &Tenths, serializer: S) -> Result<S::Ok, S::Error> {
        value.to_logit().serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Tenths, D::Error> {
        Ok(Tenths::from_logit(f64::deserialize(deserializer)?))
    }
}

/// Crosses the distinct passages of a corpus (first-appearance order,
/// optionally capped at `max_passages`) with the inclusive difficulty grid.
/// A 300-passage corpus on the -3.0..3.0 step-0.1 grid yields 18300 requests.
pub fn build_generation_requests(
    records: &[QuestionRecord],
    max_passages: Option<usize>,
    min: f64,
    max: f64,
    step: f64,
) -> Result<Vec<GenerationRequest>, DatasetError> {
    let grid = difficulty_grid(min, max, step)?;
    let mut seen = HashSet::new();
    let mut passages: Vec<(&str, &str)> = Vec::new();
    for record in records {
        if seen.insert(record.passage_id.as_str()) {
            passages.push((record.passage_id.as_str(), record.passage.as_str()));
        }
    }
    if let Some(cap) = max_passages {
        passages.truncate(cap);
    }
    Ok(passages
        .iter()
        .flat_map(|&(passage_id, passage)| {
            grid.iter().map(move |&b| GenerationRequest {
                passage_id: passage_id.to_owned(),
                specified_difficulty: Tenths::from_logit(b),
                prompt: render_generation_prompt(passage, b),
            })
        })
        .collect())
}

pub fn write_requests_jsonl<W: Write>(
    mut writer: W,
    requests: &[GenerationRequest],
) -> Result<(), DatasetError> {
    for request in requests {
        serde_json::to_writer(&mut writer, request)
            .map_err(|e| DatasetError::Jsonl { line: 0, message: e.to_string() })?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_requests_jsonl<R: Read>(reader: R) -> Result<Vec<GenerationRequest>, DatasetError> {
    let mut requests = Vec::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        requests.push(serde_json::from_str(&line).map_err(|e| DatasetError::Jsonl {
            line: idx as u64 + 1,
            message: e.to_string(),
        })?);
    }
    Ok(requests)
}
