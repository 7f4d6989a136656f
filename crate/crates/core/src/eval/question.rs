//! Generated questions and their JSONL format.

use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::dataset::{parse_model_output, ParsedOutput};
use crate::grid::Tenths;

/// One model generation for a (passage, specified difficulty) request.
///
/// `latent_difficulty` is known only for simulated generators and drives
/// [`super::administer`]; real generations leave it absent and are graded
/// from an externally collected response matrix instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratedQuestion {
    pub question_id: String,
    pub passage_id: String,
    #[serde(with = "tenths_as_logit")]
    pub specified_difficulty: Tenths,
    pub passage: String,
    pub output: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub latent_difficulty: Option<f64>,
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

impl GeneratedQuestion {
    /// The answer/question/distractor fields, present exactly when the raw
    /// output parses.
    pub fn parsed(&self) -> Option<ParsedOutput> {
        parse_model_output(&self.output).ok()
    }
}

pub fn write_questions_jsonl<W: Write>(
    mut writer: W,
    questions: &[GeneratedQuestion],
) -> Result<(), EvalError> {
    for question in questions {
        serde_json::to_writer(&mut writer, question)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_questions_jsonl<R: Read>(reader: R) -> Result<Vec<GeneratedQuestion>, EvalError> {
    let mut questions = Vec::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        questions.push(serde_json::from_str(&line).map_err(|e| EvalError::Jsonl {
            line: idx as u64 + 1,
            message: e.to_string(),
        })?);
    }
    Ok(questions)
}
