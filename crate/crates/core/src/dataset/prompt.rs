//! Prompt and target rendering for the generation model, and the inverse
//! parse of model outputs.
//!
//! Formats are byte-exact contracts: the generation prompt substitutes the
//! difficulty in one-decimal notation into a fixed Instruction/Context/
//! Response scaffold, and the target output is the five-tag string
//! `<c> .. <q> .. <d1> .. <d2> .. <d3> ..`.

use super::{DatasetError, ParseOutputError};
use crate::dataset::{GenerationRequest, QuestionRecord};

/// The five reserved output tags, in template order.
pub const TAGS: [&str; 5] = ["<c>", "<q>", "<d1>", "<d2>", "<d3>"];

/// Prompt asking for a question and four options at difficulty `b` for the
/// given passage. `b` is rendered with one decimal place (`-2.0`, `0.0`).
pub fn render_generation_prompt(passage: &str, b: f64) -> String {
    format!(
        "### Instruction: Create a question and four options with a difficulty level of {b:.1} \
         based on the Context. Option 1 is the correct answer and Options 2, 3, and 4 are \
         distractor options. The difficulty level -3.0 is the easiest and 3.0 is the most \
         difficult. The output format is \"<c> Option 1 (Correct Option) <q> Question \
         <d1> Option 2 (Distractor Option) <d2> Option 3 (Distractor Option) <d3> Option 4 \
         (Distractor Option)\"\n\n### Context: {passage}\n\n### Response:"
    )
}

/// Target output string for a record: the five tagged fields, single-space
/// separated.
pub fn render_target_output(record: &QuestionRecord) -> String {
    format!(
        "<c> {} <q> {} <d1> {} <d2> {} <d3> {}",
        record.answer,
        record.question,
        record.distractors[0],
        record.distractors[1],
        record.distractors[2],
    )
}

/// Fields recovered from a model output string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedOutput {
    pub answer: String,
    pub question: String,
    pub distractors: [String; 3],
}

/// Splits a model output on the five tags in template order and trims each
/// field. Text before `<c>` is ignored. The error names the first violated
/// tag: absent entirely, present but out of order, or followed by an empty
/// field.
pub fn parse_model_output(text: &str) -> Result<ParsedOutput, ParseOutputError> {
    let mut positions = [0usize; 5];
    let mut cursor = 0usize;
    for (k, tag) in TAGS.iter().enumerate() {
        match text[cursor..].find(tag) {
            Some(rel) => {
                positions[k] = cursor + rel;
                cursor = positions[k] + tag.len();
            }
            None => {
                return Err(if text.contains(tag) {
                    ParseOutputError::MisorderedTag(tag)
                } else {
                    ParseOutputError::MissingTag(tag)
                });
            }
        }
    }
    let mut fields: [&str; 5] = [""; 5];
    for k in 0..5 {
        let start = positions[k] + TAGS[k].len();
        let end = if k + 1 < 5 { positions[k + 1] } else { text.len() };
        let field = text[start..end].trim();
        if field.is_empty() {
            return Err(ParseOutputError::EmptyField(TAGS[k]));
        }
        fields[k] = field;
    }
    Ok(ParsedOutput {
        answer: fields[0].to_owned(),
        question: fields[1].to_owned(),
        distractors: [fields[2].to_owned(), fields[3].to_owned(), fields[4].to_owned()],
    })
}

/// Concatenates rendered (prompt, output) example blocks followed by the
/// target prompt, one blank line between blocks. The prompt sequence ends at
/// the target's `### Response:`, ready for completion.
pub fn build_few_shot_prompt(
    examples: &[(String, String)],
    target: &GenerationRequest,
) -> Result<String, DatasetError> {
    if examples.is_empty() {
        return Err(DatasetError::NoExamples);
    }
    let mut blocks: Vec<String> = examples
        .iter()
        .map(|(x, y)| format!("{x}\n{y}"))
        .collect();
    blocks.push(target.prompt.clone());
    Ok(blocks.join("\n\n"))
}
