//! Dataset construction: difficulty-annotated question records, rendered
//! prompts and target outputs, DPO preference pairs, few-shot prompts, and
//! generation requests over a difficulty grid.

mod filter;
mod pairs;
mod prompt;
mod record;
mod requests;

pub use filter::filter_qa_systems;
pub use pairs::{
    build_dpo_pairs, read_pairs_jsonl, verify_pairs, write_pairs_jsonl, PairBuildOutput,
    PreferencePair,
};
pub use prompt::{
    build_few_shot_prompt, parse_model_output, render_generation_prompt, render_target_output,
    ParsedOutput, TAGS,
};
pub use record::{
    annotate_difficulties, read_corpus_records, read_records_jsonl, write_records_jsonl,
    AnnotatedRecord, QuestionRecord,
};
pub use requests::{
    build_generation_requests, read_requests_jsonl, write_requests_jsonl, GenerationRequest,
};

pub use crate::grid::difficulty_grid;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("record {record_id:?}: field {field} is empty")]
    EmptyField { record_id: String, field: &'static str },
    #[error("record {record_id:?}: options must be pairwise distinct")]
    DuplicateOption { record_id: String },
    #[error("record {record_id:?}: field {field} contains reserved tag {tag:?}")]
    ReservedTag { record_id: String, field: &'static str, tag: &'static str },
    #[error("duplicate record id {0:?}")]
    DuplicateRecordId(String),
    #[error("record {record_id:?}: duplicate question content for passage {passage_id:?}")]
    DuplicateQuestion { record_id: String, passage_id: String },
    #[error("no difficulty estimate for records: {}", ids.join(", "))]
    MissingDifficulty { ids: Vec<String> },
    #[error("difficulty for record {record_id:?} out of range: {value}")]
    DifficultyOutOfRange { record_id: String, value: f64 },
    #[error("few-shot prompt needs at least one example")]
    NoExamples,
    #[error("jsonl line {line}: {message}")]
    Jsonl { line: u64, message: String },
    #[error(transparent)]
    Parse(#[from] ParseOutputError),
    #[error(transparent)]
    Grid(#[from] crate::rasch::RaschError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Structured failure from [`parse_model_output`], naming the first violated
/// tag in template order.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseOutputError {
    #[error("missing tag {0}")]
    MissingTag(&'static str),
    #[error("tag {0} out of order")]
    MisorderedTag(&'static str),
    #[error("empty field after tag {0}")]
    EmptyField(&'static str),
}
