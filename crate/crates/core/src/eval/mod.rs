//! Evaluation harness: administering generated questions to simulated
//! responders, correct-rate curves against the theoretical expectation,
//! re-estimated difficulties and MAE, Fisher-information summaries, judge
//! prompts with an HTTP client, and score aggregation.

mod administer;
mod client;
mod fisher;
mod judge;
mod metrics;
mod question;
mod report;

pub use administer::administer;
pub use client::{call_judge, run_judge_batch, EndpointConfig};
pub use fisher::{fisher_curve_group, mean_fisher_at_matched_ability};
pub use judge::{
    aggregate_quality, parse_judge_verdict, reasoning_type_distribution, render_judge_prompt,
    CriterionStats, JudgeCriterion, JudgePrompt, JudgeVerdict, OptionSlot, QualitySummary,
    ReasoningCategory, ReasoningDistribution, VerdictScore,
};
pub use metrics::{
    correct_rate_curve, estimate_generated_difficulties, mae_difficulty, theoretical_curve,
    BinRate, CorrectRateCurve, DifficultyEstimates,
};
pub use question::{read_questions_jsonl, write_questions_jsonl, GeneratedQuestion};
pub use report::{evaluate, EvaluationReport, JudgeReport, ReportConfig};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("question {0:?} has no latent difficulty; simulation mode needs one")]
    MissingLatentDifficulty(String),
    #[error("question {0:?} does not parse")]
    UnparsedOutput(String),
    #[error("{0} must not be empty")]
    EmptyInput(&'static str),
    #[error("environment variable {0} is not set")]
    MissingCredentials(String),
    #[error("authentication rejected with status {status}")]
    Auth { status: u16 },
    #[error("endpoint returned status {status}: {body}")]
    Status { status: u16, body: String },
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("malformed endpoint response: {0}")]
    MalformedResponse(String),
    #[error("jsonl line {line}: {message}")]
    Jsonl { line: u64, message: String },
    #[error(transparent)]
    Rasch(#[from] crate::rasch::RaschError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
