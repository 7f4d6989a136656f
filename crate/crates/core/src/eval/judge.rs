//! Judge prompts, verdict parsing, and score aggregation.
//!
//! Prompt texts are byte-exact contracts checked against golden files. The
//! four options are shuffled into labels A-D with a per-question seed so the
//! correct option's position carries no signal; the mapping is returned for
//! logging.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{EvalError, GeneratedQuestion};
use crate::seed::{derive_seed, derive_stream};
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JudgeCriterion {
    Fluency,
    Relevance,
    Answerability,
    ReasoningType,
}

impl JudgeCriterion {
    pub const ALL: [JudgeCriterion; 4] = [
        JudgeCriterion::Fluency,
        JudgeCriterion::Relevance,
        JudgeCriterion::Answerability,
        JudgeCriterion::ReasoningType,
    ];

    pub fn name(self) -> &'static str {
        match self {
            JudgeCriterion::Fluency => "fluency",
            JudgeCriterion::Relevance => "relevance",
            JudgeCriterion::Answerability => "answerability",
            JudgeCriterion::ReasoningType => "reasoning_type",
        }
    }

    /// Highest admissible integer score; none for the category criterion.
    fn max_score(self) -> Option<u8> {
        match self {
            JudgeCriterion::Fluency => Some(2),
            JudgeCriterion::Relevance | JudgeCriterion::Answerability => Some(1),
            JudgeCriterion::ReasoningType => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ReasoningCategory {
    WordMatching,
    Paraphrasing,
    SingleSentenceReasoning,
    MultiSentenceReasoning,
}

impl ReasoningCategory {
    pub const ALL: [ReasoningCategory; 4] = [
        ReasoningCategory::WordMatching,
        ReasoningCategory::Paraphrasing,
        ReasoningCategory::SingleSentenceReasoning,
        ReasoningCategory::MultiSentenceReasoning,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReasoningCategory::WordMatching => "Word matching",
            ReasoningCategory::Paraphrasing => "Paraphrasing",
            ReasoningCategory::SingleSentenceReasoning => "Single-sentence reasoning",
            ReasoningCategory::MultiSentenceReasoning => "Multi-sentence reasoning",
        }
    }
}

/// Where each A-D label's text came from in the parsed output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptionSlot {
    Answer,
    Distractor(usize),
}

/// A rendered judge prompt plus the logged option mapping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgePrompt {
    pub criterion: JudgeCriterion,
    pub question_id: String,
    pub text: String,
    /// Option source for labels A, B, C, D in order.
    pub option_order: [OptionSlot; 4],
    /// The label (A-D) holding the correct option.
    pub correct_label: char,
}

/// Instantiates the criterion's template for one parsed question.
///
/// Options are shuffled with a stream seeded from `(seed, question_id)`, so
/// a rerun with the same seed is byte-identical and the shuffle does not
/// depend on question order.
pub fn render_judge_prompt(
    criterion: JudgeCriterion,
    question: &GeneratedQuestion,
    seed: u64,
) -> Result<JudgePrompt, EvalError> {
    let parsed = question
        .parsed()
        .ok_or_else(|| EvalError::UnparsedOutput(question.question_id.clone()))?;

    let mut slots = [
        OptionSlot::Answer,
        OptionSlot::Distractor(0),
        OptionSlot::Distractor(1),
        OptionSlot::Distractor(2),
    ];
    let stream = derive_stream(
        derive_seed(seed, "judge-options"),
        fingerprint(&question.question_id),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(stream);
    // Fisher-Yates
    for i in (1..slots.len()).rev() {
        let j = rng.random_range(0..=i);
        slots.swap(i, j);
    }
    let option_text = |slot: OptionSlot| -> &str {
        match slot {
            OptionSlot::Answer => &parsed.answer,
            OptionSlot::Distractor(k) => &parsed.distractors[k],
        }
    };
    let correct_label = (b'A'
        + slots.iter().position(|&s| s == OptionSlot::Answer).unwrap() as u8)
        as char;

    let header = match criterion {
        JudgeCriterion::Fluency => {
            "The following are the text to be comprehended, the corresponding question, and the \
             options. Please evaluate whether the question is fluent to the reading passage on a \
             scale of three: appropriate, acceptable or inappropriate. If appropriate, output \
             \"2\"; acceptable, output \"1\"; if inappropriate, output \"0\"."
                .to_owned()
        }
        JudgeCriterion::Relevance => {
            "The following are the text to be comprehended, the corresponding question, and the \
             options. Please evaluate whether the question is relevant to the reading passage on \
             a scale of two: appropriate or inappropriate. If appropriate, output \"1\", and if \
             inappropriate, output \"0\"."
                .to_owned()
        }
        JudgeCriterion::Answerability => {
            "The following are the text to be comprehended, the corresponding question, and the \
             options. If there is only one correct answer among the options, output \"1\". If \
             there are two or more correct answers or no correct answer at all, output \"0\". \
             Additionally, provide the reason."
                .to_owned()
        }
        JudgeCriterion::ReasoningType => {
            let definitions = ReasoningCategory::ALL
                .iter()
                .map(|category| {
                    format!("{}: {}", category.name(), match category {
                        ReasoningCategory::WordMatching => {
                            "The question exactly matches a span in the article. The answer is \
                             self-evident."
                        }
                        ReasoningCategory::Paraphrasing => {
                            "The question is entailed or paraphrased by exactly one sentence in \
                             the passage. The answer can be extracted within the sentence."
                        }
                        ReasoningCategory::SingleSentenceReasoning => {
                            "The answer can be inferred from a single sentence of the article by \
                             recognizing incomplete information or conceptual overlap."
                        }
                        ReasoningCategory::MultiSentenceReasoning => {
                            "The answer must be inferred by synthesizing information distributed \
                             across multiple sentences."
                        }
                    })
                })
                .collect::<Vec<_>>()
                .join("\n");
            format!(
                "Read the provided definitions carefully and determine how the following \
                 question relates to the given context. Classify the relationship by selecting \
                 exactly one category from among the provided options. Your response should \
                 contain only the exact category name, without any additional explanation.\n\n\
                 ### Definitions:\n{definitions}"
            )
        }
    };

    let text = format!(
        "{header}\n### Context: {passage}\n### Question: {question}\n### Options:\nA. {a}\nB. \
         {b}\nC. {c}\nD. {d}",
        passage = question.passage,
        question = parsed.question,
        a = option_text(slots[0]),
        b = option_text(slots[1]),
        c = option_text(slots[2]),
        d = option_text(slots[3]),
    );

    Ok(JudgePrompt {
        criterion,
        question_id: question.question_id.clone(),
        text,
        option_order: slots,
        correct_label,
    })
}

fn fingerprint(id: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in id.as_bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// A parsed judge response. Out-of-range and unrecognizable responses are a
/// value, not an error, so aggregation can count them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgeVerdict {
    pub criterion: JudgeCriterion,
    pub raw: String,
    pub score: VerdictScore,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictScore {
    Score(u8),
    Category(ReasoningCategory),
    Unparseable,
}

/// Extracts the final standalone integer (score criteria) or the single
/// category name present (reasoning type).
pub fn parse_judge_verdict(criterion: JudgeCriterion, raw: &str) -> JudgeVerdict {
    let score = match criterion.max_score() {
        Some(max) => match final_standalone_integer(raw) {
            Some(value) if value <= u64::from(max) => VerdictScore::Score(value as u8),
            _ => VerdictScore::Unparseable,
        },
        None => {
            let mut found: Vec<ReasoningCategory> = ReasoningCategory::ALL
                .iter()
                .copied()
                .filter(|category| raw.contains(category.name()))
                .collect();
            match (found.len(), found.pop()) {
                (1, Some(category)) => VerdictScore::Category(category),
                _ => VerdictScore::Unparseable,
            }
        }
    };
    JudgeVerdict { criterion, raw: raw.to_owned(), score }
}

/// The last run of digits not attached to an alphanumeric character.
fn final_standalone_integer(text: &str) -> Option<u64> {
    let bytes = text.as_bytes();
    let mut end = bytes.len();
    while end > 0 {
        if !bytes[end - 1].is_ascii_digit() {
            end -= 1;
            continue;
        }
        let mut start = end;
        while start > 0 && bytes[start - 1].is_ascii_digit() {
            start -= 1;
        }
        let standalone = (start == 0 || !bytes[start - 1].is_ascii_alphanumeric())
            && (end == bytes.len() || !bytes[end].is_ascii_alphanumeric());
        if standalone {
            return text[start..end].parse().ok();
        }
        end = start;
    }
    None
}

/// Mean and population standard deviation per score criterion, with
/// unparseable responses counted but excluded from the statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionStats {
    pub mean: f64,
    pub std: f64,
    pub parsed: usize,
    pub unparseable: usize,
}

pub type QualitySummary = BTreeMap<JudgeCriterion, CriterionStats>;

/// Aggregates score verdicts (fluency, relevance, answerability). Category
/// verdicts belong in [`reasoning_type_distribution`].
pub fn aggregate_quality(verdicts: &[JudgeVerdict]) -> QualitySummary {
    let mut summary = QualitySummary::new();
    for criterion in [
        JudgeCriterion::Fluency,
        JudgeCriterion::Relevance,
        JudgeCriterion::Answerability,
    ] {
        let mut scores = Vec::new();
        let mut unparseable = 0usize;
        for verdict in verdicts.iter().filter(|v| v.criterion == criterion) {
            match verdict.score {
                VerdictScore::Score(s) => scores.push(f64::from(s)),
                _ => unparseable += 1,
            }
        }
        if scores.is_empty() && unparseable == 0 {
            continue;
        }
        summary.insert(
            criterion,
            CriterionStats {
                mean: stats::mean(&scores),
                std: stats::population_std(&scores),
                parsed: scores.len(),
                unparseable,
            },
        );
    }
    summary
}

/// Share of each reasoning category among parsed category verdicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReasoningDistribution {
    pub proportions: BTreeMap<ReasoningCategory, f64>,
    pub parsed: usize,
    pub unparseable: usize,
}

pub fn reasoning_type_distribution(verdicts: &[JudgeVerdict]) -> ReasoningDistribution {
    let mut counts: BTreeMap<ReasoningCategory, usize> =
        ReasoningCategory::ALL.iter().map(|&c| (c, 0)).collect();
    let mut parsed = 0usize;
    let mut unparseable = 0usize;
    for verdict in verdicts.iter().filter(|v| v.criterion == JudgeCriterion::ReasoningType) {
        match verdict.score {
            VerdictScore::Category(category) => {
                *counts.get_mut(&category).unwrap() += 1;
                parsed += 1;
            }
            _ => unparseable += 1,
        }
    }
    let proportions = counts
        .into_iter()
        .map(|(category, count)| {
            (category, if parsed == 0 { 0.0 } else { count as f64 / parsed as f64 })
        })
        .collect();
    ReasoningDistribution { proportions, parsed, unparseable }
}
