//! Question records, difficulty annotation, and the JSONL corpus format.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use super::{DatasetError, TAGS};
use crate::rasch::{ItemParams, LOGIT_BOUND};

/// One multiple-choice question: a reading passage, the question text, the
/// correct option, and exactly three distractors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionRecord {
    pub record_id: String,
    pub passage_id: String,
    pub passage: String,
    pub question: String,
    pub answer: String,
    pub distractors: [String; 3],
}

/// A question record plus its estimated difficulty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedRecord {
    #[serde(flatten)]
    pub record: QuestionRecord,
    pub difficulty: f64,
    #[serde(default = "default_true")]
    pub converged: bool,
}

fn default_true() -> bool {
    true
}

impl QuestionRecord {
    /// Ingestion validation: non-empty fields, pairwise-distinct options, and
    /// no reserved tag substrings anywhere.
    pub fn validate(&self) -> Result<(), DatasetError> {
        let fields: [(&'static str, &str); 6] = [
            ("passage", &self.passage),
            ("question", &self.question),
            ("answer", &self.answer),
            ("distractor 1", &self.distractors[0]),
            ("distractor 2", &self.distractors[1]),
            ("distractor 3", &self.distractors[2]),
        ];
        for (name, value) in fields {
            if value.trim().is_empty() {
                return Err(DatasetError::EmptyField {
                    record_id: self.record_id.clone(),
                    field: name,
                });
            }
            for tag in TAGS {
                if value.contains(tag) {
                    return Err(DatasetError::ReservedTag {
                        record_id: self.record_id.clone(),
                        field: name,
                        tag,
                    });
                }
            }
        }
        let mut options = [
            self.answer.as_str(),
            self.distractors[0].as_str(),
            self.distractors[1].as_str(),
            self.distractors[2].as_str(),
        ];
        options.sort_unstable();
        if options.windows(2).any(|w| w[0] == w[1]) {
            return Err(DatasetError::DuplicateOption { record_id: self.record_id.clone() });
        }
        Ok(())
    }

    /// The five content fields, used for same-passage duplicate detection.
    fn content_key(&self) -> (&str, &str, &str, &str, &str) {
        (
            &self.question,
            &self.answer,
            &self.distractors[0],
            &self.distractors[1],
            &self.distractors[2],
        )
    }
}

/// Zips difficulty estimates onto records, preserving record order.
///
/// `record_id` is the item id used during calibration. Records without an
/// estimate are an error that lists every missing id.
pub fn annotate_difficulties(
    records: &[QuestionRecord],
    items: &ItemParams,
) -> Result<Vec<AnnotatedRecord>, DatasetError> {
    let missing: Vec<String> = records
        .iter()
        .filter(|r| !items.difficulty.contains_key(&r.record_id))
        .map(|r| r.record_id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(DatasetError::MissingDifficulty { ids: missing });
    }
    records
        .iter()
        .map(|record| {
            let difficulty = items.difficulty[&record.record_id];
            if !difficulty.is_finite() || difficulty.abs() > LOGIT_BOUND + 1e-9 {
                return Err(DatasetError::DifficultyOutOfRange {
                    record_id: record.record_id.clone(),
                    value: difficulty,
                });
            }
            Ok(AnnotatedRecord {
                record: record.clone(),
                difficulty,
                converged: items.converged.get(&record.record_id).copied().unwrap_or(true),
            })
        })
        .collect()
}

/// Reads a JSONL corpus. Each line is one record; the `difficulty` field is
/// optional on input and records carrying one come back annotated.
///
/// Validation runs per record, plus corpus-level checks: unique record ids
/// and no two records with identical question content on the same passage.
pub fn read_records_jsonl<R: Read>(
    reader: R,
) -> Result<(Vec<QuestionRecord>, Vec<AnnotatedRecord>), DatasetError> {
    let mut plain = Vec::new();
    let mut annotated = Vec::new();
    let mut ids: HashMap<String, ()> = HashMap::new();
    let mut content_seen: HashMap<(String, String, String, String, String, String), String> =
        HashMap::new();

    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = idx as u64 + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(&line)
            .map_err(|e| DatasetError::Jsonl { line: line_no, message: e.to_string() })?;
        let has_difficulty = value.get("difficulty").is_some_and(|d| !d.is_null());
        let record: QuestionRecord = if has_difficulty {
            let rec: AnnotatedRecord = serde_json::from_value(value)
                .map_err(|e| DatasetError::Jsonl { line: line_no, message: e.to_string() })?;
            let record = rec.record.clone();
            annotated.push(rec);
            record
        } else {
            let rec: QuestionRecord = serde_json::from_value(value)
                .map_err(|e| DatasetError::Jsonl { line: line_no, message: e.to_string() })?;
            plain.push(rec.clone());
            rec
        };
        record.validate()?;
        if ids.insert(record.record_id.clone(), ()).is_some() {
            return Err(DatasetError::DuplicateRecordId(record.record_id));
        }
        let key = record.content_key();
        let full_key = (
            record.passage_id.clone(),
            key.0.to_owned(),
            key.1.to_owned(),
            key.2.to_owned(),
            key.3.to_owned(),
            key.4.to_owned(),
        );
        if content_seen.insert(full_key, record.record_id.clone()).is_some() {
            return Err(DatasetError::DuplicateQuestion {
                record_id: record.record_id,
                passage_id: record.passage_id,
            });
        }
    }
    Ok((plain, annotated))
}

/// Reads a corpus as bare question records in file order, whether or not
/// lines carry difficulty annotations.
pub fn read_corpus_records<R: Read>(reader: R) -> Result<Vec<QuestionRecord>, DatasetError> {
    let mut text = String::new();
    let mut reader = BufReader::new(reader);
    reader.read_to_string(&mut text)?;
    let (_, _) = read_records_jsonl(text.as_bytes())?; // full validation pass
    let mut records = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(line)
            .map_err(|e| DatasetError::Jsonl { line: 0, message: e.to_string() })?;
        records.push(
            serde_json::from_value(value)
                .map_err(|e| DatasetError::Jsonl { line: 0, message: e.to_string() })?,
        );
    }
    Ok(records)
}

/// Writes annotated records as JSONL, one record per line, UTF-8, LF endings.
pub fn write_records_jsonl<W: Write>(
    mut writer: W,
    records: &[AnnotatedRecord],
) -> Result<(), DatasetError> {
    for record in records {
        serde_json::to_writer(&mut writer, record)
            .map_err(|e| DatasetError::Jsonl { line: 0, message: e.to_string() })?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}
