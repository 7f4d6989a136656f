//! DPO preference pairs: for each annotated record, the record's own
//! rendered output is preferred and a random other question from the same
//! passage is dispreferred.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{render_generation_prompt, render_target_output, AnnotatedRecord, DatasetError};
use crate::seed::{derive_seed, derive_stream};

/// One (prompt, preferred output, dispreferred output) triple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreferencePair {
    pub input: String,
    pub preferred: String,
    pub dispreferred: String,
    pub source_record_id: String,
    pub dispreferred_record_id: String,
}

/// Pairs plus the records skipped because their passage has no other
/// question to borrow a dispreferred output from.
#[derive(Debug, Clone, Default)]
pub struct PairBuildOutput {
    pub pairs: Vec<PreferencePair>,
    pub skipped_record_ids: Vec<String>,
}

/// Builds the DPO pair list.
///
/// For record `i`: the input is the generation prompt for `(passage_i, b_i)`,
/// the preferred output is record `i`'s own rendered target, and the
/// dispreferred output is the rendered target of a uniformly drawn other
/// record sharing the passage. Records whose passage holds a single question
/// are skipped and reported. Each record's draw is seeded from
/// `(seed, record_id)` alone, so the output is byte-stable under record
/// reordering and parallel execution.
pub fn build_dpo_pairs(records: &[AnnotatedRecord], seed: u64) -> PairBuildOutput {
    let mut by_passage: HashMap<&str, Vec<usize>> = HashMap::new();
    for (idx, record) in records.iter().enumerate() {
        by_passage.entry(&record.record.passage_id).or_default().push(idx);
    }

    let mut output = PairBuildOutput::default();
    for (idx, record) in records.iter().enumerate() {
        let mates = &by_passage[record.record.passage_id.as_str()];
        if mates.len() < 2 {
            output.skipped_record_ids.push(record.record.record_id.clone());
            continue;
        }
        // candidates in id order, so the draw is independent of input order
        let mut others: Vec<usize> = mates.iter().copied().filter(|&m| m != idx).collect();
        others.sort_by(|&a, &b| records[a].record.record_id.cmp(&records[b].record.record_id));
        let record_seed = derive_stream(
            derive_seed(seed, "build-pairs"),
            fingerprint(&record.record.record_id),
        );
        let mut rng = ChaCha8Rng::seed_from_u64(record_seed);
        let pick = others[rng.random_range(0..others.len())];
        let loser = &records[pick];
        output.pairs.push(PreferencePair {
            input: render_generation_prompt(&record.record.passage, record.difficulty),
            preferred: render_target_output(&record.record),
            dispreferred: render_target_output(&loser.record),
            source_record_id: record.record.record_id.clone(),
            dispreferred_record_id: loser.record.record_id.clone(),
        });
    }
    output
}

fn fingerprint(record_id: &str) -> u64 {
    // FNV-1a, matching the stage-seed derivation in `crate::seed`
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in record_id.as_bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Post-hoc validation of a pair list against its source records: every pair
/// must borrow from the same passage, differ from its preferred output, and
/// reference known records. Returns the number of checked pairs.
pub fn verify_pairs(
    pairs: &[PreferencePair],
    records: &[AnnotatedRecord],
) -> Result<usize, DatasetError> {
    let by_id: HashMap<&str, &AnnotatedRecord> = records
        .iter()
        .map(|r| (r.record.record_id.as_str(), r))
        .collect();
    for pair in pairs {
        let source = by_id.get(pair.source_record_id.as_str()).ok_or_else(|| {
            DatasetError::MissingDifficulty { ids: vec![pair.source_record_id.clone()] }
        })?;
        let loser = by_id.get(pair.dispreferred_record_id.as_str()).ok_or_else(|| {
            DatasetError::MissingDifficulty { ids: vec![pair.dispreferred_record_id.clone()] }
        })?;
        if pair.source_record_id == pair.dispreferred_record_id {
            return Err(DatasetError::DuplicateQuestion {
                record_id: pair.source_record_id.clone(),
                passage_id: source.record.passage_id.clone(),
            });
        }
        if source.record.passage_id != loser.record.passage_id {
            return Err(DatasetError::DuplicateQuestion {
                record_id: pair.dispreferred_record_id.clone(),
                passage_id: source.record.passage_id.clone(),
            });
        }
        if pair.preferred == pair.dispreferred {
            return Err(DatasetError::DuplicateQuestion {
                record_id: pair.source_record_id.clone(),
                passage_id: source.record.passage_id.clone(),
            });
        }
    }
    Ok(pairs.len())
}

/// Writes pairs as JSONL, one per line.
pub fn write_pairs_jsonl<W: Write>(
    mut writer: W,
    pairs: &[PreferencePair],
) -> Result<(), DatasetError> {
    for pair in pairs {
        serde_json::to_writer(&mut writer, pair)
            .map_err(|e| DatasetError::Jsonl { line: 0, message: e.to_string() })?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads a JSONL pair file.
pub fn read_pairs_jsonl<R: Read>(reader: R) -> Result<Vec<PreferencePair>, DatasetError> {
    let mut pairs = Vec::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        pairs.push(serde_json::from_str(&line).map_err(|e| DatasetError::Jsonl {
            line: idx as u64 + 1,
            message: e.to_string(),
        })?);
    }
    Ok(pairs)
}
