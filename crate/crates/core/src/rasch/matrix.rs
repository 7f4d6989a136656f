//! Binary response matrices: responders x items, with missing cells allowed.

use std::collections::HashMap;
use std::io::{Read, Write};

use super::RaschError;

/// Outcome of one responder answering one item.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Correct,
    Incorrect,
}

impl Outcome {
    pub fn is_correct(self) -> bool {
        matches!(self, Outcome::Correct)
    }
}

/// Correct/incorrect outcomes indexed by (responder, item). Cells with no
/// observation are missing and contribute to no likelihood.
#[derive(Debug, Clone)]
pub struct ResponseMatrix {
    responder_ids: Vec<String>,
    item_ids: Vec<String>,
    responder_index: HashMap<String, usize>,
    item_index: HashMap<String, usize>,
    // row-major, n_responders x n_items
    cells: Vec<Option<Outcome>>,
}

impl ResponseMatrix {
    /// Empty matrix over the given id lists. Ids must be unique.
    pub fn new(responder_ids: Vec<String>, item_ids: Vec<String>) -> Result<Self, RaschError> {
        let responder_index = index_of(&responder_ids)?;
        let item_index = index_of(&item_ids)?;
        let cells = vec![None; responder_ids.len() * item_ids.len()];
        Ok(ResponseMatrix {
            responder_ids,
            item_ids,
            responder_index,
            item_index,
            cells,
        })
    }

    /// Builds a matrix from (responder, item, correct) triples; id lists take
    /// first-appearance order. Repeated (responder, item) pairs are rejected.
    pub fn from_triples<'a, I>(triples: I) -> Result<Self, RaschError>
    where
        I: IntoIterator<Item = (&'a str, &'a str, bool)> + Clone,
    {
        let mut responder_ids = Vec::new();
        let mut item_ids = Vec::new();
        let mut seen_r = HashMap::new();
        let mut seen_i = HashMap::new();
        for (r, i, _) in triples.clone() {
            if !seen_r.contains_key(r) {
                seen_r.insert(r.to_owned(), responder_ids.len());
                responder_ids.push(r.to_owned());
            }
            if !seen_i.contains_key(i) {
                seen_i.insert(i.to_owned(), item_ids.len());
                item_ids.push(i.to_owned());
            }
        }
        let mut matrix = ResponseMatrix::new(responder_ids, item_ids)?;
        for (r, i, correct) in triples {
            let outcome = if correct {
                Outcome::Correct
            } else {
                Outcome::Incorrect
            };
            matrix.record(r, i, outcome)?;
        }
        Ok(matrix)
    }

    /// Stores one outcome; both ids must already be in the id lists.
    pub fn record(
        &mut self,
        responder_id: &str,
        item_id: &str,
        outcome: Outcome,
    ) -> Result<(), RaschError> {
        let r = *self
            .responder_index
            .get(responder_id)
            .ok_or_else(|| RaschError::UnknownResponder(responder_id.to_owned()))?;
        let i = *self
            .item_index
            .get(item_id)
            .ok_or_else(|| RaschError::UnknownItem(item_id.to_owned()))?;
        let cell = &mut self.cells[r * self.item_ids.len() + i];
        if cell.is_some() {
            return Err(RaschError::DuplicateObservation {
                responder: responder_id.to_owned(),
                item: item_id.to_owned(),
            });
        }
        *cell = Some(outcome);
        Ok(())
    }

    pub fn responder_ids(&self) -> &[String] {
        &self.responder_ids
    }

    pub fn item_ids(&self) -> &[String] {
        &self.item_ids
    }

    pub fn n_responders(&self) -> usize {
        self.responder_ids.len()
    }

    pub fn n_items(&self) -> usize {
        self.item_ids.len()
    }

    pub fn get(&self, responder: usize, item: usize) -> Option<Outcome> {
        self.cells[responder * self.item_ids.len() + item]
    }

    /// Scored cells of one responder row as (item index, outcome).
    pub fn responder_row(&self, responder: usize) -> impl Iterator<Item = (usize, Outcome)> + '_ {
        let n = self.item_ids.len();
        self.cells[responder * n..(responder + 1) * n]
            .iter()
            .enumerate()
            .filter_map(|(i, cell)| cell.map(|o| (i, o)))
    }

    /// Scored cells of one item column as (responder index, outcome).
    pub fn item_column(&self, item: usize) -> impl Iterator<Item = (usize, Outcome)> + '_ {
        let n = self.item_ids.len();
        (0..self.responder_ids.len()).filter_map(move |r| self.cells[r * n + item].map(|o| (r, o)))
    }

    /// Total number of scored cells.
    pub fn scored_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    /// Item ids with no scored cell at all.
    pub fn unscored_items(&self) -> Vec<String> {
        (0..self.n_items())
            .filter(|&i| self.item_column(i).next().is_none())
            .map(|i| self.item_ids[i].clone())
            .collect()
    }

    /// Fraction of scored cells each responder answered correctly, in
    /// responder order. Responders with no scored cells get `None`.
    pub fn responder_accuracies(&self) -> Vec<(String, Option<f64>)> {
        (0..self.n_responders())
            .map(|r| {
                let mut correct = 0usize;
                let mut total = 0usize;
                for (_, outcome) in self.responder_row(r) {
                    total += 1;
                    if outcome.is_correct() {
                        correct += 1;
                    }
                }
                let acc = (total > 0).then(|| correct as f64 / total as f64);
                (self.responder_ids[r].clone(), acc)
            })
            .collect()
    }

    /// Reads the `responder_id,item_id,outcome` CSV format; outcome is `1`
    /// (correct) or `0` (incorrect), and absent pairs are missing.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self, RaschError> {
        let mut csv = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        {
            let headers = csv
                .headers()
                .map_err(|e| RaschError::Csv { line: 1, message: e.to_string() })?;
            let expected = ["responder_id", "item_id", "outcome"];
            if headers.len() != 3 || headers.iter().zip(expected).any(|(h, e)| h != e) {
                return Err(RaschError::Csv {
                    line: 1,
                    message: format!(
                        "expected header responder_id,item_id,outcome, got {:?}",
                        headers.iter().collect::<Vec<_>>().join(",")
                    ),
                });
            }
        }
        let mut triples: Vec<(String, String, bool)> = Vec::new();
        for (idx, row) in csv.records().enumerate() {
            let line = idx as u64 + 2;
            let row = row.map_err(|e| RaschError::Csv { line, message: e.to_string() })?;
            if row.len() != 3 {
                return Err(RaschError::Csv {
                    line,
                    message: format!("expected 3 fields, got {}", row.len()),
                });
            }
            let correct = match &row[2] {
                "1" => true,
                "0" => false,
                other => {
                    return Err(RaschError::Csv {
                        line,
                        message: format!("outcome must be 1 or 0, got {other:?}"),
                    })
                }
            };
            triples.push((row[0].to_owned(), row[1].to_owned(), correct));
        }
        if triples.is_empty() {
            return Err(RaschError::AllMissing);
        }
        ResponseMatrix::from_triples(triples.iter().map(|(r, i, c)| (r.as_str(), i.as_str(), *c)))
    }

    /// Writes the CSV format read by [`ResponseMatrix::read_csv`]; rows come
    /// out in responder-major id-list order, so output is deterministic.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), RaschError> {
        let mut csv = csv::Writer::from_writer(writer);
        csv.write_record(["responder_id", "item_id", "outcome"])
            .map_err(io_like)?;
        for r in 0..self.n_responders() {
            for (i, outcome) in self.responder_row(r) {
                csv.write_record([
                    self.responder_ids[r].as_str(),
                    self.item_ids[i].as_str(),
                    if outcome.is_correct() { "1" } else { "0" },
                ])
                .map_err(io_like)?;
            }
        }
        csv.flush()?;
        Ok(())
    }
}

fn io_like(err: csv::Error) -> RaschError {
    RaschError::Csv { line: 0, message: err.to_string() }
}

fn index_of(ids: &[String]) -> Result<HashMap<String, usize>, RaschError> {
    let mut index = HashMap::with_capacity(ids.len());
    for (pos, id) in ids.iter().enumerate() {
        if index.insert(id.clone(), pos).is_some() {
            return Err(RaschError::DuplicateId(id.clone()));
        }
    }
    Ok(index)
}
