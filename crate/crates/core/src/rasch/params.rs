//! Estimated item and responder parameters, and their JSON file format.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{RaschError, LOGIT_BOUND};

/// Item difficulties on the logit scale, with optional standard errors and
/// per-item convergence flags from estimation.
#[derive(Debug, Clone, Default)]
pub struct ItemParams {
    pub difficulty: BTreeMap<String, f64>,
    /// From observed information at the estimate; absent for hand-built sets.
    pub standard_error: BTreeMap<String, f64>,
    /// Whether the final EM update for the item was below tolerance; absent
    /// (treated as true) for hand-built sets.
    pub converged: BTreeMap<String, bool>,
}

impl ItemParams {
    pub fn from_difficulties<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut params = ItemParams::default();
        for (id, b) in entries {
            params.difficulty.insert(id.into(), b);
        }
        params
    }

    /// True unless some item carries an explicit `false` flag.
    pub fn all_converged(&self) -> bool {
        self.converged.values().all(|&c| c)
    }

    pub fn validate(&self) -> Result<(), RaschError> {
        for (id, &b) in &self.difficulty {
            if !b.is_finite() || b.abs() > LOGIT_BOUND + 1e-9 {
                return Err(RaschError::OutOfRange {
                    kind: "difficulty",
                    id: id.clone(),
                    value: b,
                });
            }
        }
        Ok(())
    }
}

/// Responder abilities on the same logit scale as item difficulties.
#[derive(Debug, Clone, Default)]
pub struct AbilityParams {
    pub ability: BTreeMap<String, f64>,
    /// Responders whose estimate hit the logit bound (perfect or zero score).
    pub clamped: BTreeSet<String>,
}

impl AbilityParams {
    pub fn from_abilities<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut params = AbilityParams::default();
        for (id, theta) in entries {
            params.ability.insert(id.into(), theta);
        }
        params
    }
}

/// Calibration output: items plus responders, serialized as one JSON object
/// of the form `{"items": {id: {b, se, converged}}, "responders": {id:
/// {theta, clamped}}}`.
#[derive(Debug, Clone, Default)]
pub struct ParameterSet {
    pub items: ItemParams,
    pub responders: AbilityParams,
}

#[derive(Serialize, Deserialize)]
struct ItemEntry {
    b: f64,
    se: Option<f64>,
    converged: bool,
}

#[derive(Serialize, Deserialize)]
struct ResponderEntry {
    theta: f64,
    clamped: bool,
}

#[derive(Serialize, Deserialize)]
struct ParameterFile {
    items: BTreeMap<String, ItemEntry>,
    responders: BTreeMap<String, ResponderEntry>,
}

impl ParameterSet {
    pub fn write_json<W: Write>(&self, mut writer: W) -> Result<(), RaschError> {
        let file = ParameterFile {
            items: self
                .items
                .difficulty
                .iter()
                .map(|(id, &b)| {
                    (
                        id.clone(),
                        ItemEntry {
                            b,
                            se: self.items.standard_error.get(id).copied(),
                            converged: self.items.converged.get(id).copied().unwrap_or(true),
                        },
                    )
                })
                .collect(),
            responders: self
                .responders
                .ability
                .iter()
                .map(|(id, &theta)| {
                    (
                        id.clone(),
                        ResponderEntry { theta, clamped: self.responders.clamped.contains(id) },
                    )
                })
                .collect(),
        };
        serde_json::to_writer_pretty(&mut writer, &file)?;
        writer.write_all(b"\n")?;
        Ok(())
    }

    pub fn read_json<R: Read>(reader: R) -> Result<Self, RaschError> {
        let file: ParameterFile = serde_json::from_reader(reader)?;
        let mut set = ParameterSet::default();
        for (id, entry) in file.items {
            set.items.difficulty.insert(id.clone(), entry.b);
            if let Some(se) = entry.se {
                set.items.standard_error.insert(id.clone(), se);
            }
            set.items.converged.insert(id, entry.converged);
        }
        for (id, entry) in file.responders {
            set.responders.ability.insert(id.clone(), entry.theta);
            if entry.clamped {
                set.responders.clamped.insert(id);
            }
        }
        Ok(set)
    }
}
