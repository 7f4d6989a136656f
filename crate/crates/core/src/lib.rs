//! Toolkit for difficulty-controllable multiple-choice question generation
//! pipelines.
//!
//! The crate covers four stages that together make difficulty control
//! measurable end to end:
//!
//! - [`rasch`] — Rasch-model calibration: response probability, Fisher
//!   information, marginal-maximum-likelihood difficulty estimation,
//!   conditional ability estimation, and seeded response simulation.
//! - [`dataset`] — turning multiple-choice corpora plus calibration output
//!   into difficulty-annotated records, rendered prompts and targets,
//!   DPO preference pairs, few-shot prompts, and generation requests.
//! - [`policy`] — SFT, KL-regularized reward, and DPO objectives over a
//!   small tabular autoregressive policy whose output space can be
//!   enumerated exactly, so every objective-level claim is checkable
//!   without a language model.
//! - [`eval`] — the evaluation harness: correct-rate curves, re-estimated
//!   difficulty and MAE, Fisher-information summaries, judge prompts, an
//!   HTTP judge client, and score aggregation.

pub mod dataset;
pub mod eval;
pub mod grid;
pub mod policy;
pub mod rasch;
pub mod seed;
pub mod stats;
