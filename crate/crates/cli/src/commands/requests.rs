use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Parser;
use dcqg_core::dataset::{build_generation_requests, read_corpus_records, write_requests_jsonl};

use super::{check_jsonl_lines, create_writer, open_reader};
use crate::config::FileConfig;

#[derive(Parser)]
pub struct Args {
    /// Corpus JSONL supplying passages (first appearance order).
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Output request JSONL.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cap on distinct passages.
    #[arg(long)]
    passages: Option<usize>,
    /// Difficulty grid bounds and step.
    #[arg(long, allow_negative_numbers = true)]
    min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    max: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
}

pub fn run(args: Args, config: &FileConfig) -> Result<()> {
    let corpus_path = config.require_path(args.corpus, "corpus")?;
    let out_path = config.require_path(args.out, "out")?;
    let passages = match args.passages {
        Some(n) => Some(n),
        None => config.get("passages")?,
    };
    let min = config.resolve(args.min, "min", -3.0)?;
    let max = config.resolve(args.max, "max", 3.0)?;
    let step = config.resolve(args.step, "step", 0.1)?;

    let records = read_corpus_records(open_reader(&corpus_path)?)
        .with_context(|| format!("reading {}", corpus_path.display()))?;
    let requests = build_generation_requests(&records, passages, min, max, step)?;
    write_requests_jsonl(create_writer(&out_path)?, &requests)?;
    check_jsonl_lines(&out_path, requests.len())?;

    let distinct: std::collections::HashSet<&str> =
        requests.iter().map(|r| r.passage_id.as_str()).collect();
    println!(
        "rendered {} requests ({} passages x {} grid points)",
        requests.len(),
        distinct.len(),
        if distinct.is_empty() { 0 } else { requests.len() / distinct.len() }
    );
    println!("written to {}", out_path.display());
    Ok(())
}
