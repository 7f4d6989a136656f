use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Parser;
use dcqg_core::dataset::{read_pairs_jsonl, read_records_jsonl, verify_pairs};

use super::open_reader;
use crate::config::FileConfig;

#[derive(Parser)]
pub struct Args {
    /// Pair JSONL to check.
    #[arg(long)]
    pairs: Option<PathBuf>,
    /// The annotated corpus the pairs were built from.
    #[arg(long)]
    corpus: Option<PathBuf>,
}

pub fn run(args: Args, config: &FileConfig) -> Result<()> {
    let pairs_path = config.require_path(args.pairs, "pairs")?;
    let corpus_path = config.require_path(args.corpus, "corpus")?;

    let pairs = read_pairs_jsonl(open_reader(&pairs_path)?)
        .with_context(|| format!("reading {}", pairs_path.display()))?;
    let (plain, annotated) = read_records_jsonl(open_reader(&corpus_path)?)
        .with_context(|| format!("reading {}", corpus_path.display()))?;
    if !plain.is_empty() {
        bail!("corpus {} holds unannotated records", corpus_path.display());
    }
    let checked = verify_pairs(&pairs, &annotated)
        .with_context(|| format!("verifying {}", pairs_path.display()))?;
    println!("{checked} pairs verified: same passage, distinct outputs, known records");
    Ok(())
}
