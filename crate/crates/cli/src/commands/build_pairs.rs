use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Parser;
use dcqg_core::dataset::{build_dpo_pairs, read_records_jsonl, write_pairs_jsonl};

use super::{check_jsonl_lines, create_writer, open_reader};
use crate::config::FileConfig;

#[derive(Parser)]
pub struct Args {
    /// Annotated corpus JSONL (records must carry difficulties).
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Output pair JSONL.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: Args, config: &FileConfig, seed: u64) -> Result<()> {
    let corpus_path = config.require_path(args.corpus, "corpus")?;
    let out_path = config.require_path(args.out, "out")?;

    let (plain, annotated) = read_records_jsonl(open_reader(&corpus_path)?)
        .with_context(|| format!("reading {}", corpus_path.display()))?;
    if !plain.is_empty() {
        bail!(
            "{} records in {} have no difficulty; run `annotate` first",
            plain.len(),
            corpus_path.display()
        );
    }
    let output = build_dpo_pairs(&annotated, seed);
    for skipped in &output.skipped_record_ids {
        eprintln!("warning: record {skipped:?} skipped (single-question passage)");
    }
    write_pairs_jsonl(create_writer(&out_path)?, &output.pairs)?;
    check_jsonl_lines(&out_path, output.pairs.len())?;

    println!(
        "built {} pairs from {} records ({} skipped)",
        output.pairs.len(),
        annotated.len(),
        output.skipped_record_ids.len()
    );
    println!("written to {}", out_path.display());
    Ok(())
}
