use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Parser;
use dcqg_core::dataset::{annotate_difficulties, read_corpus_records, write_records_jsonl};
use dcqg_core::rasch::ParameterSet;

use super::{check_jsonl_lines, create_writer, open_reader};
use crate::config::FileConfig;

#[derive(Parser)]
pub struct Args {
    /// Question corpus JSONL; record ids must match calibrated item ids.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Parameter JSON from `calibrate`.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Output annotated JSONL.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: Args, config: &FileConfig) -> Result<()> {
    let corpus_path = config.require_path(args.corpus, "corpus")?;
    let params_path = config.require_path(args.params, "params")?;
    let out_path = config.require_path(args.out, "out")?;

    // re-annotating an already annotated corpus overwrites its difficulties
    let records = read_corpus_records(open_reader(&corpus_path)?)
        .with_context(|| format!("reading {}", corpus_path.display()))?;
    let set = ParameterSet::read_json(open_reader(&params_path)?)
        .with_context(|| format!("reading {}", params_path.display()))?;

    let annotated = annotate_difficulties(&records, &set.items)?;
    write_records_jsonl(create_writer(&out_path)?, &annotated)?;
    check_jsonl_lines(&out_path, annotated.len())?;

    println!(
        "annotated {} records ({} without a converged estimate)",
        annotated.len(),
        annotated.iter().filter(|r| !r.converged).count()
    );
    println!("written to {}", out_path.display());
    Ok(())
}
