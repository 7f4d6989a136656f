use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Parser;
use dcqg_core::dataset::filter_qa_systems;
use dcqg_core::rasch::ResponseMatrix;

use super::{create_writer, open_reader};
use crate::config::FileConfig;

#[derive(Parser)]
pub struct Args {
    /// Response matrix of the candidate QA systems.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Minimum accuracy to keep a system (inclusive).
    #[arg(long)]
    threshold: Option<f64>,
    /// Output CSV of kept systems (system_id,accuracy).
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: Args, config: &FileConfig) -> Result<()> {
    let matrix_path = config.require_path(args.matrix, "matrix")?;
    let out_path = config.require_path(args.out, "out")?;
    let threshold = config.resolve(args.threshold, "threshold", 0.30)?;

    let matrix = ResponseMatrix::read_csv(open_reader(&matrix_path)?)
        .with_context(|| format!("reading {}", matrix_path.display()))?;
    let mut accuracies: Vec<(String, f64)> = Vec::new();
    for (id, accuracy) in matrix.responder_accuracies() {
        match accuracy {
            Some(accuracy) => accuracies.push((id, accuracy)),
            None => eprintln!("warning: system {id:?} has no scored responses; excluded"),
        }
    }
    let kept = filter_qa_systems(&accuracies, threshold);

    let mut writer = csv::Writer::from_writer(create_writer(&out_path)?);
    writer.write_record(["system_id", "accuracy"])?;
    for id in &kept {
        let accuracy = accuracies.iter().find(|(a, _)| a == id).expect("kept id exists").1;
        writer.write_record([id.as_str(), &format!("{accuracy:.6}")])?;
    }
    writer.flush()?;

    let mut check = csv::Reader::from_reader(open_reader(&out_path)?);
    let rows = check.records().count();
    anyhow::ensure!(rows == kept.len(), "output row count mismatch");

    println!(
        "kept {}/{} systems at threshold {threshold}",
        kept.len(),
        accuracies.len()
    );
    println!("written to {}", out_path.display());
    Ok(())
}
