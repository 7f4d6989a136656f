use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Parser;
use dcqg_core::rasch::{
    estimate_abilities_mle, estimate_difficulties_mml, EmConfig, ParameterSet, QuadratureGrid,
    ResponseMatrix,
};

use super::{create_writer, open_reader};
use crate::config::FileConfig;

#[derive(Parser)]
pub struct Args {
    /// Response matrix CSV (responder_id,item_id,outcome).
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Output parameter JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Quadrature nodes for the ability prior.
    #[arg(long)]
    nodes: Option<usize>,
    /// Half-width of the quadrature interval.
    #[arg(long)]
    half_width: Option<f64>,
    /// EM stopping tolerance on the largest difficulty change.
    #[arg(long)]
    tol: Option<f64>,
    /// EM iteration cap.
    #[arg(long)]
    max_iter: Option<usize>,
}

pub fn run(args: Args, config: &FileConfig) -> Result<()> {
    let matrix_path = config.require_path(args.matrix, "matrix")?;
    let out_path = config.require_path(args.out, "out")?;
    let nodes = config.resolve(args.nodes, "nodes", 41)?;
    let half_width = config.resolve(args.half_width, "half-width", 6.0)?;
    let em = EmConfig {
        tolerance: config.resolve(args.tol, "tol", 1e-4)?,
        max_iterations: config.resolve(args.max_iter, "max-iter", 500)?,
    };

    let matrix = ResponseMatrix::read_csv(open_reader(&matrix_path)?)
        .with_context(|| format!("reading {}", matrix_path.display()))?;
    let grid = QuadratureGrid::standard_normal(nodes, half_width);
    let items = estimate_difficulties_mml(&matrix, &grid, &em)?;
    let responders = estimate_abilities_mle(&matrix, &items)?;

    let converged = items.converged.values().filter(|&&c| c).count();
    let clamped = responders.clamped.len();
    let set = ParameterSet { items, responders };
    set.write_json(create_writer(&out_path)?)?;

    // output validation: the file must read back
    ParameterSet::read_json(open_reader(&out_path)?)
        .with_context(|| format!("validating {}", out_path.display()))?;

    println!(
        "calibrated {} items from {} responders ({} scored responses)",
        matrix.n_items(),
        matrix.n_responders(),
        matrix.scored_count()
    );
    println!(
        "EM converged for {converged}/{} items; {clamped} responders clamped at the bound",
        matrix.n_items()
    );
    println!("parameters written to {}", out_path.display());
    Ok(())
}
