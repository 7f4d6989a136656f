use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Parser;
use dcqg_core::rasch::{simulate_responses, AbilityParams, ItemParams, ParameterSet, ResponseMatrix};
use dcqg_core::seed::derive_seed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{create_writer, open_reader};
use crate::config::FileConfig;

#[derive(Parser)]
pub struct Args {
    /// Responder count; abilities are drawn from N(0, theta-sigma^2).
    #[arg(long)]
    responders: Option<usize>,
    /// Item count; difficulties are drawn uniformly from [b-min, b-max].
    #[arg(long)]
    items: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    b_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    b_max: Option<f64>,
    #[arg(long)]
    theta_sigma: Option<f64>,
    /// Output response matrix CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional JSON with the generating parameters, for recovery checks.
    #[arg(long)]
    params_out: Option<PathBuf>,
}

pub fn run(args: Args, config: &FileConfig, seed: u64) -> Result<()> {
    let out_path = config.require_path(args.out, "out")?;
    let params_out = config.path(args.params_out, "params-out");
    let n_responders = config.resolve(args.responders, "responders", 77)?;
    let n_items = config.resolve(args.items, "items", 100)?;
    let b_min = config.resolve(args.b_min, "b-min", -3.0)?;
    let b_max = config.resolve(args.b_max, "b-max", 3.0)?;
    let theta_sigma = config.resolve(args.theta_sigma, "theta-sigma", 1.0)?;

    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "simulate"));
    let normal = Normal::new(0.0, theta_sigma).context("theta-sigma must be positive")?;
    let abilities = AbilityParams::from_abilities(
        (0..n_responders).map(|r| (format!("r{r:04}"), normal.sample(&mut rng))),
    );
    let items = ItemParams::from_difficulties(
        (0..n_items).map(|i| (format!("q{i:04}"), rng.random_range(b_min..b_max))),
    );
    let matrix = simulate_responses(&abilities, &items, derive_seed(seed, "simulate-draws"))?;
    matrix.write_csv(create_writer(&out_path)?)?;
    ResponseMatrix::read_csv(open_reader(&out_path)?)
        .with_context(|| format!("validating {}", out_path.display()))?;

    if let Some(path) = &params_out {
        let set = ParameterSet { items, responders: abilities };
        set.write_json(create_writer(path)?)?;
        ParameterSet::read_json(open_reader(path)?)
            .with_context(|| format!("validating {}", path.display()))?;
        println!("generating parameters written to {}", path.display());
    }

    println!(
        "simulated {} x {} responses into {}",
        n_responders,
        n_items,
        out_path.display()
    );
    Ok(())
}
