use std::io::BufRead;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, ValueEnum};
use dcqg_core::policy::{
    dpo_margins, load_checkpoint, save_checkpoint, train_dpo, train_sft, write_training_log,
    DpoConfig, SftConfig, TokenPreferencePair, TokenVocabulary, ToyPolicy,
};
use dcqg_core::seed::derive_seed;
use serde::Deserialize;

use super::{create_writer, open_reader};
use crate::config::FileConfig;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Sft,
    Dpo,
}

#[derive(Parser)]
pub struct Args {
    /// Objective to train.
    #[arg(long, value_enum)]
    mode: Mode,
    /// Training data JSONL. SFT lines: {"condition", "tokens"}. DPO lines:
    /// {"condition", "preferred", "dispreferred"} (token symbol arrays).
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Output checkpoint JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Training-log CSV (step,loss,mean_margin).
    #[arg(long)]
    log: Option<PathBuf>,
    /// Starting checkpoint; defaults to a fresh uniform policy (SFT) or the
    /// reference checkpoint (DPO).
    #[arg(long)]
    init: Option<PathBuf>,
    /// Reference checkpoint; required for DPO.
    #[arg(long = "ref")]
    reference: Option<PathBuf>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Comma-separated vocabulary for fresh policies.
    #[arg(long)]
    vocab: Option<String>,
    #[arg(long)]
    eos: Option<String>,
    #[arg(long)]
    context_order: Option<usize>,
    #[arg(long)]
    max_length: Option<usize>,
    #[arg(long)]
    conditions: Option<usize>,
}

#[derive(Deserialize)]
struct SftLine {
    condition: usize,
    tokens: Vec<String>,
}

#[derive(Deserialize)]
struct DpoLine {
    condition: usize,
    preferred: Vec<String>,
    dispreferred: Vec<String>,
}

pub fn run(args: Args, config: &FileConfig, seed: u64) -> Result<()> {
    let dataset_path = config.require_path(args.dataset.clone(), "dataset")?;
    let out_path = config.require_path(args.out.clone(), "out")?;
    let log_path = config.require_path(args.log.clone(), "log")?;
    let lr = config.resolve(args.lr, "lr", 0.05)?;
    let steps = config.resolve(args.steps, "steps", 2000)?;
    let beta = config.resolve(args.beta, "beta", 0.1)?;
    let train_seed = derive_seed(seed, "train");

    let (trained, log) = match args.mode {
        Mode::Sft => {
            let policy = initial_policy(config, &args)?;
            let dataset = read_sft_dataset(&dataset_path, &policy)?;
            let config = SftConfig { learning_rate: lr, max_steps: steps, seed: train_seed };
            let (trained, log) = train_sft(&policy, &dataset, &config)?;
            println!(
                "sft: {} examples, final loss {:.6}",
                dataset.len(),
                log.last().map_or(f64::NAN, |s| s.loss)
            );
            (trained, log)
        }
        Mode::Dpo => {
            let Some(ref_path) = args.reference.clone().or_else(|| config.path(None, "ref"))
            else {
                bail!("--ref is required for dpo mode");
            };
            let reference = load_checkpoint(open_reader(&ref_path)?)
                .with_context(|| format!("reading {}", ref_path.display()))?;
            let policy = match &args.init {
                Some(path) => load_checkpoint(open_reader(path)?)
                    .with_context(|| format!("reading {}", path.display()))?,
                None => reference.clone(),
            };
            let pairs = read_dpo_dataset(&dataset_path, &policy)?;
            let config = DpoConfig {
                beta,
                learning_rate: lr,
                max_steps: steps,
                seed: train_seed,
            };
            let (trained, log) = train_dpo(&policy, &reference, &pairs, &config)?;
            let margins = dpo_margins(&trained, &reference, &pairs, beta)?;
            let positive = margins.iter().filter(|&&m| m > 0.0).count();
            println!(
                "dpo: {} pairs, final loss {:.6}, mean margin {:.4}, {}/{} margins positive",
                pairs.len(),
                log.last().map_or(f64::NAN, |s| s.loss),
                margins.iter().sum::<f64>() / margins.len() as f64,
                positive,
                margins.len()
            );
            (trained, log)
        }
    };

    save_checkpoint(&trained, create_writer(&out_path)?)?;
    load_checkpoint(open_reader(&out_path)?)
        .with_context(|| format!("validating {}", out_path.display()))?;
    write_training_log(create_writer(&log_path)?, &log)?;
    println!("checkpoint written to {}", out_path.display());
    println!("training log written to {}", log_path.display());
    Ok(())
}

fn initial_policy(config: &FileConfig, args: &Args) -> Result<ToyPolicy> {
    if let Some(path) = &args.init {
        return load_checkpoint(open_reader(path)?)
            .with_context(|| format!("reading {}", path.display()));
    }
    let vocab_spec = match &args.vocab {
        Some(spec) => spec.clone(),
        None => config
            .get::<String>("vocab")?
            .unwrap_or_else(|| "a,b,c,d,e,</s>".to_owned()),
    };
    let eos_token = match &args.eos {
        Some(token) => token.clone(),
        None => config.get::<String>("eos")?.unwrap_or_else(|| "</s>".to_owned()),
    };
    let tokens: Vec<&str> = vocab_spec.split(',').map(str::trim).collect();
    let vocabulary = TokenVocabulary::new(tokens, &eos_token)?;
    Ok(ToyPolicy::uniform(
        vocabulary,
        config.resolve(args.context_order, "context-order", 1)?,
        config.resolve(args.max_length, "max-length", 4)?,
        config.resolve(args.conditions, "conditions", 1)?,
    )?)
}

fn read_sft_dataset(
    path: &std::path::Path,
    policy: &ToyPolicy,
) -> Result<Vec<(usize, Vec<usize>)>> {
    let mut dataset = Vec::new();
    for (idx, line) in open_reader(path)?.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: SftLine = serde_json::from_str(&line)
            .with_context(|| format!("{} line {}", path.display(), idx + 1))?;
        let tokens = policy
            .vocab()
            .encode(&parsed.tokens)
            .with_context(|| format!("{} line {}", path.display(), idx + 1))?;
        dataset.push((parsed.condition, tokens));
    }
    if dataset.is_empty() {
        bail!("dataset {} is empty", path.display());
    }
    Ok(dataset)
}

fn read_dpo_dataset(
    path: &std::path::Path,
    policy: &ToyPolicy,
) -> Result<Vec<TokenPreferencePair>> {
    let mut pairs = Vec::new();
    for (idx, line) in open_reader(path)?.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: DpoLine = serde_json::from_str(&line)
            .with_context(|| format!("{} line {}", path.display(), idx + 1))?;
        pairs.push(TokenPreferencePair {
            condition: parsed.condition,
            preferred: policy
                .vocab()
                .encode(&parsed.preferred)
                .with_context(|| format!("{} line {}", path.display(), idx + 1))?,
            dispreferred: policy
                .vocab()
                .encode(&parsed.dispreferred)
                .with_context(|| format!("{} line {}", path.display(), idx + 1))?,
        });
    }
    if pairs.is_empty() {
        bail!("dataset {} is empty", path.display());
    }
    Ok(pairs)
}
