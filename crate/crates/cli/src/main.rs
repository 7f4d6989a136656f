mod commands;
mod config;

use clap::{Parser, Subcommand};

use crate::config::FileConfig;

/// Difficulty-controllable question generation pipeline.
///
/// Every stage reads and writes plain files (CSV response matrices, JSON
/// parameter sets and checkpoints, JSONL corpora). All randomness derives
/// from the single `--seed` flag through per-stage labels, so reruns with
/// identical inputs produce byte-identical outputs.
#[derive(Parser)]
#[command(name = "dcqg", version, about, max_term_width = 100)]
struct Cli {
    /// Flat key=value config file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<std::path::PathBuf>,

    /// Base seed for every seeded stage.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate item difficulties (MML) and responder abilities (MLE) from a
    /// response matrix.
    Calibrate(commands::calibrate::Args),
    /// Attach estimated difficulties to a question corpus.
    Annotate(commands::annotate::Args),
    /// Keep QA systems whose accuracy clears a threshold.
    FilterQa(commands::filter_qa::Args),
    /// Build DPO preference pairs from an annotated corpus.
    BuildPairs(commands::build_pairs::Args),
    /// Render generation requests over a difficulty grid.
    Requests(commands::requests::Args),
    /// Check a pair file against its source corpus.
    VerifyPairs(commands::verify_pairs::Args),
    /// Train the toy policy with SFT or DPO.
    Train(commands::train::Args),
    /// Score generated questions: correct rates, difficulty recovery,
    /// Fisher information, and optional LLM judging.
    Evaluate(commands::evaluate::Args),
    /// Generate a synthetic response matrix with known parameters.
    Simulate(commands::simulate::Args),
    /// Render judge prompts for generated questions.
    EmitPrompts(commands::emit_prompts::Args),
}

fn main() {
    let cli = Cli::parse();
    let outcome = FileConfig::load(cli.config.as_deref()).and_then(|config| {
        let seed = match cli.seed {
            Some(seed) => seed,
            None => config.get("seed").unwrap_or(None).unwrap_or(0),
        };
        match cli.command {
            Command::Calibrate(args) => commands::calibrate::run(args, &config),
            Command::Annotate(args) => commands::annotate::run(args, &config),
            Command::FilterQa(args) => commands::filter_qa::run(args, &config),
            Command::BuildPairs(args) => commands::build_pairs::run(args, &config, seed),
            Command::Requests(args) => commands::requests::run(args, &config),
            Command::VerifyPairs(args) => commands::verify_pairs::run(args, &config),
            Command::Train(args) => commands::train::run(args, &config, seed),
            Command::Evaluate(args) => commands::evaluate::run(args, &config, seed),
            Command::Simulate(args) => commands::simulate::run(args, &config, seed),
            Command::EmitPrompts(args) => commands::emit_prompts::run(args, &config, seed),
        }
    });
    if let Err(error) = outcome {
        eprintln!("dcqg: {error:#}");
        std::process::exit(1);
    }
}
