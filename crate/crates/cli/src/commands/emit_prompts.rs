use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, ValueEnum};
use dcqg_core::eval::{read_questions_jsonl, render_judge_prompt, JudgeCriterion};
use dcqg_core::seed::derive_seed;

use super::{check_jsonl_lines, create_writer, open_reader};
use crate::config::FileConfig;

#[derive(Clone, Copy, ValueEnum)]
pub enum Criterion {
    Fluency,
    Relevance,
    Answerability,
    ReasoningType,
}

impl From<Criterion> for JudgeCriterion {
    fn from(value: Criterion) -> JudgeCriterion {
        match value {
            Criterion::Fluency => JudgeCriterion::Fluency,
            Criterion::Relevance => JudgeCriterion::Relevance,
            Criterion::Answerability => JudgeCriterion::Answerability,
            Criterion::ReasoningType => JudgeCriterion::ReasoningType,
        }
    }
}

#[derive(Parser)]
pub struct Args {
    /// Generated questions JSONL.
    #[arg(long)]
    questions: Option<PathBuf>,
    /// Which judge template to instantiate.
    #[arg(long, value_enum)]
    criterion: Criterion,
    /// Output JSONL: one prompt per parseable question, with the option
    /// shuffle logged.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: Args, config: &FileConfig, seed: u64) -> Result<()> {
    let questions_path = config.require_path(args.questions, "questions")?;
    let out_path = config.require_path(args.out, "out")?;
    let criterion: JudgeCriterion = args.criterion.into();

    let questions = read_questions_jsonl(open_reader(&questions_path)?)
        .with_context(|| format!("reading {}", questions_path.display()))?;
    let option_seed = derive_seed(seed, "judge");

    let mut writer = create_writer(&out_path)?;
    let mut written = 0usize;
    let mut skipped = 0usize;
    for question in &questions {
        if question.parsed().is_none() {
            skipped += 1;
            continue;
        }
        let prompt = render_judge_prompt(criterion, question, option_seed)?;
        serde_json::to_writer(&mut writer, &prompt)?;
        std::io::Write::write_all(&mut writer, b"\n")?;
        written += 1;
    }
    drop(writer);
    check_jsonl_lines(&out_path, written)?;

    println!(
        "emitted {written} {} prompts ({skipped} unparseable questions skipped)",
        criterion.name()
    );
    println!("written to {}", out_path.display());
    Ok(())
}
