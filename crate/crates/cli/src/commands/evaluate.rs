use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Parser;
use dcqg_core::dataset::{read_requests_jsonl, render_target_output, QuestionRecord};
use dcqg_core::eval::{
    administer, aggregate_quality, evaluate, parse_judge_verdict, read_questions_jsonl,
    reasoning_type_distribution, render_judge_prompt, run_judge_batch, write_questions_jsonl,
    EndpointConfig, EvaluationReport, GeneratedQuestion, JudgeCriterion, JudgePrompt,
    JudgeReport, JudgeVerdict, ReportConfig, VerdictScore,
};
use dcqg_core::rasch::{AbilityParams, ParameterSet, ResponseMatrix};
use dcqg_core::seed::{derive_seed, derive_stream};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{create_writer, open_reader};
use crate::config::FileConfig;

#[derive(Parser)]
pub struct Args {
    /// Generated questions JSONL (real mode).
    #[arg(long)]
    questions: Option<PathBuf>,
    /// Response matrix CSV for those questions (real mode).
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Parameter JSON carrying responder abilities (real mode).
    #[arg(long)]
    params: Option<PathBuf>,

    /// Generation requests JSONL (simulation mode).
    #[arg(long)]
    requests: Option<PathBuf>,
    /// Simulate a generator plus responder panel instead of ingesting data.
    #[arg(long)]
    simulate: bool,
    /// Generator control noise: latent difficulty = specified + N(0, sigma^2).
    #[arg(long)]
    noise_sigma: Option<f64>,
    /// Simulated responder count (abilities from N(0,1)).
    #[arg(long)]
    responders: Option<usize>,

    /// Report directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Reference ability for the theoretical curve (default: panel median).
    #[arg(long, allow_negative_numbers = true)]
    theta_ref: Option<f64>,

    /// Judge the questions over an HTTP endpoint.
    #[arg(long)]
    judge: bool,
    #[arg(long)]
    judge_url: Option<String>,
    #[arg(long)]
    judge_model: Option<String>,
    #[arg(long)]
    judge_temperature: Option<f64>,
    /// Cap on judged questions (they are taken in input order).
    #[arg(long)]
    judge_max_questions: Option<usize>,
    /// Fail instead of skipping when the judge endpoint is unusable.
    #[arg(long)]
    judge_required: bool,
}

pub fn run(args: Args, config: &FileConfig, seed: u64) -> Result<()> {
    let out_dir = config.require_path(args.out_dir.clone(), "out-dir")?;
    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))?;

    let (questions, matrix, panel) = if args.simulate {
        simulation_inputs(&args, config, seed, &out_dir)?
    } else {
        ingestion_inputs(&args, config)?
    };

    let report_config = ReportConfig {
        theta_ref: match args.theta_ref {
            Some(t) => Some(t),
            None => config.get("theta-ref")?,
        },
        ..ReportConfig::default()
    };
    let mut report = evaluate(&questions, &matrix, &panel, &report_config)?;

    if args.judge {
        match judge_questions(&args, config, seed, &questions) {
            Ok(judge_report) => report.judge = Some(judge_report),
            Err(error) if args.judge_required => {
                return Err(error.context("judging failed and --judge-required is set"));
            }
            Err(error) => {
                eprintln!("warning: judge section skipped: {error:#}");
            }
        }
    }

    let report_path = out_dir.join("report.json");
    report.write_json(create_writer(&report_path)?)?;
    let _: EvaluationReport = serde_json::from_reader(open_reader(&report_path)?)
        .with_context(|| format!("validating {}", report_path.display()))?;
    report.write_figure_csvs(&out_dir)?;

    println!(
        "evaluated {} questions over {} responders",
        report.question_count,
        matrix.n_responders()
    );
    let or_na = |v: Option<f64>| v.map_or("n/a".to_owned(), |x| format!("{x:.4}"));
    println!(
        "mae {:.4}, slope {}, correct-rate spearman {}, matched-ability fisher {:.4}",
        report.mae,
        or_na(report.regression_slope),
        or_na(report.correct_rate_spearman),
        report.mean_fisher_at_matched_ability
    );
    if report.unparsed_outputs > 0 || !report.dropped_questions.is_empty() {
        println!(
            "{} unparsed outputs, {} questions dropped from grading",
            report.unparsed_outputs,
            report.dropped_questions.len()
        );
    }
    match &report.judge {
        Some(judge) => println!(
            "judge: {} quality rows, {} reasoning verdicts parsed",
            judge.quality.len(),
            judge.reasoning_parsed
        ),
        None if args.judge => println!("judge: skipped"),
        None => {}
    }
    println!("report written to {}", out_dir.display());
    Ok(())
}

fn ingestion_inputs(
    args: &Args,
    config: &FileConfig,
) -> Result<(Vec<GeneratedQuestion>, ResponseMatrix, AbilityParams)> {
    let questions_path = config.require_path(args.questions.clone(), "questions")?;
    let matrix_path = config.require_path(args.matrix.clone(), "matrix")?;
    let params_path = config.require_path(args.params.clone(), "params")?;
    let questions = read_questions_jsonl(open_reader(&questions_path)?)
        .with_context(|| format!("reading {}", questions_path.display()))?;
    let matrix = ResponseMatrix::read_csv(open_reader(&matrix_path)?)
        .with_context(|| format!("reading {}", matrix_path.display()))?;
    let set = ParameterSet::read_json(open_reader(&params_path)?)
        .with_context(|| format!("reading {}", params_path.display()))?;
    Ok((questions, matrix, set.responders))
}

/// Synthesizes a generator with Gaussian control noise and a standard-normal
/// responder panel, then administers the questions. The synthesized
/// questions and matrix are written next to the report.
fn simulation_inputs(
    args: &Args,
    config: &FileConfig,
    seed: u64,
    out_dir: &Path,
) -> Result<(Vec<GeneratedQuestion>, ResponseMatrix, AbilityParams)> {
    let requests_path = config.require_path(args.requests.clone(), "requests")?;
    let noise_sigma = config.resolve(args.noise_sigma, "noise-sigma", 0.5)?;
    let n_responders = config.resolve(args.responders, "responders", 77)?;

    let requests = read_requests_jsonl(open_reader(&requests_path)?)
        .with_context(|| format!("reading {}", requests_path.display()))?;
    if requests.is_empty() {
        bail!("no requests in {}", requests_path.display());
    }

    let noise_seed = derive_seed(seed, "generator-noise");
    let standard = Normal::new(0.0, 1.0).expect("unit normal");
    let questions: Vec<GeneratedQuestion> = requests
        .iter()
        .enumerate()
        .map(|(idx, request)| {
            let question_id = format!("g{idx:06}");
            let passage = passage_of_prompt(&request.prompt).unwrap_or(&request.prompt);
            let latent = if noise_sigma > 0.0 {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_stream(noise_seed, idx as u64));
                request.specified_difficulty.to_logit()
                    + noise_sigma * standard.sample(&mut rng)
            } else {
                request.specified_difficulty.to_logit()
            };
            let record = QuestionRecord {
                record_id: question_id.clone(),
                passage_id: request.passage_id.clone(),
                passage: passage.to_owned(),
                question: format!(
                    "Simulated question {idx} at level {}?",
                    request.specified_difficulty
                ),
                answer: format!("correct option {idx}"),
                distractors: [
                    format!("distractor {idx}-1"),
                    format!("distractor {idx}-2"),
                    format!("distractor {idx}-3"),
                ],
            };
            GeneratedQuestion {
                question_id,
                passage_id: request.passage_id.clone(),
                specified_difficulty: request.specified_difficulty,
                passage: passage.to_owned(),
                output: render_target_output(&record),
                latent_difficulty: Some(latent.clamp(-6.0, 6.0)),
            }
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "panel"));
    let panel = AbilityParams::from_abilities(
        (0..n_responders).map(|r| (format!("r{r:04}"), standard.sample(&mut rng))),
    );
    let matrix = administer(&questions, &panel, derive_seed(seed, "administer"))?;

    let questions_path = out_dir.join("questions.jsonl");
    write_questions_jsonl(create_writer(&questions_path)?, &questions)?;
    let matrix_path = out_dir.join("matrix.csv");
    matrix.write_csv(create_writer(&matrix_path)?)?;

    Ok((questions, matrix, panel))
}

/// Inverse of the generation-prompt template: the text between the Context
/// header and the Response scaffold.
fn passage_of_prompt(prompt: &str) -> Option<&str> {
    let (_, rest) = prompt.split_once("### Context: ")?;
    let (passage, _) = rest.rsplit_once("\n\n### Response:")?;
    Some(passage)
}

fn judge_questions(
    args: &Args,
    config: &FileConfig,
    seed: u64,
    questions: &[GeneratedQuestion],
) -> Result<JudgeReport> {
    let url = match args.judge_url.clone() {
        Some(url) => url,
        None => config
            .get::<String>("judge-url")?
            .context("missing --judge-url (or config key judge-url)")?,
    };
    let endpoint = EndpointConfig {
        url,
        model: match args.judge_model.clone() {
            Some(model) => model,
            None => config
                .get::<String>("judge-model")?
                .unwrap_or_else(|| EndpointConfig::default().model),
        },
        temperature: config.resolve(args.judge_temperature, "judge-temperature", 0.0)?,
        ..EndpointConfig::default()
    };
    let cap = config.resolve(args.judge_max_questions, "judge-max-questions", usize::MAX)?;

    let judged: Vec<&GeneratedQuestion> = questions
        .iter()
        .filter(|q| q.parsed().is_some())
        .take(cap)
        .collect();
    if judged.is_empty() {
        bail!("no parseable questions to judge");
    }

    let option_seed = derive_seed(seed, "judge");
    let mut prompts: Vec<JudgePrompt> = Vec::new();
    for question in &judged {
        for criterion in JudgeCriterion::ALL {
            prompts.push(render_judge_prompt(criterion, question, option_seed)?);
        }
    }

    let texts: Vec<String> = prompts.iter().map(|p| p.text.clone()).collect();
    let outcomes = run_judge_batch(&endpoint, &texts);

    // an endpoint that never succeeds is "unusable", not partially parsed
    if outcomes.iter().all(|o| o.is_err()) {
        let first = outcomes.into_iter().next().expect("nonempty").unwrap_err();
        return Err(anyhow::Error::new(first).context("every judge call failed"));
    }

    let verdicts: Vec<JudgeVerdict> = prompts
        .iter()
        .zip(outcomes)
        .map(|(prompt, outcome)| match outcome {
            Ok(raw) => parse_judge_verdict(prompt.criterion, &raw),
            Err(error) => JudgeVerdict {
                criterion: prompt.criterion,
                raw: format!("<call failed: {error}>"),
                score: VerdictScore::Unparseable,
            },
        })
        .collect();

    let quality = aggregate_quality(&verdicts);
    let reasoning = reasoning_type_distribution(&verdicts);
    Ok(JudgeReport::from_aggregates(&quality, &reasoning))
}
