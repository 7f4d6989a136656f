//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with the measured values. Run with
//! `cargo test --test acceptance -- --nocapture` to see them.

mod support;

use std::time::{Duration, Instant};

use dcqg_core::dataset::{
    build_dpo_pairs, build_generation_requests, parse_model_output, render_generation_prompt,
    render_target_output, verify_pairs, AnnotatedRecord, QuestionRecord, TAGS,
};
use dcqg_core::eval::{
    administer, aggregate_quality, call_judge, evaluate, parse_judge_verdict,
    render_judge_prompt, EndpointConfig, EvalError, GeneratedQuestion, JudgeCriterion,
    ReportConfig, VerdictScore,
};
use dcqg_core::grid::Tenths;
use dcqg_core::policy::{
    dpo_gradient, dpo_loss, enumerate_outputs, implicit_reward, kl_regularized_optimum,
    rlhf_objective, rlhf_objective_of_distribution, train_dpo, DpoConfig, OutputDistribution,
    RewardSpec, TokenPreferencePair, TokenVocabulary, ToyPolicy,
};
use dcqg_core::rasch::{
    estimate_abilities_mle, estimate_difficulties_mml, fisher_information, prob_correct,
    simulate_responses, AbilityParams, EmConfig, ItemParams, QuadratureGrid,
};
use dcqg_core::seed::{derive_seed, derive_stream};
use dcqg_core::stats::{pearson, rmse, spearman};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use support::{StubResponse, StubServer};

fn within_budget(started: Instant, budget: Duration, label: &str) {
    let elapsed = started.elapsed();
    assert!(
        elapsed < budget,
        "{label} took {elapsed:?}, over the {budget:?} budget"
    );
}

#[test]
fn criterion_01_rasch_fidelity() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..1000 {
        let point: f64 = rng.random_range(-6.0..6.0);
        let p = prob_correct(point, point).unwrap();
        let information = fisher_information(point, point).unwrap();
        assert!((p - 0.5).abs() <= 1e-12, "prob at matched ability: {p}");
        assert!((information - 0.25).abs() <= 1e-12, "information: {information}");
    }
    within_budget(started, Duration::from_secs(1), "criterion 1");
    println!("criterion 1 PASS: prob_correct(theta=b)=0.5 and F(theta=b)=0.25 to 1e-12 at 1000 points");
}

#[test]
fn criterion_02_parameter_recovery() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20260809);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let thetas: Vec<f64> = (0..77).map(|_| normal.sample(&mut rng)).collect();
    let bs: Vec<f64> = (0..100).map(|_| rng.random_range(-3.0..3.0)).collect();
    let abilities = AbilityParams::from_abilities(
        thetas.iter().enumerate().map(|(r, &t)| (format!("r{r:03}"), t)),
    );
    let items = ItemParams::from_difficulties(
        bs.iter().enumerate().map(|(i, &b)| (format!("q{i:03}"), b)),
    );
    let matrix = simulate_responses(&abilities, &items, 20260809 ^ 0x5eed).unwrap();

    let estimated_items =
        estimate_difficulties_mml(&matrix, &QuadratureGrid::default(), &EmConfig::default())
            .unwrap();
    let estimated_b: Vec<f64> = matrix
        .item_ids()
        .iter()
        .map(|id| estimated_items.difficulty[id])
        .collect();
    let difficulty_r = pearson(&bs, &estimated_b);
    let difficulty_rmse = rmse(&bs, &estimated_b);
    assert!(difficulty_r >= 0.9, "difficulty correlation {difficulty_r}");
    assert!(difficulty_rmse <= 0.45, "difficulty rmse {difficulty_rmse}");

    let recovered = estimate_abilities_mle(&matrix, &estimated_items).unwrap();
    let truth: Vec<f64> = matrix
        .responder_ids()
        .iter()
        .map(|id| abilities.ability[id])
        .collect();
    let estimated_theta: Vec<f64> = matrix
        .responder_ids()
        .iter()
        .map(|id| recovered.ability[id])
        .collect();
    let ability_r = pearson(&truth, &estimated_theta);
    assert!(ability_r >= 0.85, "ability correlation {ability_r}");

    within_budget(started, Duration::from_secs(30), "criterion 2");
    println!(
        "criterion 2 PASS: 77x100 recovery, difficulty r={difficulty_r:.3} rmse={difficulty_rmse:.3}, ability r={ability_r:.3}"
    );
}

#[test]
fn criterion_03_dpo_correctness() {
    let started = Instant::now();

    // (a) loss at the reference is ln 2 for random pair sets
    const LN_2: f64 = std::f64::consts::LN_2;
    for round in 0..100u64 {
        let reference =
            ToyPolicy::seeded_random(TokenVocabulary::default_toy(), 1, 4, 1, 1.0, 300 + round)
                .unwrap();
        let policy = reference.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(round);
        let pairs: Vec<TokenPreferencePair> = (0..8)
            .map(|_| loop {
                let a = reference.sample(0, &mut rng).unwrap();
                let b = reference.sample(0, &mut rng).unwrap();
                if a != b {
                    break TokenPreferencePair { condition: 0, preferred: a, dispreferred: b };
                }
            })
            .collect();
        let beta = 0.05 + 0.01 * round as f64;
        let loss = dpo_loss(&policy, &reference, &pairs, beta).unwrap();
        assert!((loss - LN_2).abs() <= 1e-12, "round {round}: loss {loss}");
    }

    // (b) analytic gradient equals central differences on every coordinate
    // of a 6-token, length-4 policy
    let reference =
        ToyPolicy::seeded_random(TokenVocabulary::default_toy(), 1, 4, 1, 0.6, 51).unwrap();
    let mut policy =
        ToyPolicy::seeded_random(TokenVocabulary::default_toy(), 1, 4, 1, 0.6, 52).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    let pairs: Vec<TokenPreferencePair> = (0..12)
        .map(|_| loop {
            let a = reference.sample(0, &mut rng).unwrap();
            let b = reference.sample(0, &mut rng).unwrap();
            if a != b {
                break TokenPreferencePair { condition: 0, preferred: a, dispreferred: b };
            }
        })
        .collect();
    let beta = 0.4;
    let grad = dpo_gradient(&policy, &reference, &pairs, beta).unwrap();
    let h = 1e-5;
    for state in 0..policy.n_states() {
        for token in 0..policy.vocab().len() {
            let base = policy.logit(0, state, token);
            policy.set_logit(0, state, token, base + h).unwrap();
            let up = dpo_loss(&policy, &reference, &pairs, beta).unwrap();
            policy.set_logit(0, state, token, base - h).unwrap();
            let down = dpo_loss(&policy, &reference, &pairs, beta).unwrap();
            policy.set_logit(0, state, token, base).unwrap();
            let fd = (up - down) / (2.0 * h);
            let analytic = grad[0][state][token];
            let denom = analytic.abs().max(fd.abs()).max(1e-8);
            assert!(
                (analytic - fd).abs() / denom < 1e-5,
                "({state},{token}): analytic {analytic} vs fd {fd}"
            );
        }
    }

    // (c) Bradley-Terry pairs from a known reward; the trained implicit
    // reward must rank-agree with the truth over the whole output space
    let vocab = TokenVocabulary::new(vec!["p", "q", "</s>"], "</s>").unwrap();
    let reference = ToyPolicy::uniform(vocab.clone(), 3, 3, 1).unwrap();
    let outputs = enumerate_outputs(&vocab, 3, 1_000_000).unwrap();
    let n_outputs = outputs.len();
    let reward_of = |idx: usize| -3.0 + 6.0 * idx as f64 / (n_outputs - 1) as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(2718);
    let mut pairs = Vec::with_capacity(200);
    while pairs.len() < 200 {
        let i = rng.random_range(0..n_outputs);
        let j = rng.random_range(0..n_outputs);
        if i == j {
            continue;
        }
        let p_prefer_i = 1.0 / (1.0 + (reward_of(j) - reward_of(i)).exp());
        let (w, l) = if rng.random::<f64>() < p_prefer_i { (i, j) } else { (j, i) };
        pairs.push(TokenPreferencePair {
            condition: 0,
            preferred: outputs[w].clone(),
            dispreferred: outputs[l].clone(),
        });
    }
    let config = DpoConfig { beta: 1.0, learning_rate: 0.8, max_steps: 4000, seed: 0 };
    let (trained, _) = train_dpo(&reference, &reference, &pairs, &config).unwrap();
    let implicit: Vec<f64> = outputs
        .iter()
        .map(|y| implicit_reward(&trained, &reference, 0, y, config.beta).unwrap())
        .collect();
    let truth: Vec<f64> = (0..n_outputs).map(reward_of).collect();
    let rho = spearman(&implicit, &truth);
    assert!(rho >= 0.9, "spearman {rho}");

    within_budget(started, Duration::from_secs(60), "criterion 3");
    println!(
        "criterion 3 PASS: ln2 at reference (1e-12), gradient matches FD (1e-5 rel), BT spearman {rho:.3}"
    );
}

#[test]
fn criterion_04_rlhf_dpo_bridge() {
    let started = Instant::now();
    // default toy space: 781 outputs, under the 4096 cap
    let vocab = TokenVocabulary::default_toy();
    let reference = ToyPolicy::seeded_random(vocab.clone(), 1, 4, 1, 0.7, 4001).unwrap();
    let outputs = enumerate_outputs(&vocab, 4, 4096).unwrap();
    assert!(outputs.len() <= 4096);
    let mut spec = RewardSpec::new(0.5);
    for (idx, y) in outputs.iter().enumerate() {
        spec.set_difficulty(y.clone(), -3.0 + 6.0 * idx as f64 / (outputs.len() - 1) as f64);
    }
    let beta = 0.3;
    let optimum = kl_regularized_optimum(&reference, 0, &spec, beta).unwrap();
    let ref_dist = OutputDistribution::of_policy(&reference, 0).unwrap();
    let best = rlhf_objective_of_distribution(&optimum, &ref_dist, &spec, beta).unwrap();

    let ref_value = rlhf_objective(&reference, &reference, 0, &spec, beta).unwrap();
    assert!(best + 1e-12 >= ref_value, "reference beat the optimum");
    let mut strict_wins = 0;
    for seed in 0..100 {
        let rival = ToyPolicy::seeded_random(vocab.clone(), 1, 4, 1, 1.0, 5000 + seed).unwrap();
        let value = rlhf_objective(&rival, &reference, 0, &spec, beta).unwrap();
        assert!(best + 1e-12 >= value, "random policy {seed} beat the optimum");
        if best > value {
            strict_wins += 1;
        }
    }
    assert_eq!(strict_wins, 100);
    within_budget(started, Duration::from_secs(10), "criterion 4");
    println!(
        "criterion 4 PASS: closed-form optimum dominates the reference and 100 random policies on {} outputs",
        outputs.len()
    );
}

fn simulated_pipeline_report(
    passages: usize,
    noise_sigma: f64,
    responders: usize,
    seed: u64,
) -> dcqg_core::eval::EvaluationReport {
    let records: Vec<QuestionRecord> = (0..passages)
        .map(|p| QuestionRecord {
            record_id: format!("r{p:04}"),
            passage_id: format!("p{p:04}"),
            passage: format!("Passage {p} describes scene {p} in plain words."),
            question: format!("What does passage {p} describe?"),
            answer: format!("scene {p}"),
            distractors: [
                format!("scene {p} alt one"),
                format!("scene {p} alt two"),
                format!("scene {p} alt three"),
            ],
        })
        .collect();
    let requests = build_generation_requests(&records, None, -3.0, 3.0, 0.1).unwrap();
    assert_eq!(requests.len(), passages * 61);

    let noise_seed = derive_seed(seed, "generator-noise");
    let standard = Normal::new(0.0, 1.0).unwrap();
    let questions: Vec<GeneratedQuestion> = requests
        .iter()
        .enumerate()
        .map(|(idx, request)| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_stream(noise_seed, idx as u64));
            let latent = request.specified_difficulty.to_logit()
                + noise_sigma * standard.sample(&mut rng);
            let record = QuestionRecord {
                record_id: format!("g{idx:06}"),
                passage_id: request.passage_id.clone(),
                passage: "passage body".into(),
                question: format!("Synthetic question {idx}?"),
                answer: format!("answer {idx}"),
                distractors: [
                    format!("foil {idx}-1"),
                    format!("foil {idx}-2"),
                    format!("foil {idx}-3"),
                ],
            };
            GeneratedQuestion {
                question_id: format!("g{idx:06}"),
                passage_id: request.passage_id.clone(),
                specified_difficulty: request.specified_difficulty,
                passage: record.passage.clone(),
                output: render_target_output(&record),
                latent_difficulty: Some(latent.clamp(-6.0, 6.0)),
            }
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "panel"));
    let panel = AbilityParams::from_abilities(
        (0..responders).map(|r| (format!("r{r:04}"), standard.sample(&mut rng))),
    );
    let matrix = administer(&questions, &panel, derive_seed(seed, "administer")).unwrap();
    evaluate(&questions, &matrix, &panel, &ReportConfig::default()).unwrap()
}

#[test]
fn criterion_05_pipeline_end_to_end() {
    let started = Instant::now();
    let report = simulated_pipeline_report(50, 0.5, 77, 424242);
    assert_eq!(report.question_count, 50 * 61);
    assert!(
        (0.3..=0.6).contains(&report.mae),
        "mae {} outside [0.3, 0.6]",
        report.mae
    );
    let slope = report.regression_slope.unwrap();
    assert!((0.85..=1.15).contains(&slope), "slope {slope}");
    let rho = report.correct_rate_spearman.unwrap();
    assert!(rho <= -0.95, "correct-rate spearman {rho}");
    within_budget(started, Duration::from_secs(300), "criterion 5");
    println!(
        "criterion 5 PASS: 61-grid x 50 passages, sigma 0.5 -> mae {:.3}, slope {:.3}, spearman {:.3}",
        report.mae, slope, rho
    );
}

#[test]
fn criterion_06_headline_numbers_not_desk_reproducible() {
    // The published MAE drop (1.41 -> 1.07) and matched-ability Fisher gain
    // (0.163 -> 0.186) came from fine-tuned 8B models on RACE; no desk run
    // reproduces them. Substitute check: two simulated generators with noise
    // calibrated to those MAE levels must order the matched-ability Fisher
    // the same way, below the 0.25 ceiling.
    let half_pi_sqrt = (std::f64::consts::PI / 2.0).sqrt();
    let sft_like = simulated_pipeline_report(30, 1.41 * half_pi_sqrt, 77, 61_000);
    let dpo_like = simulated_pipeline_report(30, 1.07 * half_pi_sqrt, 77, 61_001);

    assert!(
        dpo_like.mean_fisher_at_matched_ability > sft_like.mean_fisher_at_matched_ability,
        "lower-noise run must score higher: {} vs {}",
        dpo_like.mean_fisher_at_matched_ability,
        sft_like.mean_fisher_at_matched_ability
    );
    assert!(sft_like.mean_fisher_at_matched_ability < 0.25);
    assert!(dpo_like.mean_fisher_at_matched_ability < 0.25);
    println!(
        "criterion 6 PASS: noise at MAE 1.41 / 1.07 -> matched fisher {:.3} < {:.3} < 0.25 (observed mae {:.2} / {:.2})",
        sft_like.mean_fisher_at_matched_ability,
        dpo_like.mean_fisher_at_matched_ability,
        sft_like.mae,
        dpo_like.mae
    );
}

#[test]
fn criterion_07_format_fidelity() {
    let started = Instant::now();
    let record = QuestionRecord {
        record_id: "golden-q1".into(),
        passage_id: "golden-p1".into(),
        passage: "Sunlight warms the stone bench by the gate each morning.".into(),
        question: "What warms the bench?".into(),
        answer: "Sunlight".into(),
        distractors: ["Rainfall".into(), "Moonlight".into(), "The wind".into()],
    };
    assert_eq!(
        render_generation_prompt(&record.passage, -2.0),
        include_str!("golden/generation_prompt.txt")
    );
    assert_eq!(render_target_output(&record), include_str!("golden/target_output.txt"));
    let question = GeneratedQuestion {
        question_id: "golden-q1".into(),
        passage_id: record.passage_id.clone(),
        specified_difficulty: Tenths(-20),
        passage: record.passage.clone(),
        output: render_target_output(&record),
        latent_difficulty: None,
    };
    for (criterion, golden) in [
        (JudgeCriterion::Fluency, include_str!("golden/judge_fluency.txt")),
        (JudgeCriterion::Relevance, include_str!("golden/judge_relevance.txt")),
        (JudgeCriterion::Answerability, include_str!("golden/judge_answerability.txt")),
        (JudgeCriterion::ReasoningType, include_str!("golden/judge_reasoning.txt")),
    ] {
        assert_eq!(
            render_judge_prompt(criterion, &question, 0).unwrap().text,
            golden,
            "{criterion:?}"
        );
    }

    // 10k fuzzed records survive the render/parse round trip
    let mut rng = ChaCha8Rng::seed_from_u64(0x7007);
    let field = |rng: &mut ChaCha8Rng| loop {
        let len = rng.random_range(1..40);
        let text: String =
            (0..len).map(|_| char::from(rng.random_range(0x20u8..0x7f))).collect();
        let trimmed = text.trim();
        if !trimmed.is_empty() && TAGS.iter().all(|tag| !trimmed.contains(tag)) {
            return trimmed.to_owned();
        }
    };
    for case in 0..10_000 {
        let fuzzed = QuestionRecord {
            record_id: format!("f{case}"),
            passage_id: "p".into(),
            passage: field(&mut rng),
            question: field(&mut rng),
            answer: field(&mut rng),
            distractors: [field(&mut rng), field(&mut rng), field(&mut rng)],
        };
        let parsed = parse_model_output(&render_target_output(&fuzzed)).unwrap();
        assert_eq!(parsed.answer, fuzzed.answer);
        assert_eq!(parsed.question, fuzzed.question);
        assert_eq!(parsed.distractors, fuzzed.distractors);
    }
    within_budget(started, Duration::from_secs(10), "criterion 7");
    println!("criterion 7 PASS: all six templates byte-exact; 10000-record round trip holds");
}

#[test]
fn criterion_08_pair_builder() {
    // 250 passages x 4 questions plus 20 single-question passages
    let mut records = Vec::new();
    for p in 0..250 {
        for q in 0..4 {
            records.push(AnnotatedRecord {
                record: QuestionRecord {
                    record_id: format!("rec{p:03}_{q}"),
                    passage_id: format!("p{p:03}"),
                    passage: format!("passage {p}"),
                    question: format!("Question {q} of {p}?"),
                    answer: format!("answer {p}-{q}"),
                    distractors: [
                        format!("foil {p}-{q}-1"),
                        format!("foil {p}-{q}-2"),
                        format!("foil {p}-{q}-3"),
                    ],
                },
                difficulty: (p as f64) / 50.0 - 2.5,
                converged: true,
            });
        }
    }
    for p in 0..20 {
        records.push(AnnotatedRecord {
            record: QuestionRecord {
                record_id: format!("solo{p:02}"),
                passage_id: format!("solo-p{p:02}"),
                passage: "lone passage".into(),
                question: "The only question?".into(),
                answer: "yes".into(),
                distractors: ["no".into(), "maybe".into(), "unclear".into()],
            },
            difficulty: 0.0,
            converged: true,
        });
    }

    let output = build_dpo_pairs(&records, 8080);
    assert_eq!(output.pairs.len(), 1000, "multi-question records each yield one pair");
    assert_eq!(output.skipped_record_ids.len(), 20);
    assert_eq!(verify_pairs(&output.pairs, &records).unwrap(), 1000);
    for pair in &output.pairs {
        assert_ne!(pair.source_record_id, pair.dispreferred_record_id);
        assert_ne!(pair.preferred, pair.dispreferred);
    }
    let rerun = build_dpo_pairs(&records, 8080);
    assert_eq!(rerun.pairs, output.pairs, "same seed must be byte-identical");
    println!("criterion 8 PASS: 1000/1020 records paired, invariants verified, reruns identical");
}

#[test]
fn criterion_09_judge_client_and_table2() {
    // success
    let server = StubServer::start(vec![StubResponse::chat("1")]);
    std::env::set_var("JUDGE_KEY_ACCEPT_OK", "k");
    let config = EndpointConfig {
        url: server.url(),
        api_key_env: "JUDGE_KEY_ACCEPT_OK".into(),
        initial_backoff_ms: 1,
        ..EndpointConfig::default()
    };
    assert_eq!(call_judge(&config, "score this").unwrap(), "1");
    assert_eq!(server.request_count(), 1);
    drop(server);

    // retry after 429
    let server = StubServer::start(vec![
        StubResponse::status(429, "busy"),
        StubResponse::chat("0"),
    ]);
    std::env::set_var("JUDGE_KEY_ACCEPT_RETRY", "k");
    let config = EndpointConfig {
        url: server.url(),
        api_key_env: "JUDGE_KEY_ACCEPT_RETRY".into(),
        initial_backoff_ms: 1,
        ..EndpointConfig::default()
    };
    assert_eq!(call_judge(&config, "score this").unwrap(), "0");
    assert_eq!(server.request_count(), 2);
    drop(server);

    // no retry on auth failure
    let server = StubServer::start(vec![StubResponse::status(401, "who are you")]);
    std::env::set_var("JUDGE_KEY_ACCEPT_AUTH", "k");
    let config = EndpointConfig {
        url: server.url(),
        api_key_env: "JUDGE_KEY_ACCEPT_AUTH".into(),
        initial_backoff_ms: 1,
        ..EndpointConfig::default()
    };
    assert!(matches!(
        call_judge(&config, "score this").unwrap_err(),
        EvalError::Auth { status: 401 }
    ));
    assert_eq!(server.request_count(), 1);

    // Table 2 style aggregation: 91 ones of 100 -> 0.91 +/- 0.286
    let verdicts: Vec<_> = (0..100)
        .map(|k| {
            parse_judge_verdict(JudgeCriterion::Answerability, if k < 91 { "1" } else { "0" })
        })
        .collect();
    assert!(verdicts.iter().all(|v| matches!(v.score, VerdictScore::Score(_))));
    let row = aggregate_quality(&verdicts)[&JudgeCriterion::Answerability];
    assert!((row.mean - 0.91).abs() <= 1e-12);
    assert!((row.std - 0.286).abs() <= 5e-4, "std {}", row.std);
    println!(
        "criterion 9 PASS: stub success/retry/auth paths hold; aggregation gives {:.2} +/- {:.3}",
        row.mean, row.std
    );
}
