//! Evaluation report assembly and the per-figure CSV outputs.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    correct_rate_curve, estimate_generated_difficulties, fisher_curve_group,
    mae_difficulty, mean_fisher_at_matched_ability, theoretical_curve, EvalError,
    GeneratedQuestion, QualitySummary, ReasoningDistribution,
};
use crate::grid::Tenths;
use crate::rasch::{AbilityParams, ResponseMatrix};
use crate::stats;

#[derive(Debug, Clone)]
pub struct ReportConfig {
    /// Reference ability for the theoretical curve; defaults to the panel's
    /// median ability.
    pub theta_ref: Option<f64>,
    /// Specified-difficulty groups whose Fisher curves go into the report.
    pub fisher_groups: Vec<Tenths>,
    /// Ability grid for those curves.
    pub theta_grid: Vec<f64>,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            theta_ref: None,
            fisher_groups: vec![Tenths(-20), Tenths(0), Tenths(20)],
            theta_grid: (-30..=30).map(|t| f64::from(t) / 5.0).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinSummary {
    pub specified_difficulty: f64,
    pub correct_rate: Option<f64>,
    pub observations: usize,
    pub theoretical_rate: f64,
    pub mean_estimated_difficulty: Option<f64>,
    pub question_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FisherPoint {
    pub theta: f64,
    pub mean_information: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FisherCurve {
    pub group: f64,
    pub points: Vec<FisherPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DroppedQuestion {
    pub question_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityRow {
    pub criterion: String,
    pub mean: f64,
    pub std: f64,
    pub parsed: usize,
    pub unparseable: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReasoningRow {
    pub category: String,
    pub proportion: f64,
}

/// Judge outcomes; absent from the report when judging was skipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgeReport {
    pub quality: Vec<QualityRow>,
    pub reasoning: Vec<ReasoningRow>,
    pub reasoning_parsed: usize,
    pub reasoning_unparseable: usize,
}

impl JudgeReport {
    pub fn from_aggregates(
        quality: &QualitySummary,
        reasoning: &ReasoningDistribution,
    ) -> Self {
        JudgeReport {
            quality: quality
                .iter()
                .map(|(criterion, row)| QualityRow {
                    criterion: criterion.name().to_owned(),
                    mean: row.mean,
                    std: row.std,
                    parsed: row.parsed,
                    unparseable: row.unparseable,
                })
                .collect(),
            reasoning: reasoning
                .proportions
                .iter()
                .map(|(category, &proportion)| ReasoningRow {
                    category: category.name().to_owned(),
                    proportion,
                })
                .collect(),
            reasoning_parsed: reasoning.parsed,
            reasoning_unparseable: reasoning.unparseable,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub question_count: usize,
    pub unparsed_outputs: usize,
    pub theta_ref: f64,
    pub bins: Vec<BinSummary>,
    pub mae: f64,
    /// Absent when fewer than two distinct specified difficulties exist.
    pub regression_slope: Option<f64>,
    /// Absent when fewer than two bins have observed rates.
    pub correct_rate_spearman: Option<f64>,
    pub mean_fisher_at_matched_ability: f64,
    pub fisher_curves: Vec<FisherCurve>,
    pub clamped_estimates: usize,
    pub dropped_questions: Vec<DroppedQuestion>,
    pub empty_bins: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub judge: Option<JudgeReport>,
}

/// Computes the difficulty-control metrics for graded questions: correct
/// rates and the theoretical curve per bin, re-estimated difficulties with
/// MAE and regression slope, and Fisher summaries. Judge results can be
/// attached afterwards.
pub fn evaluate(
    questions: &[GeneratedQuestion],
    matrix: &ResponseMatrix,
    responders: &AbilityParams,
    config: &ReportConfig,
) -> Result<EvaluationReport, EvalError> {
    if questions.is_empty() {
        return Err(EvalError::EmptyInput("questions"));
    }
    let unparsed_outputs = questions.iter().filter(|q| q.parsed().is_none()).count();

    let estimates = estimate_generated_difficulties(matrix, responders)?;
    let clamped_estimates = estimates.estimates.values().filter(|e| e.clamped).count();

    // per-question (specified, estimated) pairs and per-bin grouping
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    let mut by_bin: BTreeMap<Tenths, Vec<f64>> = BTreeMap::new();
    let mut question_counts: BTreeMap<Tenths, usize> = BTreeMap::new();
    for question in questions {
        *question_counts.entry(question.specified_difficulty).or_default() += 1;
        if let Some(estimate) = estimates.estimates.get(&question.question_id) {
            pairs.push((question.specified_difficulty.to_logit(), estimate.difficulty));
            by_bin
                .entry(question.specified_difficulty)
                .or_default()
                .push(estimate.difficulty);
        }
    }
    let mae = mae_difficulty(&pairs)?;
    let (spec_values, est_values): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
    let regression_slope = finite(stats::linear_slope(&spec_values, &est_values));

    let curve = correct_rate_curve(matrix, questions)?;
    let theta_ref = config.theta_ref.unwrap_or_else(|| median_ability(responders));
    let bin_logits: Vec<f64> = question_counts.keys().map(|t| t.to_logit()).collect();
    let theoretical = theoretical_curve(theta_ref, &bin_logits)?;

    let rate_xs: Vec<f64> = curve.points.keys().map(|t| t.to_logit()).collect();
    let rate_ys: Vec<f64> = curve.points.values().map(|p| p.rate).collect();
    let correct_rate_spearman = finite(stats::spearman(&rate_xs, &rate_ys));

    let mean_fisher = mean_fisher_at_matched_ability(&by_bin)?;
    let mut fisher_curves = Vec::new();
    for &group in &config.fisher_groups {
        if let Some(estimates_in_group) = by_bin.get(&group) {
            let points = fisher_curve_group(estimates_in_group, &config.theta_grid)?
                .into_iter()
                .map(|(theta, mean_information)| FisherPoint { theta, mean_information })
                .collect();
            fisher_curves.push(FisherCurve { group: group.to_logit(), points });
        }
    }

    let bins = question_counts
        .iter()
        .map(|(&bin, &count)| {
            let rate = curve.points.get(&bin);
            let estimates_in_bin = by_bin.get(&bin);
            BinSummary {
                specified_difficulty: bin.to_logit(),
                correct_rate: rate.map(|r| r.rate),
                observations: rate.map_or(0, |r| r.observations),
                theoretical_rate: theoretical[&bin],
                mean_estimated_difficulty: estimates_in_bin.map(|es| stats::mean(es)),
                question_count: count,
            }
        })
        .collect();

    Ok(EvaluationReport {
        question_count: questions.len(),
        unparsed_outputs,
        theta_ref,
        bins,
        mae,
        regression_slope,
        correct_rate_spearman,
        mean_fisher_at_matched_ability: mean_fisher,
        fisher_curves,
        clamped_estimates,
        dropped_questions: estimates
            .dropped
            .into_iter()
            .map(|(question_id, reason)| DroppedQuestion { question_id, reason })
            .collect(),
        empty_bins: curve.empty_bins.iter().map(|t| t.to_logit()).collect(),
        judge: None,
    })
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn median_ability(responders: &AbilityParams) -> f64 {
    let mut thetas: Vec<f64> = responders.ability.values().copied().collect();
    if thetas.is_empty() {
        return 0.0;
    }
    thetas.sort_by(f64::total_cmp);
    let n = thetas.len();
    if n % 2 == 1 {
        thetas[n / 2]
    } else {
        0.5 * (thetas[n / 2 - 1] + thetas[n / 2])
    }
}

impl EvaluationReport {
    pub fn write_json<W: Write>(&self, mut writer: W) -> Result<(), EvalError> {
        serde_json::to_writer_pretty(&mut writer, self)?;
        writer.write_all(b"\n")?;
        Ok(())
    }

    /// Writes the per-figure CSVs into `out_dir`. The judge files
    /// (`fig6_reasoning.csv`, `table2_quality.csv`) appear only when judge
    /// results are attached.
    pub fn write_figure_csvs(&self, out_dir: &Path) -> Result<(), EvalError> {
        let mut fig3 = csv::Writer::from_path(out_dir.join("fig3_correct_rates.csv"))
            .map_err(csv_io)?;
        fig3.write_record(["specified_difficulty", "correct_rate", "observations", "theoretical"])
            .map_err(csv_io)?;
        for bin in &self.bins {
            fig3.write_record([
                format!("{}", Tenths::from_logit(bin.specified_difficulty)),
                bin.correct_rate.map(|r| format!("{r:.6}")).unwrap_or_default(),
                bin.observations.to_string(),
                format!("{:.6}", bin.theoretical_rate),
            ])
            .map_err(csv_io)?;
        }
        fig3.flush()?;

        let mut fig4 = csv::Writer::from_path(out_dir.join("fig4_estimated_difficulty.csv"))
            .map_err(csv_io)?;
        fig4.write_record(["specified_difficulty", "mean_estimated_difficulty", "question_count"])
            .map_err(csv_io)?;
        for bin in &self.bins {
            fig4.write_record([
                format!("{}", Tenths::from_logit(bin.specified_difficulty)),
                bin.mean_estimated_difficulty
                    .map(|b| format!("{b:.6}"))
                    .unwrap_or_default(),
                bin.question_count.to_string(),
            ])
            .map_err(csv_io)?;
        }
        fig4.flush()?;

        let mut fig5 =
            csv::Writer::from_path(out_dir.join("fig5_fisher.csv")).map_err(csv_io)?;
        fig5.write_record(["group", "theta", "mean_information"]).map_err(csv_io)?;
        for curve in &self.fisher_curves {
            for point in &curve.points {
                fig5.write_record([
                    format!("{}", Tenths::from_logit(curve.group)),
                    format!("{:.6}", point.theta),
                    format!("{:.6}", point.mean_information),
                ])
                .map_err(csv_io)?;
            }
        }
        fig5.flush()?;

        if let Some(judge) = &self.judge {
            let mut fig6 =
                csv::Writer::from_path(out_dir.join("fig6_reasoning.csv")).map_err(csv_io)?;
            fig6.write_record(["category", "proportion"]).map_err(csv_io)?;
            for row in &judge.reasoning {
                fig6.write_record([row.category.clone(), format!("{:.6}", row.proportion)])
                    .map_err(csv_io)?;
            }
            fig6.flush()?;

            let mut table2 =
                csv::Writer::from_path(out_dir.join("table2_quality.csv")).map_err(csv_io)?;
            table2
                .write_record(["criterion", "mean", "std", "parsed", "unparseable"])
                .map_err(csv_io)?;
            for row in &judge.quality {
                table2
                    .write_record([
                        row.criterion.clone(),
                        format!("{:.6}", row.mean),
                        format!("{:.6}", row.std),
                        row.parsed.to_string(),
                        row.unparseable.to_string(),
                    ])
                    .map_err(csv_io)?;
            }
            table2.flush()?;
        }
        Ok(())
    }
}

fn csv_io(err: csv::Error) -> EvalError {
    EvalError::Transport(err.to_string())
}
