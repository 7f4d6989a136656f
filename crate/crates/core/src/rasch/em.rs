//! Marginal-maximum-likelihood difficulty estimation (Bock-Aitkin EM).
//!
//! Abilities are integrated out over a population prior discretized on a
//! quadrature grid. Each E-step computes per-responder posterior weights over
//! the grid nodes; each M-step solves a one-dimensional Newton problem per
//! item. The prior fixes the scale indeterminacy of the Rasch model.

use rayon::prelude::*;

use super::{
    log_sigmoid, sigmoid, ItemParams, QuadratureGrid, RaschError, ResponseMatrix, LOGIT_BOUND,
};

#[derive(Debug, Clone)]
pub struct EmConfig {
    /// EM stops when the largest per-item difficulty change falls below this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for EmConfig {
    fn default() -> Self {
        EmConfig { tolerance: 1e-4, max_iterations: 500 }
    }
}

/// Estimates item difficulties by MML with the given ability prior grid.
///
/// Every item needs at least one scored response. Items whose estimates run
/// away (all-correct or all-incorrect columns) clamp to the logit bound. If
/// the EM loop hits `max_iterations` first, the result is still returned and
/// items whose last update exceeded the tolerance carry `converged = false`.
pub fn estimate_difficulties_mml(
    matrix: &ResponseMatrix,
    grid: &QuadratureGrid,
    config: &EmConfig,
) -> Result<ItemParams, RaschError> {
    let unscored = matrix.unscored_items();
    if !unscored.is_empty() {
        return Err(RaschError::ItemsWithoutResponses { ids: unscored });
    }

    let n_items = matrix.n_items();
    let n_nodes = grid.len();
    let nodes = grid.nodes();
    let log_weights: Vec<f64> = grid.weights().iter().map(|w| w.ln()).collect();

    // per-responder scored cells, fixed once
    let rows: Vec<Vec<(usize, bool)>> = (0..matrix.n_responders())
        .map(|r| {
            matrix
                .responder_row(r)
                .map(|(i, o)| (i, o.is_correct()))
                .collect()
        })
        .collect();
    // per-item scored cells in responder order, fixed once
    let columns: Vec<Vec<(usize, bool)>> = (0..n_items)
        .map(|i| {
            matrix
                .item_column(i)
                .map(|(r, o)| (r, o.is_correct()))
                .collect()
        })
        .collect();

    // start from the centered observed log-odds of an incorrect response
    let mut difficulties: Vec<f64> = columns
        .iter()
        .map(|column| {
            let total = column.len() as f64;
            let correct = column.iter().filter(|&&(_, c)| c).count() as f64;
            (((total - correct + 0.5) / (correct + 0.5)).ln()).clamp(-LOGIT_BOUND, LOGIT_BOUND)
        })
        .collect();

    let mut deltas = vec![f64::INFINITY; n_items];
    for _ in 0..config.max_iterations {
        // E-step: posterior node weights per responder. The reduction into
        // per-item expected counts happens in fixed responder order below, so
        // the parallel map must only preserve indexing (collect does).
        let posteriors: Vec<Vec<f64>> = rows
            .par_iter()
            .map(|row| {
                let mut log_post: Vec<f64> = (0..n_nodes)
                    .map(|q| {
                        let theta = nodes[q];
                        let mut ll = log_weights[q];
                        for &(i, correct) in row {
                            let z = theta - difficulties[i];
                            ll += if correct { log_sigmoid(z) } else { log_sigmoid(-z) };
                        }
                        ll
                    })
                    .collect();
                let max = log_post.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let mut total = 0.0;
                for lp in &mut log_post {
                    *lp = (*lp - max).exp();
                    total += *lp;
                }
                for lp in &mut log_post {
                    *lp /= total;
                }
                log_post
            })
            .collect();

        // M-step: per-item Newton on the expected-count likelihood
        let updates: Vec<(f64, f64)> = columns
            .par_iter()
            .zip(difficulties.par_iter())
            .map(|(column, &b_old)| {
                let mut expected_total = vec![0.0; n_nodes];
                let mut expected_correct = vec![0.0; n_nodes];
                for &(r, correct) in column {
                    let post = &posteriors[r];
                    for q in 0..n_nodes {
                        expected_total[q] += post[q];
                        if correct {
                            expected_correct[q] += post[q];
                        }
                    }
                }
                let b_new = newton_item(nodes, &expected_total, &expected_correct, b_old);
                (b_new, (b_new - b_old).abs())
            })
            .collect();

        let mut max_delta = 0.0f64;
        for (i, (b_new, delta)) in updates.into_iter().enumerate() {
            difficulties[i] = b_new;
            deltas[i] = delta;
            max_delta = max_delta.max(delta);
        }
        if max_delta < config.tolerance {
            break;
        }
    }

    // standard errors from expected information at the final estimates,
    // using one last E-step under those estimates
    let posteriors: Vec<Vec<f64>> = rows
        .par_iter()
        .map(|row| {
            let mut log_post: Vec<f64> = (0..n_nodes)
                .map(|q| {
                    let theta = nodes[q];
                    let mut ll = log_weights[q];
                    for &(i, correct) in row {
                        let z = theta - difficulties[i];
                        ll += if correct { log_sigmoid(z) } else { log_sigmoid(-z) };
                    }
                    ll
                })
                .collect();
            let max = log_post.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mut total = 0.0;
            for lp in &mut log_post {
                *lp = (*lp - max).exp();
                total += *lp;
            }
            for lp in &mut log_post {
                *lp /= total;
            }
            log_post
        })
        .collect();

    let mut params = ItemParams::default();
    for i in 0..n_items {
        let id = matrix.item_ids()[i].clone();
        let b = difficulties[i];
        let mut information = 0.0;
        for &(r, _) in &columns[i] {
            let post = &posteriors[r];
            for q in 0..n_nodes {
                let p = sigmoid(nodes[q] - b);
                information += post[q] * p * (1.0 - p);
            }
        }
        if information > 0.0 {
            params.standard_error.insert(id.clone(), 1.0 / information.sqrt());
        }
        params.converged.insert(id.clone(), deltas[i] < config.tolerance);
        params.difficulty.insert(id, b);
    }
    Ok(params)
}

/// Maximizes `sum_q [r_q log P_q + (n_q - r_q) log(1 - P_q)]` over b, with
/// `P_q = sigmoid(node_q - b)`. The objective is strictly concave; Newton
/// steps are clamped to the logit bound.
fn newton_item(nodes: &[f64], expected_total: &[f64], expected_correct: &[f64], start: f64) -> f64 {
    let mut b = start;
    for _ in 0..100 {
        let mut gradient = 0.0; // d/db = sum_q (n_q P_q - r_q)
        let mut information = 0.0; // -d2/db2 = sum_q n_q P_q (1 - P_q)
        for (q, &node) in nodes.iter().enumerate() {
            let p = sigmoid(node - b);
            gradient += expected_total[q] * p - expected_correct[q];
            information += expected_total[q] * p * (1.0 - p);
        }
        if information <= 0.0 {
            break;
        }
        let step = gradient / information;
        let next = (b + step).clamp(-LOGIT_BOUND, LOGIT_BOUND);
        let moved = (next - b).abs();
        b = next;
        if moved < 1e-10 {
            break;
        }
    }
    b
}
