//! Conditional maximum-likelihood estimation of abilities and of single-item
//! difficulties, with the other side of the model held fixed.

use super::{sigmoid, AbilityParams, ItemParams, Outcome, RaschError, ResponseMatrix, LOGIT_BOUND};

/// One-item difficulty estimate from fixed abilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleItemEstimate {
    pub difficulty: f64,
    /// True when the likelihood is monotone over the bound (all-correct or
    /// all-incorrect response vectors) and the estimate sits at the edge.
    pub clamped: bool,
}

/// Per-responder ability MLE holding item difficulties fixed.
///
/// All-correct and all-incorrect responders clamp to the logit bound and are
/// flagged. Responders with no scored cells are an error.
pub fn estimate_abilities_mle(
    matrix: &ResponseMatrix,
    items: &ItemParams,
) -> Result<AbilityParams, RaschError> {
    let empty: Vec<String> = (0..matrix.n_responders())
        .filter(|&r| matrix.responder_row(r).next().is_none())
        .map(|r| matrix.responder_ids()[r].clone())
        .collect();
    if !empty.is_empty() {
        return Err(RaschError::RespondersWithoutResponses { ids: empty });
    }

    let difficulties: Vec<f64> = matrix
        .item_ids()
        .iter()
        .map(|id| {
            items
                .difficulty
                .get(id)
                .copied()
                .ok_or_else(|| RaschError::MissingParameter { kind: "item", id: id.clone() })
        })
        .collect::<Result<_, _>>()?;

    let mut params = AbilityParams::default();
    for r in 0..matrix.n_responders() {
        let cells: Vec<(f64, bool)> = matrix
            .responder_row(r)
            .map(|(i, o)| (difficulties[i], o.is_correct()))
            .collect();
        let (theta, clamped) = mle_logit(cells.iter().map(|&(b, c)| (b, c)), Side::Ability);
        let id = matrix.responder_ids()[r].clone();
        if clamped {
            params.clamped.insert(id.clone());
        }
        params.ability.insert(id, theta);
    }
    Ok(params)
}

/// Difficulty MLE for one item given fixed responder abilities.
///
/// `responses[k]` is the outcome of the responder with ability
/// `abilities[k]`; `None` marks a missing response.
pub fn estimate_single_item_difficulty(
    responses: &[Option<Outcome>],
    abilities: &[f64],
) -> Result<SingleItemEstimate, RaschError> {
    assert_eq!(responses.len(), abilities.len(), "parallel slices must match");
    for &theta in abilities {
        if !theta.is_finite() {
            return Err(RaschError::NonFinite { name: "theta", value: theta });
        }
    }
    let cells: Vec<(f64, bool)> = responses
        .iter()
        .zip(abilities)
        .filter_map(|(resp, &theta)| resp.map(|o| (theta, o.is_correct())))
        .collect();
    if cells.is_empty() {
        return Err(RaschError::AllMissing);
    }
    let (difficulty, clamped) = mle_logit(cells.iter().copied(), Side::Difficulty);
    Ok(SingleItemEstimate { difficulty, clamped })
}

enum Side {
    /// Maximize over theta with b fixed; the score is `sum(u - P)`.
    Ability,
    /// Maximize over b with theta fixed; the score is `sum(P - u)`.
    Difficulty,
}

/// Bounded 1-D MLE on `[-LOGIT_BOUND, LOGIT_BOUND]`.
///
/// Both scores are strictly decreasing in the free parameter, so the
/// maximizer is the score's root when it changes sign inside the interval
/// and the matching edge otherwise (the clamp case).
fn mle_logit<I>(cells: I, side: Side) -> (f64, bool)
where
    I: Iterator<Item = (f64, bool)> + Clone,
{
    let score = |x: f64| -> (f64, f64) {
        let mut g = 0.0;
        let mut info = 0.0;
        for (fixed, correct) in cells.clone() {
            let z = match side {
                Side::Ability => x - fixed,
                Side::Difficulty => fixed - x,
            };
            let p = sigmoid(z);
            let u = if correct { 1.0 } else { 0.0 };
            g += match side {
                Side::Ability => u - p,
                Side::Difficulty => p - u,
            };
            info += p * (1.0 - p);
        }
        (g, info)
    };

    let (g_lo, _) = score(-LOGIT_BOUND);
    if g_lo <= 0.0 {
        return (-LOGIT_BOUND, true);
    }
    let (g_hi, _) = score(LOGIT_BOUND);
    if g_hi >= 0.0 {
        return (LOGIT_BOUND, true);
    }

    let mut lo = -LOGIT_BOUND;
    let mut hi = LOGIT_BOUND;
    let mut x = 0.0;
    for _ in 0..200 {
        let (g, info) = score(x);
        if g.abs() < 1e-12 {
            return (x, false);
        }
        if g > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - g / -info;
        x = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < 1e-13 {
            break;
        }
    }
    (x, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rasch::{simulate_responses, QuadratureGrid};
    use crate::stats::pearson;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn balanced_responder_sits_at_zero() {
        let matrix =
            ResponseMatrix::from_triples([("r1", "q1", true), ("r1", "q2", false)]).unwrap();
        let items = ItemParams::from_difficulties([("q1", 0.0), ("q2", 0.0)]);
        let params = estimate_abilities_mle(&matrix, &items).unwrap();
        assert_abs_diff_eq!(params.ability["r1"], 0.0, epsilon = 1e-6);
        assert!(!params.clamped.contains("r1"));
    }

    #[test]
    fn perfect_score_clamps_high() {
        let matrix =
            ResponseMatrix::from_triples([("r1", "q1", true), ("r1", "q2", true)]).unwrap();
        let items = ItemParams::from_difficulties([("q1", 0.0), ("q2", 1.0)]);
        let params = estimate_abilities_mle(&matrix, &items).unwrap();
        assert_eq!(params.ability["r1"], LOGIT_BOUND);
        assert!(params.clamped.contains("r1"));
    }

    #[test]
    fn zero_score_clamps_low() {
        let matrix =
            ResponseMatrix::from_triples([("r1", "q1", false), ("r1", "q2", false)]).unwrap();
        let items = ItemParams::from_difficulties([("q1", 0.0), ("q2", 1.0)]);
        let params = estimate_abilities_mle(&matrix, &items).unwrap();
        assert_eq!(params.ability["r1"], -LOGIT_BOUND);
        assert!(params.clamped.contains("r1"));
    }

    #[test]
    fn missing_item_difficulty_is_an_error() {
        let matrix = ResponseMatrix::from_triples([("r1", "q1", true)]).unwrap();
        let err = estimate_abilities_mle(&matrix, &ItemParams::default()).unwrap_err();
        assert!(matches!(err, RaschError::MissingParameter { kind: "item", .. }));
    }

    #[test]
    fn responder_with_no_cells_is_an_error() {
        let mut matrix =
            ResponseMatrix::new(vec!["r1".into(), "r2".into()], vec!["q1".into()]).unwrap();
        matrix.record("r1", "q1", Outcome::Correct).unwrap();
        let items = ItemParams::from_difficulties([("q1", 0.0)]);
        match estimate_abilities_mle(&matrix, &items).unwrap_err() {
            RaschError::RespondersWithoutResponses { ids } => {
                assert_eq!(ids, vec!["r2".to_string()])
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn single_item_symmetric_pair_estimates_zero() {
        let responses = [Some(Outcome::Correct), Some(Outcome::Incorrect)];
        let abilities = [1.0, -1.0];
        let est = estimate_single_item_difficulty(&responses, &abilities).unwrap();
        assert_abs_diff_eq!(est.difficulty, 0.0, epsilon = 1e-6);
        assert!(!est.clamped);
    }

    #[test]
    fn single_item_all_correct_clamps() {
        let responses = [Some(Outcome::Correct); 5];
        let abilities = [0.3, -0.2, 1.0, 0.0, -1.4];
        let est = estimate_single_item_difficulty(&responses, &abilities).unwrap();
        assert_eq!(est.difficulty, -LOGIT_BOUND);
        assert!(est.clamped);
    }

    #[test]
    fn single_item_all_missing_is_an_error() {
        let responses: [Option<Outcome>; 3] = [None, None, None];
        let err = estimate_single_item_difficulty(&responses, &[0.0, 0.1, 0.2]).unwrap_err();
        assert!(matches!(err, RaschError::AllMissing));
    }

    #[test]
    fn single_item_matches_grid_search_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let abilities: Vec<f64> = (0..12).map(|_| rng.random_range(-2.5..2.5)).collect();
        let responses: Vec<Option<Outcome>> = abilities
            .iter()
            .map(|&theta| {
                let p = sigmoid(theta - 0.8);
                Some(if rng.random::<f64>() < p {
                    Outcome::Correct
                } else {
                    Outcome::Incorrect
                })
            })
            .collect();
        let est = estimate_single_item_difficulty(&responses, &abilities).unwrap();

        // grid-search the conditional log-likelihood over [-6, 6] in 1e-4 steps
        let mut best_b = -LOGIT_BOUND;
        let mut best_ll = f64::NEG_INFINITY;
        let steps = (2.0 * LOGIT_BOUND / 1e-4).round() as usize;
        for k in 0..=steps {
            let b = -LOGIT_BOUND + k as f64 * 1e-4;
            let ll: f64 = responses
                .iter()
                .zip(&abilities)
                .map(|(resp, &theta)| {
                    let p = sigmoid(theta - b);
                    match resp.unwrap() {
                        Outcome::Correct => p.ln(),
                        Outcome::Incorrect => (1.0 - p).ln(),
                    }
                })
                .sum();
            if ll > best_ll {
                best_ll = ll;
                best_b = b;
            }
        }
        assert_abs_diff_eq!(est.difficulty, best_b, epsilon = 2e-4);
    }

    #[test]
    fn ability_recovery_from_simulation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let normal = Normal::new(0.0, 1.0).unwrap();
        let thetas: Vec<f64> = (0..77).map(|_| normal.sample(&mut rng)).collect();
        let bs: Vec<f64> = (0..100).map(|_| rng.random_range(-3.0..3.0)).collect();
        let abilities = AbilityParams::from_abilities(
            thetas.iter().enumerate().map(|(r, &t)| (format!("r{r:03}"), t)),
        );
        let items = ItemParams::from_difficulties(
            bs.iter().enumerate().map(|(i, &b)| (format!("q{i:03}"), b)),
        );
        let matrix = simulate_responses(&abilities, &items, 123).unwrap();

        // estimate against estimated difficulties, mirroring the pipeline
        let estimated_items = crate::rasch::estimate_difficulties_mml(
            &matrix,
            &QuadratureGrid::default(),
            &crate::rasch::EmConfig::default(),
        )
        .unwrap();
        let recovered = estimate_abilities_mle(&matrix, &estimated_items).unwrap();
        let truth: Vec<f64> = matrix
            .responder_ids()
            .iter()
            .map(|id| abilities.ability[id])
            .collect();
        let est: Vec<f64> = matrix
            .responder_ids()
            .iter()
            .map(|id| recovered.ability[id])
            .collect();
        let r = pearson(&truth, &est);
        assert!(r >= 0.85, "ability correlation {r}");
    }
}
