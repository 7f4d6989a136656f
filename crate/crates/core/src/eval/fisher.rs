//! Fisher-information summaries of estimated question difficulties.

use std::collections::BTreeMap;

use super::EvalError;
use crate::grid::Tenths;
use crate::rasch::fisher_information;

/// Mean Fisher information over a group of estimated difficulties at each
/// ability grid point.
pub fn fisher_curve_group(
    estimated: &[f64],
    theta_grid: &[f64],
) -> Result<Vec<(f64, f64)>, EvalError> {
    if estimated.is_empty() {
        return Err(EvalError::EmptyInput("estimated difficulties"));
    }
    theta_grid
        .iter()
        .map(|&theta| {
            let mut total = 0.0;
            for &b in estimated {
                total += fisher_information(theta, b)?;
            }
            Ok((theta, total / estimated.len() as f64))
        })
        .collect()
}

/// Mean Fisher information over all (group, question) pairs evaluated at the
/// matched ability `theta = b_specified`. At most 0.25, with equality only
/// under perfect difficulty control.
pub fn mean_fisher_at_matched_ability(
    groups: &BTreeMap<Tenths, Vec<f64>>,
) -> Result<f64, EvalError> {
    let mut total = 0.0;
    let mut count = 0usize;
    for (&specified, estimates) in groups {
        for &b in estimates {
            total += fisher_information(specified.to_logit(), b)?;
            count += 1;
        }
    }
    if count == 0 {
        return Err(EvalError::EmptyInput("fisher groups"));
    }
    Ok(total / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_question_curve_peaks_at_its_difficulty() {
        let grid: Vec<f64> = (-30..=30).map(|t| t as f64 / 10.0).collect();
        let curve = fisher_curve_group(&[0.0], &grid).unwrap();
        let (peak_theta, peak_value) = curve
            .iter()
            .copied()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        assert_eq!(peak_theta, 0.0);
        assert_eq!(peak_value, 0.25);
    }

    #[test]
    fn symmetric_difficulties_give_symmetric_curve() {
        let grid: Vec<f64> = (-20..=20).map(|t| t as f64 / 10.0).collect();
        let curve = fisher_curve_group(&[-1.0, 1.0], &grid).unwrap();
        let n = curve.len();
        for k in 0..n / 2 {
            assert_abs_diff_eq!(curve[k].1, curve[n - 1 - k].1, epsilon = 1e-12);
        }
    }

    #[test]
    fn matches_per_question_averaging_oracle() {
        let estimates: Vec<f64> = (0..10).map(|k| -2.0 + 0.45 * k as f64).collect();
        let grid = [-1.5, 0.0, 0.7];
        let curve = fisher_curve_group(&estimates, &grid).unwrap();
        for (theta, value) in curve {
            let oracle: f64 = estimates
                .iter()
                .map(|&b| fisher_information(theta, b).unwrap())
                .sum::<f64>()
                / estimates.len() as f64;
            assert_abs_diff_eq!(value, oracle, epsilon = 1e-12);
        }
    }

    #[test]
    fn perfect_control_hits_the_ceiling() {
        let mut groups = BTreeMap::new();
        for t in [-20, 0, 20] {
            groups.insert(Tenths(t), vec![Tenths(t).to_logit(); 4]);
        }
        assert_eq!(mean_fisher_at_matched_ability(&groups).unwrap(), 0.25);
    }

    #[test]
    fn constant_two_logit_offset() {
        let mut groups = BTreeMap::new();
        groups.insert(Tenths(-10), vec![-3.0, 1.0]); // offsets -2 and +2
        groups.insert(Tenths(10), vec![-1.0, 3.0]);
        let value = mean_fisher_at_matched_ability(&groups).unwrap();
        assert_abs_diff_eq!(value, 0.104994, epsilon = 1e-6);
    }

    #[test]
    fn tighter_control_scores_higher() {
        // same bins, estimates offset by 1.5 vs 0.5 logits
        let bins = [-20, -10, 0, 10, 20];
        let mut loose = BTreeMap::new();
        let mut tight = BTreeMap::new();
        for &t in &bins {
            let b = Tenths(t).to_logit();
            loose.insert(Tenths(t), vec![b - 1.5, b + 1.5]);
            tight.insert(Tenths(t), vec![b - 0.5, b + 0.5]);
        }
        let loose_value = mean_fisher_at_matched_ability(&loose).unwrap();
        let tight_value = mean_fisher_at_matched_ability(&tight).unwrap();
        assert!(tight_value > loose_value);
        assert!(tight_value < 0.25);
    }

    #[test]
    fn empty_group_is_an_error() {
        assert!(fisher_curve_group(&[], &[0.0]).is_err());
        assert!(mean_fisher_at_matched_ability(&BTreeMap::new()).is_err());
    }
}
