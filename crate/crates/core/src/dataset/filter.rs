//! Accuracy-threshold filtering of QA systems.

/// Keeps systems whose accuracy is at or above the threshold, preserving
/// input order. The comparison is inclusive: a system exactly at the
/// threshold stays.
pub fn filter_qa_systems(accuracies: &[(String, f64)], threshold: f64) -> Vec<String> {
    accuracies
        .iter()
        .filter(|(_, accuracy)| *accuracy >= threshold)
        .map(|(id, _)| id.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn systems(pairs: &[(&str, f64)]) -> Vec<(String, f64)> {
        pairs.iter().map(|&(id, a)| (id.to_owned(), a)).collect()
    }

    #[test]
    fn boundary_system_is_kept() {
        let kept = filter_qa_systems(&systems(&[("s1", 0.30), ("s2", 0.29), ("s3", 0.31)]), 0.30);
        assert_eq!(kept, vec!["s1".to_string(), "s3".to_string()]);
    }

    #[test]
    fn all_below_threshold_yields_empty() {
        let kept = filter_qa_systems(&systems(&[("s1", 0.1), ("s2", 0.2)]), 0.30);
        assert!(kept.is_empty());
    }

    #[test]
    fn zero_threshold_is_identity_subsequence() {
        let input = systems(&[("z", 0.0), ("a", 1.0), ("m", 0.5)]);
        let kept = filter_qa_systems(&input, 0.0);
        assert_eq!(kept, vec!["z".to_string(), "a".to_string(), "m".to_string()]);
    }

    #[test]
    fn ensemble_pruning_keeps_the_competent() {
        // 100 systems spread over [0.05, 0.95]; the count kept at 0.30 plays
        // the role of the surviving ensemble
        let input: Vec<(String, f64)> = (0..100)
            .map(|i| (format!("sys{i:03}"), 0.05 + 0.9 * i as f64 / 99.0))
            .collect();
        let kept = filter_qa_systems(&input, 0.30);
        assert_eq!(kept.len(), input.iter().filter(|(_, a)| *a >= 0.30).count());
        assert!(kept.len() > 50 && kept.len() < 100);
    }
}
