//! Quadrature rules for integrating over the ability population prior.

use super::RaschError;

/// Fixed nodes and weights for the marginal integral in MML estimation.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureGrid {
    /// Nodes must be strictly increasing; weights nonnegative and summing to
    /// one within 1e-9.
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self, RaschError> {
        if nodes.len() != weights.len() {
            return Err(RaschError::InvalidGrid(format!(
                "{} nodes but {} weights",
                nodes.len(),
                weights.len()
            )));
        }
        if nodes.is_empty() {
            return Err(RaschError::InvalidGrid("empty grid".into()));
        }
        if nodes.iter().chain(&weights).any(|v| !v.is_finite()) {
            return Err(RaschError::InvalidGrid("nodes and weights must be finite".into()));
        }
        if nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(RaschError::InvalidGrid("nodes must be strictly increasing".into()));
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(RaschError::InvalidGrid("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(RaschError::InvalidGrid(format!("weights sum to {total}, not 1")));
        }
        Ok(QuadratureGrid { nodes, weights })
    }

    /// Equally spaced nodes on `[-half_width, half_width]` weighted by the
    /// standard-normal density, renormalized to sum to one. The default
    /// calibration grid is `standard_normal(41, 6.0)`.
    pub fn standard_normal(n_nodes: usize, half_width: f64) -> Self {
        assert!(n_nodes >= 2, "need at least two nodes");
        assert!(half_width > 0.0 && half_width.is_finite());
        let nodes: Vec<f64> = (0..n_nodes)
            .map(|i| -half_width + 2.0 * half_width * i as f64 / (n_nodes - 1) as f64)
            .collect();
        let raw: Vec<f64> = nodes.iter().map(|&x| (-0.5 * x * x).exp()).collect();
        let total: f64 = raw.iter().sum();
        let weights = raw.iter().map(|w| w / total).collect();
        QuadratureGrid { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        QuadratureGrid::standard_normal(41, 6.0)
    }
}
