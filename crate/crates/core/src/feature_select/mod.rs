//! Feature selection: L1-regularized regression and QUBO annealing.

mod lasso;
mod qubo;

pub use lasso::{lambda_max, lasso_fit, lasso_select_k, standardize_columns, LassoSettings};
pub use qubo::{
    anneal, build_qubo, build_qubo_default, exhaustive_solve, pearson, qubo_energy, qubo_from_correlations, qubo_select_k,
    AnnealSchedule, QuboProblem, QuboSolution, EXHAUSTIVE_LIMIT,
};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionMethod {
    Lasso,
    Qubo,
}

impl std::str::FromStr for SelectionMethod {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "lasso" => Ok(Self::Lasso),
            "qubo" => Ok(Self::Qubo),
            other => Err(crate::Error::InvalidInput(format!("unknown selection method {other:?}"))),
        }
    }
}

/// Selected columns ordered by decreasing importance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSelection {
    pub indices: Vec<usize>,
    /// `|β|` for Lasso, `|pearson(x, y)|` relevance for QUBO.
    pub scores: Vec<f64>,
    pub method: SelectionMethod,
    pub requested_k: usize,
    /// Feature identifiers, filled in by [`FeatureSelection::with_ids`].
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub feature_ids: Vec<String>,
    /// Method parameters actually used (e.g. final lambda, QUBO weights).
    #[serde(default)]
    pub parameters: serde_json::Map<String, serde_json::Value>,
    /// Set when exactly `requested_k` features could not be produced.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl FeatureSelection {
    pub(crate) fn from_scored(
        mut scored: Vec<(usize, f64)>,
        method: SelectionMethod,
        requested_k: usize,
    ) -> Self {
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let (indices, scores) = scored.into_iter().unzip();
        Self {
            indices,
            scores,
            method,
            requested_k,
            feature_ids: Vec::new(),
            parameters: serde_json::Map::new(),
            warning: None,
        }
    }

    pub fn with_ids(mut self, all_ids: &[String]) -> Self {
        self.feature_ids = self.indices.iter().map(|&i| all_ids[i].clone()).collect();
        self
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// The `k` highest-scoring indices.
    pub fn top(&self, k: usize) -> &[usize] {
        &self.indices[..k.min(self.indices.len())]
    }
}
