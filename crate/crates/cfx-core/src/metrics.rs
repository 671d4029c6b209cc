//! Batch evaluation measures: mean number of feature changes and mean
//! amount of change per changed feature.
//!
//! Both are computed from the final counterfactual against its query, not
//! from the substitution trace. The amount measure divides the total change
//! by the total number of changed features, so for purely categorical data
//! it is exactly 1 — every change contributes the overlap distance. Because
//! categorical changes always count 1, the amount is not comparable across
//! datasets with different feature mixes.

use alloc::vec::Vec;
use core::fmt;

use num_traits::Float;

use crate::counterfactual::CounterfactualResult;
use crate::schema::{FeatureKind, Instance, Schema};

/// Per-query contribution to the batch measures.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QueryMetrics {
    pub n_changes: usize,
    pub amount: f64,
}

/// Aggregated measures over one batch of counterfactuals.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricsReport {
    pub n_queries: usize,
    /// Mean count of changed features per counterfactual.
    pub mean_changes: f64,
    /// Mean change per changed feature: total change over total changes.
    pub mean_amount: f64,
    pub per_query: Vec<QueryMetrics>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MetricsError {
    LengthMismatch { results: usize, queries: usize },
}

impl fmt::Display for MetricsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricsError::LengthMismatch { results, queries } => {
                write!(f, "{results} results cannot pair with {queries} queries")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for MetricsError {}

/// Compare each counterfactual to its query feature-wise and aggregate.
pub fn compute_metrics(
    results: &[CounterfactualResult],
    queries: &[Instance],
    schema: &Schema,
) -> Result<MetricsReport, MetricsError> {
    if results.len() != queries.len() || results.is_empty() {
        return Err(MetricsError::LengthMismatch {
            results: results.len(),
            queries: queries.len(),
        });
    }
    let mut per_query = Vec::with_capacity(results.len());
    let mut total_changes = 0usize;
    let mut total_amount = 0.0f64;
    for (result, query) in results.iter().zip(queries) {
        assert_eq!(query.len(), schema.n_features(), "query arity mismatch");
        assert_eq!(result.counterfactual.len(), schema.n_features(), "result arity mismatch");
        let mut n_changes = 0usize;
        let mut amount = 0.0f64;
        for (i, feat) in schema.features.iter().enumerate() {
            let (a, b) = (result.counterfactual.values[i], query.values[i]);
            if a == b {
                continue;
            }
            n_changes += 1;
            amount += match feat.kind {
                FeatureKind::Continuous { .. } => Float::abs(a - b),
                FeatureKind::Categorical { .. } => 1.0,
            };
        }
        assert!(n_changes >= 1, "a counterfactual must differ from its query");
        total_changes += n_changes;
        total_amount += amount;
        per_query.push(QueryMetrics { n_changes, amount });
    }
    let n = results.len();
    Ok(MetricsReport {
        n_queries: n,
        mean_changes: total_changes as f64 / n as f64,
        mean_amount: total_amount / total_changes as f64,
        per_query,
    })
}
