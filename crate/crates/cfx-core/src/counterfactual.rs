//! Greedy NUN-substitution search for the minimal actionable feature set.
//!
//! Starting from the query, features are visited in relevance order;
//! wherever the query and the NUN disagree, the NUN's value is copied in and
//! the model re-queried. The loop stops at the first class flip. Because the
//! NUN itself is classified differently, copying every differing feature is
//! guaranteed to flip, so the loop always terminates with a valid
//! counterfactual.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::classifier::Classifier;
use crate::neighbours::NunResult;
use crate::relevance::{order_features, order_features_absolute, RelevanceWeights};
use crate::schema::{feature_delta, Instance, Schema};

/// Which instance the relevance weights were computed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum OrderingMode {
    /// Weights explain the query; most relevant query features change first.
    QRel,
    /// Weights explain the NUN; its most relevant features are copied first.
    NRel,
    /// Seeded random permutation; weights are ignored. Reported as `null`
    /// because it depends on neither instance.
    Random,
}

impl OrderingMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            OrderingMode::QRel => "qrel",
            OrderingMode::NRel => "nrel",
            OrderingMode::Random => "null",
        }
    }
}

impl fmt::Display for OrderingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OrderingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "qrel" => Ok(OrderingMode::QRel),
            "nrel" => Ok(OrderingMode::NRel),
            "null" | "rnd" => Ok(OrderingMode::Random),
            other => {
                let mut msg = String::from("unknown ordering mode '");
                msg.push_str(other);
                msg.push_str("' (expected qrel|nrel|null)");
                Err(msg)
            }
        }
    }
}

/// One substitution applied during the search, in execution order.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureChange {
    pub feature: usize,
    /// Query value before the substitution (normalized space).
    pub from: f64,
    /// NUN value copied in (normalized space).
    pub to: f64,
    /// Contribution to the amount-of-change measure: absolute difference
    /// for continuous features, 1 for categorical ones.
    pub delta: f64,
}

/// A valid counterfactual plus the substitution trace that produced it.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CounterfactualResult {
    pub counterfactual: Instance,
    /// Class the query was predicted as.
    pub query_class: usize,
    /// Class of the counterfactual; always differs from `query_class`.
    pub new_class: usize,
    pub changed_features: Vec<FeatureChange>,
    pub n_changes: usize,
    /// Total change over the changed features.
    pub amount: f64,
    pub nun_used: NunResult,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CounterfactualError {
    /// Exhausted every differing feature without a class flip. Unreachable
    /// when the NUN really is classified unlike the query.
    NoFlip,
}

impl fmt::Display for CounterfactualError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CounterfactualError::NoFlip => {
                write!(f, "substituting every NUN value did not flip the class")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for CounterfactualError {}

/// Copy NUN feature values into the query in relevance order until the
/// model's prediction leaves `query_class`.
///
/// `weights` must have been computed on the instance the `mode` dictates
/// (query for [`OrderingMode::QRel`], NUN for [`OrderingMode::NRel`]; random
/// orderings carry their permutation in the weights). Features already equal
/// between query and NUN are skipped without a model call. Prediction uses
/// class labels only; any class other than `query_class` counts as a flip,
/// which in the binary case is exactly the desired outcome.
pub fn substitute_until_flip<M: Classifier + ?Sized>(
    query: &Instance,
    query_class: usize,
    nun: &NunResult,
    model: &M,
    weights: &RelevanceWeights,
    mode: OrderingMode,
    schema: &Schema,
    absolute_ordering: bool,
) -> Result<CounterfactualResult, CounterfactualError> {
    assert_eq!(weights.len(), schema.n_features(), "weight vector arity mismatch");
    assert_eq!(query.len(), schema.n_features(), "query arity mismatch");
    let order = if absolute_ordering {
        order_features_absolute(weights)
    } else {
        order_features(weights)
    };

    let mut counterfactual = query.clone();
    let mut changed = Vec::new();
    let mut amount = 0.0;
    for &feature in &order {
        if counterfactual.values[feature] == nun.nun.values[feature] {
            continue;
        }
        let from = counterfactual.values[feature];
        let to = nun.nun.values[feature];
        counterfactual.values[feature] = to;
        let delta = feature_delta(query, &nun.nun, schema, feature);
        changed.push(FeatureChange { feature, from, to, delta });
        amount += delta;
        let new_class = model.predict(&counterfactual);
        if new_class != query_class {
            let n_changes = changed.len();
            return Ok(CounterfactualResult {
                counterfactual,
                query_class,
                new_class,
                changed_features: changed,
                n_changes,
                amount,
                nun_used: nun.clone(),
            });
        }
    }
    let _ = mode; // ordering basis is encoded in the weights themselves
    Err(CounterfactualError::NoFlip)
}
