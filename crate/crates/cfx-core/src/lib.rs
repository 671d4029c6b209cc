//! Case-based counterfactual explanations for tabular classifiers.
//!
//! Given a query instance that a classifier assigns an undesirable class,
//! this crate finds the nearest unlike neighbour (NUN) in a case base,
//! ranks features by relevance (local surrogate regression, sampled Shapley
//! values, a global chi-squared weighter, or a random baseline), and greedily
//! copies NUN feature values into the query in relevance order until the
//! prediction flips. The changed features and the amount of change form the
//! explanation.
//!
//! The crate is `no_std`-compatible (requires `alloc`); file formats, CSV
//! ingestion and the command-line front end live in the companion `cfx-cli`
//! crate.
//!
//! # Quick tour
//!
//! ```
//! use cfx_core::prelude::*;
//!
//! // A tiny case base over one continuous feature in [0, 1].
//! let schema = Schema::new(
//!     vec![Feature::continuous("score", 0.0, 1.0)],
//!     "outcome",
//!     vec!["reject".into(), "accept".into()],
//! )
//! .unwrap();
//! let instances: Vec<Instance> = [0.1, 0.2, 0.8, 0.9]
//!     .iter()
//!     .map(|&v| Instance::new(vec![v]))
//!     .collect();
//! let case_base = Dataset::new(schema, instances, vec![0, 0, 1, 1]).unwrap();
//!
//! // A black-box model: accept when score > 0.5.
//! let model = FnClassifier::new(2, |x: &Instance| {
//!     if x.values[0] > 0.5 { vec![0.0, 1.0] } else { vec![1.0, 0.0] }
//! });
//!
//! let query = Instance::new(vec![0.3]);
//! let result = explain_query(
//!     &case_base,
//!     &model,
//!     &query,
//!     RelevanceMethod::Random,
//!     OrderingMode::Random,
//!     &ExplainerConfig::default(),
//!     None,
//! )
//! .unwrap();
//! assert_eq!(result.new_class, 1);
//! assert_eq!(result.n_changes, 1);
//! ```
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod classifier;
pub mod counterfactual;
pub mod dataset;
pub mod engine;
pub mod forest;
pub mod metrics;
pub mod neighbours;
pub mod relevance;
pub mod schema;
pub mod seed;
pub mod textgen;

pub mod prelude {
    //! One-stop imports for the common workflow.
    pub use crate::classifier::{evaluate_accuracy, Classifier, FnClassifier};
    pub use crate::counterfactual::{CounterfactualResult, FeatureChange, OrderingMode};
    pub use crate::dataset::Dataset;
    pub use crate::engine::{explain_query, ExplainEngine};
    pub use crate::forest::{ForestParams, RandomForest};
    pub use crate::metrics::{compute_metrics, MetricsReport};
    pub use crate::neighbours::{find_k_nuns, find_nun, NunResult};
    pub use crate::relevance::{order_features, ExplainerConfig, RelevanceMethod, RelevanceWeights};
    pub use crate::schema::{distance, Feature, FeatureKind, Instance, Schema};
    pub use crate::textgen::{render, ExplanationText};
}
