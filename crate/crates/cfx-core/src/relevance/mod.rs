//! Feature relevance weighting.
//!
//! Every explainer produces one signed weight per feature for a target
//! class; sorting the weights (descending, ties by feature index) yields the
//! substitution order the counterfactual search walks. Four weighters are
//! provided: a local surrogate regression ([`lime`]), sampled Shapley values
//! ([`shap`]), a global chi-squared statistic ([`chi2`]) and a seeded random
//! baseline. Class-level aggregates average per-instance weights over all
//! training members of one class.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::classifier::Classifier;
use crate::dataset::Dataset;
use crate::seed;

pub mod chi2;
pub mod lime;
pub mod shap;

pub use chi2::chi2_weights;
pub use lime::{lime_explain, lime_explain_for_class};
pub use shap::{shap_explain, shap_explain_for_class};

/// The relevance weighter behind a weight vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum RelevanceMethod {
    /// Seeded random feature ordering; the uninformed baseline.
    Random,
    Lime,
    Shap,
    /// Per-class mean of LIME weights over the training members.
    LimeClass,
    /// Per-class mean of Shapley weights over the training members.
    ShapClass,
    Chi2,
}

impl RelevanceMethod {
    pub const ALL: [RelevanceMethod; 6] = [
        RelevanceMethod::Random,
        RelevanceMethod::Lime,
        RelevanceMethod::Shap,
        RelevanceMethod::LimeClass,
        RelevanceMethod::ShapClass,
        RelevanceMethod::Chi2,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            RelevanceMethod::Random => "rnd",
            RelevanceMethod::Lime => "lime",
            RelevanceMethod::Shap => "shap",
            RelevanceMethod::LimeClass => "lime_c",
            RelevanceMethod::ShapClass => "shap_c",
            RelevanceMethod::Chi2 => "chi2",
        }
    }

    /// Global weighters return the same vector for every query.
    pub fn is_global(&self) -> bool {
        matches!(self, RelevanceMethod::Chi2)
    }
}

impl fmt::Display for RelevanceMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelevanceMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RelevanceMethod::ALL
            .iter()
            .find(|m| m.as_str() == s)
            .copied()
            .ok_or_else(|| {
                let mut msg = String::from("unknown relevance method '");
                msg.push_str(s);
                msg.push_str("' (expected rnd|lime|shap|lime_c|shap_c|chi2)");
                msg
            })
    }
}

/// Signed per-feature relevance for one target class.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RelevanceWeights {
    pub weights: Vec<f64>,
    /// Class whose probability the weights explain. Global methods are not
    /// class specific and report 0 here.
    pub target_class: usize,
    pub method: RelevanceMethod,
}

impl RelevanceWeights {
    pub fn new(weights: Vec<f64>, target_class: usize, method: RelevanceMethod) -> Self {
        debug_assert!(weights.iter().all(|w| w.is_finite()), "relevance weights must be finite");
        RelevanceWeights { weights, target_class, method }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Shared sampling knobs for the relevance explainers.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExplainerConfig {
    /// Perturbations (surrogate regression) or permutation passes (Shapley).
    pub n_samples: usize,
    /// Surrogate kernel width; `None` picks `0.75 * sqrt(m)`.
    pub kernel_width: Option<f64>,
    /// Size of the seeded background sample for Shapley estimation.
    pub background_size: usize,
    /// Equal-width bins used when discretizing continuous features for the
    /// chi-squared weighter.
    pub bins: usize,
    /// Order features by absolute weight instead of signed weight.
    pub absolute_ordering: bool,
    pub seed: u64,
}

impl Default for ExplainerConfig {
    fn default() -> Self {
        ExplainerConfig {
            n_samples: 1000,
            kernel_width: None,
            background_size: 100,
            bins: 10,
            absolute_ordering: false,
            seed: 0,
        }
    }
}

impl ExplainerConfig {
    pub fn validate(&self) -> Result<(), RelevanceError> {
        if self.n_samples == 0 {
            return Err(RelevanceError::BadConfig("n_samples must be at least 1"));
        }
        if self.background_size == 0 {
            return Err(RelevanceError::BadConfig("background_size must be at least 1"));
        }
        if self.bins == 0 {
            return Err(RelevanceError::BadConfig("bins must be at least 1"));
        }
        if let Some(kw) = self.kernel_width {
            if !(kw > 0.0) {
                return Err(RelevanceError::BadConfig("kernel_width must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelevanceError {
    /// Singular normal equations: too few samples for the feature count.
    DegenerateRegression,
    EmptyBackground,
    EmptyTraining,
    ClassAbsent(usize),
    BadConfig(&'static str),
}

impl fmt::Display for RelevanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelevanceError::DegenerateRegression => {
                write!(f, "surrogate regression is singular; increase n_samples")
            }
            RelevanceError::EmptyBackground => write!(f, "background sample is empty"),
            RelevanceError::EmptyTraining => write!(f, "training data is empty"),
            RelevanceError::ClassAbsent(c) => write!(f, "class {c} has no training members"),
            RelevanceError::BadConfig(msg) => write!(f, "bad explainer config: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for RelevanceError {}

/// Feature indices sorted by signed weight, descending; ties fall back to
/// ascending feature index. Always a permutation of `0..m`.
pub fn order_features(weights: &RelevanceWeights) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..weights.len()).collect();
    // Stable sort keeps ascending index order inside equal-weight runs.
    idx.sort_by(|&a, &b| weights.weights[b].total_cmp(&weights.weights[a]));
    idx
}

/// Like [`order_features`] but ranking by absolute weight.
pub fn order_features_absolute(weights: &RelevanceWeights) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..weights.len()).collect();
    idx.sort_by(|&a, &b| {
        let (wa, wb) = (weights.weights[a].abs(), weights.weights[b].abs());
        wb.total_cmp(&wa)
    });
    idx
}

/// Weight vector whose ordering is a seeded random permutation. Feature at
/// rank `r` receives weight `m - r`, so [`order_features`] reproduces the
/// permutation exactly.
pub fn random_ordering_weights(n_features: usize, seed: u64) -> RelevanceWeights {
    let mut perm: Vec<usize> = (0..n_features).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    perm.shuffle(&mut rng);
    let mut weights = alloc::vec![0.0; n_features];
    for (rank, &feature) in perm.iter().enumerate() {
        weights[feature] = (n_features - rank) as f64;
    }
    RelevanceWeights::new(weights, 0, RelevanceMethod::Random)
}

/// Mean relevance weights over all training members of `class`, explained
/// with respect to that class. `method` selects the per-instance weighter
/// (LIME or Shapley only). The result is query independent, so callers
/// typically compute it once per `(method, class)` and cache it; see
/// [`crate::engine::ExplainEngine`].
pub fn class_aggregate<M: Classifier + ?Sized>(
    method: RelevanceMethod,
    model: &M,
    train: &Dataset,
    class: usize,
    config: &ExplainerConfig,
) -> Result<RelevanceWeights, RelevanceError> {
    config.validate()?;
    let (out_method, base) = match method {
        RelevanceMethod::Lime | RelevanceMethod::LimeClass => {
            (RelevanceMethod::LimeClass, seed::derive(config.seed, "aggregate-lime"))
        }
        RelevanceMethod::Shap | RelevanceMethod::ShapClass => {
            (RelevanceMethod::ShapClass, seed::derive(config.seed, "aggregate-shap"))
        }
        other => panic!("class_aggregate does not apply to {other}"),
    };
    let members: Vec<usize> =
        (0..train.len()).filter(|&i| train.labels[i] == class).collect();
    if members.is_empty() {
        return Err(RelevanceError::ClassAbsent(class));
    }
    let m = train.schema.n_features();
    let mut sum = alloc::vec![0.0; m];
    for &i in &members {
        let mut member_cfg = config.clone();
        member_cfg.seed = seed::derive_index(base, i as u64);
        let w = match out_method {
            RelevanceMethod::LimeClass => {
                lime_explain_for_class(model, train, &train.instances[i], class, &member_cfg)?
            }
            _ => shap_explain_for_class(model, train, &train.instances[i], class, &member_cfg)?,
        };
        for (acc, v) in sum.iter_mut().zip(&w.weights) {
            *acc += v;
        }
    }
    for v in sum.iter_mut() {
        *v /= members.len() as f64;
    }
    Ok(RelevanceWeights::new(sum, class, out_method))
}
