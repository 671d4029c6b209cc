//! End-to-end explanation pipeline: predict, retrieve the NUN, weight
//! features, substitute until the class flips.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::classifier::Classifier;
use crate::counterfactual::{
    substitute_until_flip, CounterfactualError, CounterfactualResult, OrderingMode,
};
use crate::dataset::Dataset;
use crate::neighbours::{find_nun_with_predictions, NeighbourError, NunResult};
use crate::relevance::{
    chi2_weights, class_aggregate, lime_explain_for_class, random_ordering_weights,
    shap_explain_for_class, ExplainerConfig, RelevanceError, RelevanceMethod, RelevanceWeights,
};
use crate::schema::Instance;
use crate::seed;

#[derive(Debug, Clone, PartialEq)]
pub enum ExplainError {
    /// The query is already predicted as the desired class.
    AlreadyDesiredClass,
    /// A per-instance ordering mode was paired with the random method, or
    /// the random mode with an informed method.
    BadCombination(&'static str),
    Neighbour(NeighbourError),
    Relevance(RelevanceError),
    Counterfactual(CounterfactualError),
}

impl fmt::Display for ExplainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExplainError::AlreadyDesiredClass => {
                write!(f, "query already belongs to the desired class")
            }
            ExplainError::BadCombination(msg) => write!(f, "bad method/mode combination: {msg}"),
            ExplainError::Neighbour(e) => write!(f, "{e}"),
            ExplainError::Relevance(e) => write!(f, "{e}"),
            ExplainError::Counterfactual(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ExplainError {}

impl From<NeighbourError> for ExplainError {
    fn from(e: NeighbourError) -> Self {
        ExplainError::Neighbour(e)
    }
}

impl From<RelevanceError> for ExplainError {
    fn from(e: RelevanceError) -> Self {
        ExplainError::Relevance(e)
    }
}

impl From<CounterfactualError> for ExplainError {
    fn from(e: CounterfactualError) -> Self {
        ExplainError::Counterfactual(e)
    }
}

/// Reusable explanation session over one case base and model.
///
/// Construction predicts every case once (NUN retrieval is judged on model
/// predictions) and precomputes the global chi-squared weights; class-level
/// aggregates can be warmed explicitly and are then shared by every query.
/// After warm-up the engine is immutable, so queries may run concurrently.
pub struct ExplainEngine<'a, M: Classifier + ?Sized> {
    case_base: &'a Dataset,
    model: &'a M,
    config: ExplainerConfig,
    case_predictions: Vec<usize>,
    chi2: RelevanceWeights,
    aggregates: BTreeMap<(RelevanceMethod, usize), RelevanceWeights>,
}

impl<'a, M: Classifier + ?Sized> ExplainEngine<'a, M> {
    pub fn new(
        case_base: &'a Dataset,
        model: &'a M,
        config: ExplainerConfig,
    ) -> Result<Self, ExplainError> {
        config.validate()?;
        let case_predictions =
            case_base.instances.iter().map(|x| model.predict(x)).collect();
        let chi2 = chi2_weights(case_base, config.bins);
        Ok(ExplainEngine {
            case_base,
            model,
            config,
            case_predictions,
            chi2,
            aggregates: BTreeMap::new(),
        })
    }

    pub fn case_base(&self) -> &Dataset {
        self.case_base
    }

    pub fn config(&self) -> &ExplainerConfig {
        &self.config
    }

    /// Model predictions over the case base, indexed by case position.
    pub fn case_predictions(&self) -> &[usize] {
        &self.case_predictions
    }

    /// Precompute the class-level aggregate for `(method, class)`. Aggregate
    /// seeds derive from the engine config, not the per-query seed, so a
    /// warmed value is identical to one computed on demand.
    pub fn warm_aggregate(
        &mut self,
        method: RelevanceMethod,
        class: usize,
    ) -> Result<(), ExplainError> {
        let key = (aggregate_key(method)?, class);
        if !self.aggregates.contains_key(&key) {
            let w = class_aggregate(key.0, self.model, self.case_base, class, &self.config)?;
            self.aggregates.insert(key, w);
        }
        Ok(())
    }

    /// Retrieve the query's nearest unlike neighbour under the cached case
    /// predictions.
    pub fn nun_for(
        &self,
        query: &Instance,
        query_class: usize,
        desired_class: Option<usize>,
    ) -> Result<NunResult, NeighbourError> {
        find_nun_with_predictions(
            self.case_base,
            &self.case_predictions,
            query,
            query_class,
            desired_class,
        )
    }

    /// Explain one query. `seed` drives the stochastic weighters (surrogate
    /// sampling, Shapley walks, random orderings); the experiment runner
    /// derives it per query so cells stay independently reproducible.
    pub fn explain(
        &self,
        query: &Instance,
        method: RelevanceMethod,
        mode: OrderingMode,
        desired_class: Option<usize>,
        seed: u64,
    ) -> Result<CounterfactualResult, ExplainError> {
        let query_class = self.model.predict(query);
        if desired_class == Some(query_class) {
            return Err(ExplainError::AlreadyDesiredClass);
        }
        let nun = self.nun_for(query, query_class, desired_class)?;
        self.explain_with_nun(query, query_class, &nun, method, mode, seed)
    }

    /// Explain against an already-retrieved NUN. The runner shares one NUN
    /// per query across all cells, which this entry point makes possible.
    pub fn explain_with_nun(
        &self,
        query: &Instance,
        query_class: usize,
        nun: &NunResult,
        method: RelevanceMethod,
        mode: OrderingMode,
        seed: u64,
    ) -> Result<CounterfactualResult, ExplainError> {
        let m = self.case_base.schema.n_features();
        let (mode, weights) = match method {
            RelevanceMethod::Random => (
                OrderingMode::Random,
                random_ordering_weights(m, seed::derive(seed, "rnd")),
            ),
            // Global weights: query and NUN orderings coincide.
            RelevanceMethod::Chi2 => (OrderingMode::QRel, self.chi2.clone()),
            informed => {
                let (instance, target) = match mode {
                    OrderingMode::QRel => (query, query_class),
                    OrderingMode::NRel => (&nun.nun, nun.nun_class),
                    OrderingMode::Random => {
                        return Err(ExplainError::BadCombination(
                            "random ordering only applies to the rnd method",
                        ))
                    }
                };
                let weights = match informed {
                    RelevanceMethod::Lime => {
                        let mut cfg = self.config.clone();
                        cfg.seed = seed::derive(seed, "lime");
                        lime_explain_for_class(self.model, self.case_base, instance, target, &cfg)?
                    }
                    RelevanceMethod::Shap => {
                        let mut cfg = self.config.clone();
                        cfg.seed = seed::derive(seed, "shap");
                        shap_explain_for_class(self.model, self.case_base, instance, target, &cfg)?
                    }
                    aggregate => match self.aggregates.get(&(aggregate, target)) {
                        Some(w) => w.clone(),
                        None => class_aggregate(
                            aggregate,
                            self.model,
                            self.case_base,
                            target,
                            &self.config,
                        )?,
                    },
                };
                (mode, weights)
            }
        };
        Ok(substitute_until_flip(
            query,
            query_class,
            nun,
            self.model,
            &weights,
            mode,
            &self.case_base.schema,
            self.config.absolute_ordering,
        )?)
    }
}

fn aggregate_key(method: RelevanceMethod) -> Result<RelevanceMethod, ExplainError> {
    match method {
        RelevanceMethod::Lime | RelevanceMethod::LimeClass => Ok(RelevanceMethod::LimeClass),
        RelevanceMethod::Shap | RelevanceMethod::ShapClass => Ok(RelevanceMethod::ShapClass),
        _ => Err(ExplainError::BadCombination(
            "class aggregates exist only for lime and shap",
        )),
    }
}

/// One-shot composition of the full pipeline. Builds a throwaway
/// [`ExplainEngine`]; batch callers should construct the engine once.
#[allow(clippy::too_many_arguments)]
pub fn explain_query<M: Classifier + ?Sized>(
    case_base: &Dataset,
    model: &M,
    query: &Instance,
    method: RelevanceMethod,
    mode: OrderingMode,
    config: &ExplainerConfig,
    desired_class: Option<usize>,
) -> Result<CounterfactualResult, ExplainError> {
    let engine = ExplainEngine::new(case_base, model, config.clone())?;
    engine.explain(query, method, mode, desired_class, config.seed)
}
