//! Black-box classifier contract.
//!
//! Everything downstream of model training — neighbour retrieval, relevance
//! weighting, the substitution loop — depends only on this trait, so any
//! prediction source (the built-in forest, a lookup table, a subprocess)
//! can be plugged in.

use alloc::vec::Vec;
use core::fmt;

use crate::dataset::Dataset;
use crate::schema::Instance;

/// A classifier over normalized instances.
///
/// `predict_proba` must return one probability per class, each in `[0, 1]`,
/// summing to 1 within 1e-9. `predict` is the argmax with ties broken by the
/// lowest class index; implementors should not override that tie rule.
pub trait Classifier {
    fn n_classes(&self) -> usize;

    fn predict_proba(&self, instance: &Instance) -> Vec<f64>;

    fn predict(&self, instance: &Instance) -> usize {
        argmax(&self.predict_proba(instance))
    }
}

/// Index of the largest value, lowest index on ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Wrap a plain probability function as a [`Classifier`]. Handy for tests
/// and for constructed black boxes.
pub struct FnClassifier<F> {
    n_classes: usize,
    f: F,
}

impl<F> FnClassifier<F>
where
    F: Fn(&Instance) -> Vec<f64>,
{
    pub fn new(n_classes: usize, f: F) -> Self {
        FnClassifier { n_classes, f }
    }
}

impl<F> Classifier for FnClassifier<F>
where
    F: Fn(&Instance) -> Vec<f64>,
{
    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn predict_proba(&self, instance: &Instance) -> Vec<f64> {
        (self.f)(instance)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    EmptyTestSet,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::EmptyTestSet => write!(f, "cannot evaluate on an empty test set"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for EvalError {}

/// Fraction of test instances whose prediction matches the stored label.
pub fn evaluate_accuracy<M: Classifier + ?Sized>(
    model: &M,
    test: &Dataset,
) -> Result<f64, EvalError> {
    if test.is_empty() {
        return Err(EvalError::EmptyTestSet);
    }
    let hits = test
        .instances
        .iter()
        .zip(&test.labels)
        .filter(|(x, &y)| model.predict(x) == y)
        .count();
    Ok(hits as f64 / test.len() as f64)
}
