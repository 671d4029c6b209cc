//! Sampled Shapley values by permutation walks over a background sample.
//!
//! Each pass draws a feature permutation and one background instance, then
//! switches features from the background value to the instance value in
//! permutation order, crediting every feature with the probability delta its
//! switch causes. Averaging over passes estimates the Shapley value of the
//! model's target-class probability.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::classifier::Classifier;
use crate::dataset::Dataset;
use crate::schema::Instance;

use super::{ExplainerConfig, RelevanceError, RelevanceMethod, RelevanceWeights};

/// Explain the model's predicted class for `instance`.
pub fn shap_explain<M: Classifier + ?Sized>(
    model: &M,
    train: &Dataset,
    instance: &Instance,
    config: &ExplainerConfig,
) -> Result<RelevanceWeights, RelevanceError> {
    shap_explain_for_class(model, train, instance, model.predict(instance), config)
}

/// Explain the model's probability for an explicit target class.
pub fn shap_explain_for_class<M: Classifier + ?Sized>(
    model: &M,
    train: &Dataset,
    instance: &Instance,
    target_class: usize,
    config: &ExplainerConfig,
) -> Result<RelevanceWeights, RelevanceError> {
    config.validate()?;
    if train.is_empty() {
        return Err(RelevanceError::EmptyBackground);
    }
    let m = train.schema.n_features();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let background = background_sample(&mut rng, train.len(), config.background_size);

    let mut acc = vec![0.0f64; m];
    let mut perm: Vec<usize> = (0..m).collect();
    let mut walker = Instance::new(vec![0.0; m]);
    for _ in 0..config.n_samples {
        let bg = &train.instances[background[rng.gen_range(0..background.len())]];
        perm.shuffle(&mut rng);
        walker.values.copy_from_slice(&bg.values);
        let mut prev = model.predict_proba(&walker)[target_class];
        for &feature in &perm {
            walker.values[feature] = instance.values[feature];
            let cur = model.predict_proba(&walker)[target_class];
            acc[feature] += cur - prev;
            prev = cur;
        }
    }
    for v in acc.iter_mut() {
        *v /= config.n_samples as f64;
    }
    Ok(RelevanceWeights::new(acc, target_class, RelevanceMethod::Shap))
}

/// Seeded draw of `size` distinct row indices (all rows when `size` exceeds
/// the table).
fn background_sample(rng: &mut ChaCha8Rng, n_rows: usize, size: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n_rows).collect();
    let k = size.min(n_rows);
    for i in 0..k {
        let j = rng.gen_range(i..n_rows);
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool
}
