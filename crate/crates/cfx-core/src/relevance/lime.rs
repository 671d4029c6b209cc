//! Local surrogate relevance: weighted linear regression over labeled
//! perturbations of one instance.
//!
//! Perturbations jitter continuous features with Gaussian noise scaled by
//! the per-feature training standard deviation (clamped back into `[0, 1]`)
//! and resample categorical features from the training marginal with
//! probability 1/2. Each perturbation is labeled with the model's
//! probability for the target class and weighted by
//! `exp(-d^2 / kernel_width^2)` where `d` is the mixed distance to the
//! explained instance. The regression coefficients are the weights.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::classifier::Classifier;
use crate::dataset::Dataset;
use crate::schema::{distance, FeatureKind, Instance};

use super::{ExplainerConfig, RelevanceError, RelevanceMethod, RelevanceWeights};

/// Explain the model's predicted class for `instance`.
pub fn lime_explain<M: Classifier + ?Sized>(
    model: &M,
    train: &Dataset,
    instance: &Instance,
    config: &ExplainerConfig,
) -> Result<RelevanceWeights, RelevanceError> {
    lime_explain_for_class(model, train, instance, model.predict(instance), config)
}

/// Explain the model's probability for an explicit target class.
pub fn lime_explain_for_class<M: Classifier + ?Sized>(
    model: &M,
    train: &Dataset,
    instance: &Instance,
    target_class: usize,
    config: &ExplainerConfig,
) -> Result<RelevanceWeights, RelevanceError> {
    config.validate()?;
    if train.is_empty() {
        return Err(RelevanceError::EmptyTraining);
    }
    let m = train.schema.n_features();
    let kernel_width = config.kernel_width.unwrap_or(0.75 * Float::sqrt(m as f64));
    let noise_scale = continuous_stddev(train);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let n = config.n_samples;
    // Column-major design matrix with a leading intercept column.
    let mut columns = vec![vec![0.0f64; n]; m + 1];
    let mut response = vec![0.0f64; n];
    let mut sample_weight = vec![0.0f64; n];

    let mut perturbed = instance.clone();
    for s in 0..n {
        perturbed.values.copy_from_slice(&instance.values);
        for (i, feat) in train.schema.features.iter().enumerate() {
            match feat.kind {
                FeatureKind::Continuous { .. } => {
                    let z = instance.values[i] + noise_scale[i] * standard_normal(&mut rng);
                    perturbed.values[i] = z.max(0.0).min(1.0);
                }
                FeatureKind::Categorical { .. } => {
                    if rng.gen_bool(0.5) {
                        let row = rng.gen_range(0..train.len());
                        perturbed.values[i] = train.instances[row].values[i];
                    }
                }
            }
        }
        let d = distance(instance, &perturbed, &train.schema);
        sample_weight[s] = Float::exp(-(d * d) / (kernel_width * kernel_width));
        response[s] = model.predict_proba(&perturbed)[target_class];
        columns[0][s] = 1.0;
        for (i, feat) in train.schema.features.iter().enumerate() {
            columns[i + 1][s] = match feat.kind {
                FeatureKind::Continuous { .. } => perturbed.values[i],
                // Same-category indicator; raw category indices carry no
                // linear meaning.
                FeatureKind::Categorical { .. } => {
                    if perturbed.values[i] == instance.values[i] {
                        1.0
                    } else {
                        0.0
                    }
                }
            };
        }
    }

    // Columns that never vary (constant features, locked categories) are
    // collinear with the intercept; they get weight 0 and leave the system.
    let active: Vec<usize> = (1..=m)
        .filter(|&c| columns[c].iter().any(|&v| v != columns[c][0]))
        .collect();
    let mut used: Vec<&[f64]> = Vec::with_capacity(active.len() + 1);
    used.push(&columns[0]);
    for &c in &active {
        used.push(&columns[c]);
    }
    let beta = weighted_least_squares(&used, &response, &sample_weight)
        .ok_or(RelevanceError::DegenerateRegression)?;

    let mut weights = vec![0.0f64; m];
    for (k, &c) in active.iter().enumerate() {
        weights[c - 1] = beta[k + 1];
    }
    Ok(RelevanceWeights::new(weights, target_class, RelevanceMethod::Lime))
}

/// Population standard deviation per feature; zero for categorical entries.
fn continuous_stddev(train: &Dataset) -> Vec<f64> {
    let m = train.schema.n_features();
    let n = train.len() as f64;
    let mut out = vec![0.0f64; m];
    for (i, feat) in train.schema.features.iter().enumerate() {
        if feat.kind.is_categorical() {
            continue;
        }
        let mean = train.instances.iter().map(|x| x.values[i]).sum::<f64>() / n;
        let var =
            train.instances.iter().map(|x| (x.values[i] - mean).powi(2)).sum::<f64>() / n;
        out[i] = Float::sqrt(var);
    }
    out
}

/// Box-Muller standard normal draw.
fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
    let u2: f64 = rng.gen();
    Float::sqrt(-2.0 * Float::ln(u1)) * Float::cos(2.0 * core::f64::consts::PI * u2)
}

/// Solve the weighted normal equations for column-major design `columns`.
/// Returns `None` when the system is singular.
fn weighted_least_squares(
    columns: &[&[f64]],
    response: &[f64],
    sample_weight: &[f64],
) -> Option<Vec<f64>> {
    let p = columns.len();
    let n = response.len();
    let mut ata = vec![0.0f64; p * p];
    let mut atb = vec![0.0f64; p];
    for a in 0..p {
        for b in a..p {
            let mut acc = 0.0;
            for s in 0..n {
                acc += sample_weight[s] * columns[a][s] * columns[b][s];
            }
            ata[a * p + b] = acc;
            ata[b * p + a] = acc;
        }
        let mut acc = 0.0;
        for s in 0..n {
            acc += sample_weight[s] * columns[a][s] * response[s];
        }
        atb[a] = acc;
    }
    solve_linear(&mut ata, &mut atb, p)
}

/// Gaussian elimination with partial pivoting on a dense `p x p` system.
fn solve_linear(a: &mut [f64], b: &mut [f64], p: usize) -> Option<Vec<f64>> {
    let scale = a.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
    let tol = 1e-12 * (1.0 + scale);
    for col in 0..p {
        let mut pivot = col;
        for row in col + 1..p {
            if Float::abs(a[row * p + col]) > Float::abs(a[pivot * p + col]) {
                pivot = row;
            }
        }
        if Float::abs(a[pivot * p + col]) <= tol {
            return None;
        }
        if pivot != col {
            for k in 0..p {
                a.swap(col * p + k, pivot * p + k);
            }
            b.swap(col, pivot);
        }
        let inv = 1.0 / a[col * p + col];
        for row in col + 1..p {
            let factor = a[row * p + col] * inv;
            if factor == 0.0 {
                continue;
            }
            for k in col..p {
                a[row * p + k] -= factor * a[col * p + k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0f64; p];
    for col in (0..p).rev() {
        let mut acc = b[col];
        for k in col + 1..p {
            acc -= a[col * p + k] * x[k];
        }
        x[col] = acc / a[col * p + col];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::FnClassifier;
    use crate::schema::{Feature, Schema};

    fn uniform_train(seed: u64, n: usize, m: usize) -> Dataset {
        let features = (0..m)
            .map(|i| Feature::continuous(&alloc::format!("f{i}"), 0.0, 1.0))
            .collect();
        let schema = Schema::new(features, "y", alloc::vec!["a".into(), "b".into()]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let instances: Vec<Instance> =
            (0..n).map(|_| Instance::new((0..m).map(|_| rng.gen::<f64>()).collect())).collect();
        let labels = (0..n).map(|i| i % 2).collect();
        Dataset::new(schema, instances, labels).unwrap()
    }

    #[test]
    fn recovers_a_linear_black_box() {
        // Probability of class 1 is exactly feature 0: the surrogate must
        // load on feature 0 and ignore feature 1.
        let train = uniform_train(1, 200, 2);
        let model = FnClassifier::new(2, |x: &Instance| {
            let p = x.values[0];
            alloc::vec![1.0 - p, p]
        });
        let cfg = ExplainerConfig { seed: 9, ..Default::default() };
        let query = Instance::new(alloc::vec![0.8, 0.3]);
        let w = lime_explain(&model, &train, &query, &cfg).unwrap();
        assert_eq!(w.target_class, 1);
        assert!(w.weights[0] > 0.0);
        assert!(
            w.weights[0].abs() >= 10.0 * w.weights[1].abs(),
            "informative feature should dominate: {:?}",
            w.weights
        );
    }

    #[test]
    fn constant_model_gets_zero_weights() {
        let train = uniform_train(2, 100, 3);
        let model = FnClassifier::new(2, |_: &Instance| alloc::vec![0.3, 0.7]);
        let cfg = ExplainerConfig { n_samples: 400, seed: 5, ..Default::default() };
        let w = lime_explain(&model, &train, &Instance::new(alloc::vec![0.5, 0.5, 0.5]), &cfg)
            .unwrap();
        for v in &w.weights {
            assert!(v.abs() < 1e-6, "expected ~0, got {v}");
        }
    }

    #[test]
    fn same_seed_same_weights() {
        let train = uniform_train(3, 150, 3);
        let model = FnClassifier::new(2, |x: &Instance| {
            let p = (x.values[0] + x.values[2]) / 2.0;
            alloc::vec![1.0 - p, p]
        });
        let cfg = ExplainerConfig { n_samples: 300, seed: 21, ..Default::default() };
        let q = Instance::new(alloc::vec![0.2, 0.9, 0.6]);
        let a = lime_explain(&model, &train, &q, &cfg).unwrap();
        let b = lime_explain(&model, &train, &q, &cfg).unwrap();
        assert_eq!(a, b);
        let c = lime_explain(&model, &train, &q, &ExplainerConfig { seed: 22, ..cfg }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn too_few_samples_is_degenerate() {
        let train = uniform_train(4, 50, 5);
        let model = FnClassifier::new(2, |x: &Instance| {
            let p = x.values[0];
            alloc::vec![1.0 - p, p]
        });
        let cfg = ExplainerConfig { n_samples: 3, seed: 1, ..Default::default() };
        let err = lime_explain(&model, &train, &Instance::new(alloc::vec![0.5; 5]), &cfg)
            .unwrap_err();
        assert_eq!(err, RelevanceError::DegenerateRegression);
    }

    #[test]
    fn constant_feature_gets_zero_weight() {
        // Feature 1 is constant in training: no noise scale, so its column
        // never varies and its weight must be exactly zero.
        let schema = Schema::new(
            alloc::vec![
                Feature::continuous("x", 0.0, 1.0),
                Feature::continuous("const", 5.0, 5.0),
            ],
            "y",
            alloc::vec!["a".into(), "b".into()],
        )
        .unwrap();
        let instances: Vec<Instance> =
            (0..60).map(|i| Instance::new(alloc::vec![i as f64 / 59.0, 0.0])).collect();
        let labels = (0..60).map(|i| i % 2).collect();
        let train = Dataset::new(schema, instances, labels).unwrap();
        let model = FnClassifier::new(2, |x: &Instance| {
            let p = x.values[0];
            alloc::vec![1.0 - p, p]
        });
        let cfg = ExplainerConfig { n_samples: 200, seed: 8, ..Default::default() };
        let w = lime_explain_for_class(
            &model,
            &train,
            &Instance::new(alloc::vec![0.4, 0.0]),
            1,
            &cfg,
        )
        .unwrap();
        assert_eq!(w.weights[1], 0.0);
        assert!(w.weights[0] > 0.5);
    }

    #[test]
    fn wls_solves_a_known_system() {
        // y = 2 + 3x, uniform weights.
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let intercept = alloc::vec![1.0; 10];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 + 3.0 * x).collect();
        let w = alloc::vec![1.0; 10];
        let cols: Vec<&[f64]> = alloc::vec![&intercept, &xs];
        let beta = weighted_least_squares(&cols, &ys, &w).unwrap();
        assert!((beta[0] - 2.0).abs() < 1e-9);
        assert!((beta[1] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn singular_system_detected() {
        let c0 = alloc::vec![1.0; 4];
        let c1 = alloc::vec![2.0; 4]; // collinear with intercept
        let y = alloc::vec![1.0, 2.0, 3.0, 4.0];
        let w = alloc::vec![1.0; 4];
        let cols: Vec<&[f64]> = alloc::vec![&c0, &c1];
        assert!(weighted_least_squares(&cols, &y, &w).is_none());
    }
}
