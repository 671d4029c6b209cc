//! Checks the sampled Shapley estimator against exact coalition enumeration
//! on small feature counts, and verifies the classic axioms (efficiency,
//! dummy, symmetry) hold for the exact values.

use cfx_core::classifier::{Classifier, FnClassifier};
use cfx_core::dataset::Dataset;
use cfx_core::relevance::{shap_explain_for_class, ExplainerConfig};
use cfx_core::schema::{Feature, Instance, Schema};

fn schema(m: usize) -> Schema {
    let features = (0..m).map(|i| Feature::continuous(&format!("f{i}"), 0.0, 1.0)).collect();
    Schema::new(features, "y", vec!["a".into(), "b".into()]).unwrap()
}

fn dataset(m: usize, rows: Vec<Vec<f64>>) -> Dataset {
    let labels = (0..rows.len()).map(|i| i % 2).collect();
    Dataset::new(schema(m), rows.into_iter().map(Instance::new).collect(), labels).unwrap()
}

/// Coalition value: mean model output with coalition features taken from the
/// instance and the rest from each background row in turn.
fn coalition_value<M: Classifier>(
    model: &M,
    instance: &Instance,
    backgrounds: &[Instance],
    coalition: u32,
    target: usize,
) -> f64 {
    let mut total = 0.0;
    for bg in backgrounds {
        let mut z = bg.clone();
        for i in 0..instance.len() {
            if coalition & (1 << i) != 0 {
                z.values[i] = instance.values[i];
            }
        }
        total += model.predict_proba(&z)[target];
    }
    total / backgrounds.len() as f64
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Exact Shapley values by enumerating all 2^m coalitions.
fn exact_shapley<M: Classifier>(
    model: &M,
    instance: &Instance,
    backgrounds: &[Instance],
    target: usize,
) -> Vec<f64> {
    let m = instance.len();
    assert!(m <= 16, "enumeration oracle is for small m");
    let mut values = vec![0.0; 1 << m];
    for coalition in 0..(1u32 << m) {
        values[coalition as usize] =
            coalition_value(model, instance, backgrounds, coalition, target);
    }
    let mut phi = vec![0.0; m];
    for i in 0..m {
        let bit = 1u32 << i;
        for coalition in 0..(1u32 << m) {
            if coalition & bit != 0 {
                continue;
            }
            let s = coalition.count_ones() as usize;
            let weight = factorial(s) * factorial(m - s - 1) / factorial(m);
            phi[i] += weight
                * (values[(coalition | bit) as usize] - values[coalition as usize]);
        }
    }
    phi
}

fn interaction_model() -> impl Classifier {
    FnClassifier::new(2, |x: &Instance| {
        let p = 0.1 + 0.3 * x.values[0] + 0.25 * x.values[1] * x.values[2]
            + 0.15 * x.values[3];
        vec![1.0 - p, p]
    })
}

#[test]
fn exact_values_satisfy_efficiency() {
    let model = interaction_model();
    let backgrounds: Vec<Instance> = vec![
        Instance::new(vec![0.0, 0.1, 0.2, 0.0]),
        Instance::new(vec![0.3, 0.0, 0.1, 0.2]),
        Instance::new(vec![0.1, 0.2, 0.0, 0.1]),
    ];
    let x = Instance::new(vec![0.9, 0.8, 0.7, 0.6]);
    let phi = exact_shapley(&model, &x, &backgrounds, 1);
    let fx = model.predict_proba(&x)[1];
    let mean_bg: f64 =
        backgrounds.iter().map(|b| model.predict_proba(b)[1]).sum::<f64>() / 3.0;
    let total: f64 = phi.iter().sum();
    assert!(
        (total - (fx - mean_bg)).abs() < 1e-9,
        "efficiency violated: {total} vs {}",
        fx - mean_bg
    );
}

#[test]
fn exact_values_respect_dummy_and_symmetry() {
    // p = 0.2 + 0.3*x0 + 0.3*x1; x2 is a dummy, x0 and x1 are symmetric.
    let model = FnClassifier::new(2, |x: &Instance| {
        let p = 0.2 + 0.3 * x.values[0] + 0.3 * x.values[1];
        vec![1.0 - p, p]
    });
    let backgrounds: Vec<Instance> = vec![
        Instance::new(vec![0.0, 0.0, 0.9]),
        Instance::new(vec![0.2, 0.2, 0.1]),
    ];
    let x = Instance::new(vec![0.9, 0.9, 0.5]);
    let phi = exact_shapley(&model, &x, &backgrounds, 1);
    assert!(phi[2].abs() < 1e-12, "dummy feature earned {}", phi[2]);
    assert!((phi[0] - phi[1]).abs() < 1e-12, "symmetric features diverged: {phi:?}");
}

#[test]
fn sampled_estimator_matches_enumeration() {
    let model = interaction_model();
    let rows = vec![
        vec![0.0, 0.1, 0.2, 0.0],
        vec![0.3, 0.0, 0.1, 0.2],
        vec![0.1, 0.2, 0.0, 0.1],
        vec![0.2, 0.3, 0.3, 0.0],
    ];
    let train = dataset(4, rows.clone());
    let backgrounds: Vec<Instance> = rows.into_iter().map(Instance::new).collect();
    let x = Instance::new(vec![0.9, 0.8, 0.7, 0.6]);
    let oracle = exact_shapley(&model, &x, &backgrounds, 1);

    let cfg = ExplainerConfig {
        n_samples: 4000,
        background_size: 4, // the whole table, matching the oracle
        seed: 33,
        ..Default::default()
    };
    let estimate = shap_explain_for_class(&model, &train, &x, 1, &cfg).unwrap();
    for (i, (est, ora)) in estimate.weights.iter().zip(&oracle).enumerate() {
        assert!(
            (est - ora).abs() < 0.05,
            "feature {i}: estimate {est} vs oracle {ora}"
        );
    }
}

#[test]
fn sampled_estimator_matches_enumeration_with_categoricals() {
    let schema = Schema::new(
        vec![
            Feature::continuous("x", 0.0, 1.0),
            Feature::categorical("c", &["p", "q", "r"]),
            Feature::continuous("z", 0.0, 1.0),
        ],
        "y",
        vec!["a".into(), "b".into()],
    )
    .unwrap();
    let rows = vec![
        vec![0.1, 0.0, 0.3],
        vec![0.4, 1.0, 0.1],
        vec![0.0, 2.0, 0.0],
        vec![0.2, 0.0, 0.6],
        vec![0.5, 1.0, 0.2],
    ];
    let instances: Vec<Instance> = rows.iter().cloned().map(Instance::new).collect();
    let labels = (0..rows.len()).map(|i| i % 2).collect();
    let train = Dataset::new(schema, instances.clone(), labels).unwrap();
    let model = FnClassifier::new(2, |x: &Instance| {
        let bump = if x.values[1] == 2.0 { 0.25 } else { 0.0 };
        let p = 0.1 + 0.4 * x.values[0] + bump + 0.1 * x.values[2];
        vec![1.0 - p, p]
    });
    let x = Instance::new(vec![0.8, 2.0, 0.9]);
    let oracle = exact_shapley(&model, &x, &instances, 1);
    let cfg = ExplainerConfig {
        n_samples: 4000,
        background_size: 5,
        seed: 77,
        ..Default::default()
    };
    let estimate = shap_explain_for_class(&model, &train, &x, 1, &cfg).unwrap();
    for (i, (est, ora)) in estimate.weights.iter().zip(&oracle).enumerate() {
        assert!(
            (est - ora).abs() < 0.05,
            "feature {i}: estimate {est} vs oracle {ora}"
        );
    }
}
