//! Compares the batch measures against an independently coded double loop
//! over randomized batches of (query, counterfactual) pairs.

use cfx_core::counterfactual::{CounterfactualResult, FeatureChange};
use cfx_core::metrics::compute_metrics;
use cfx_core::neighbours::NunResult;
use cfx_core::schema::{Feature, FeatureKind, Instance, Schema};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_schema(rng: &mut ChaCha8Rng, categorical_only: bool) -> Schema {
    let m = rng.gen_range(1..8);
    let features = (0..m)
        .map(|i| {
            if categorical_only || rng.gen_bool(0.5) {
                Feature::categorical(&format!("f{i}"), &["u", "v", "w"])
            } else {
                Feature::continuous(&format!("f{i}"), 0.0, 10.0)
            }
        })
        .collect();
    Schema::new(features, "y", vec!["a".into(), "b".into()]).unwrap()
}

fn random_value(rng: &mut ChaCha8Rng, kind: &FeatureKind) -> f64 {
    match kind {
        FeatureKind::Continuous { .. } => (rng.gen_range(0..11) as f64) / 10.0,
        FeatureKind::Categorical { .. } => rng.gen_range(0..3) as f64,
    }
}

/// A random (query, counterfactual) pair differing in at least one feature.
fn random_pair(rng: &mut ChaCha8Rng, schema: &Schema) -> (Instance, CounterfactualResult) {
    let m = schema.n_features();
    let query = Instance::new(
        schema.features.iter().map(|f| random_value(rng, &f.kind)).collect(),
    );
    let mut cf = query.clone();
    loop {
        for i in 0..m {
            if rng.gen_bool(0.4) {
                cf.values[i] = random_value(rng, &schema.features[i].kind);
            }
        }
        if cf.values != query.values {
            break;
        }
    }
    let changes: Vec<FeatureChange> = (0..m)
        .filter(|&i| cf.values[i] != query.values[i])
        .map(|i| FeatureChange {
            feature: i,
            from: query.values[i],
            to: cf.values[i],
            delta: match schema.features[i].kind {
                FeatureKind::Continuous { .. } => (cf.values[i] - query.values[i]).abs(),
                FeatureKind::Categorical { .. } => 1.0,
            },
        })
        .collect();
    let result = CounterfactualResult {
        nun_used: NunResult { nun: cf.clone(), nun_class: 1, distance: 0.0, case_index: 0 },
        counterfactual: cf,
        query_class: 0,
        new_class: 1,
        n_changes: changes.len(),
        amount: changes.iter().map(|c| c.delta).sum(),
        changed_features: changes,
    };
    (query, result)
}

/// The straight-from-the-definition reference: count differing features per
/// pair, sum per-feature change amounts, divide as stated.
fn reference_measures(
    results: &[CounterfactualResult],
    queries: &[Instance],
    schema: &Schema,
) -> (f64, f64) {
    let n = queries.len() as f64;
    let mut total_diffs = 0.0;
    let mut total_amount = 0.0;
    for j in 0..queries.len() {
        for i in 0..schema.n_features() {
            let q = queries[j].values[i];
            let c = results[j].counterfactual.values[i];
            match schema.features[i].kind {
                FeatureKind::Continuous { .. } => {
                    if c != q {
                        total_diffs += 1.0;
                        total_amount += (c - q).abs();
                    }
                }
                FeatureKind::Categorical { .. } => {
                    if c != q {
                        total_diffs += 1.0;
                        total_amount += 1.0;
                    }
                }
            }
        }
    }
    let mean_changes = total_diffs / n;
    let mean_amount = total_amount / (n * mean_changes);
    (mean_changes, mean_amount)
}

#[test]
fn matches_double_loop_reference_on_random_batches() {
    let mut rng = ChaCha8Rng::seed_from_u64(314);
    for trial in 0..50 {
        let schema = random_schema(&mut rng, false);
        let batch = rng.gen_range(1..60);
        let mut queries = Vec::new();
        let mut results = Vec::new();
        for _ in 0..batch {
            let (q, r) = random_pair(&mut rng, &schema);
            queries.push(q);
            results.push(r);
        }
        let report = compute_metrics(&results, &queries, &schema).unwrap();
        let (ref_changes, ref_amount) = reference_measures(&results, &queries, &schema);
        assert_eq!(report.mean_changes, ref_changes, "trial {trial}: change count drifted");
        assert!(
            (report.mean_amount - ref_amount).abs() < 1e-12,
            "trial {trial}: amount drifted {} vs {}",
            report.mean_amount,
            ref_amount
        );
        assert_eq!(report.n_queries, batch);
    }
}

#[test]
fn categorical_only_batches_pin_amount_to_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(2718);
    for _ in 0..10 {
        let schema = random_schema(&mut rng, true);
        let batch = rng.gen_range(1..40);
        let mut queries = Vec::new();
        let mut results = Vec::new();
        for _ in 0..batch {
            let (q, r) = random_pair(&mut rng, &schema);
            queries.push(q);
            results.push(r);
        }
        let report = compute_metrics(&results, &queries, &schema).unwrap();
        assert_eq!(report.mean_amount, 1.0, "overlap distance must make this exact");
    }
}
