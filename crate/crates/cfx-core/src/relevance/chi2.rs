//! Global chi-squared feature weights.
//!
//! Continuous features are discretized into equal-width bins over `[0, 1]`;
//! categorical features use their categories directly. The weight of a
//! feature is the chi-squared statistic of its (bin x class) contingency
//! table, so weights are non-negative and identical for every query.

use alloc::vec;

use crate::dataset::Dataset;
use crate::schema::FeatureKind;

use super::{RelevanceMethod, RelevanceWeights};

/// Chi-squared statistic per feature over the training data.
pub fn chi2_weights(train: &Dataset, bins: usize) -> RelevanceWeights {
    let bins = bins.max(1);
    let n_classes = train.schema.n_classes();
    let m = train.schema.n_features();
    let mut weights = vec![0.0f64; m];
    for (feature, feat) in train.schema.features.iter().enumerate() {
        let n_rows = match &feat.kind {
            FeatureKind::Continuous { .. } => bins,
            FeatureKind::Categorical { categories } => categories.len(),
        };
        let mut table = vec![0u64; n_rows * n_classes];
        for (x, &y) in train.instances.iter().zip(&train.labels) {
            let row = match feat.kind {
                FeatureKind::Continuous { .. } => {
                    ((x.values[feature] * bins as f64) as usize).min(bins - 1)
                }
                FeatureKind::Categorical { .. } => x.values[feature] as usize,
            };
            table[row * n_classes + y] += 1;
        }
        weights[feature] = chi2_statistic(&table, n_rows, n_classes);
    }
    RelevanceWeights::new(weights, 0, RelevanceMethod::Chi2)
}

/// Pearson chi-squared statistic of an observed contingency table. Rows or
/// columns with zero totals contribute nothing.
fn chi2_statistic(table: &[u64], n_rows: usize, n_cols: usize) -> f64 {
    let mut row_totals = vec![0u64; n_rows];
    let mut col_totals = vec![0u64; n_cols];
    let mut grand = 0u64;
    for r in 0..n_rows {
        for c in 0..n_cols {
            let v = table[r * n_cols + c];
            row_totals[r] += v;
            col_totals[c] += v;
            grand += v;
        }
    }
    if grand == 0 {
        return 0.0;
    }
    let mut stat = 0.0;
    for r in 0..n_rows {
        if row_totals[r] == 0 {
            continue;
        }
        for c in 0..n_cols {
            if col_totals[c] == 0 {
                continue;
            }
            let expected = row_totals[r] as f64 * col_totals[c] as f64 / grand as f64;
            let observed = table[r * n_cols + c] as f64;
            let diff = observed - expected;
            stat += diff * diff / expected;
        }
    }
    stat
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::{Feature, Instance, Schema};

    fn dataset(values: Vec<Vec<f64>>, labels: Vec<usize>, features: Vec<Feature>) -> Dataset {
        let schema =
            Schema::new(features, "y", alloc::vec!["a".into(), "b".into()]).unwrap();
        let instances = values.into_iter().map(Instance::new).collect();
        Dataset::new(schema, instances, labels).unwrap()
    }

    #[test]
    fn constant_feature_scores_zero() {
        let ds = dataset(
            (0..20).map(|_| alloc::vec![0.5]).collect(),
            (0..20).map(|i| i % 2).collect(),
            alloc::vec![Feature::continuous("x", 0.0, 1.0)],
        );
        let w = chi2_weights(&ds, 10);
        assert_eq!(w.weights[0], 0.0);
    }

    #[test]
    fn perfectly_associated_feature_scores_n() {
        // Hand-computed 2x2 table: 60/40 split, feature equals the label.
        // Expected cells are 36/24/24/16, giving 16 + 24 + 24 + 36 = 100.
        let n = 100;
        let labels: Vec<usize> = (0..n).map(|i| usize::from(i >= 60)).collect();
        let values = labels.iter().map(|&y| alloc::vec![y as f64]).collect();
        let ds = dataset(
            values,
            labels,
            alloc::vec![Feature::categorical("c", &["lo", "hi"])],
        );
        let w = chi2_weights(&ds, 10);
        assert!((w.weights[0] - 100.0).abs() < 1e-9, "{}", w.weights[0]);
    }

    #[test]
    fn weights_are_row_order_invariant_and_nonnegative() {
        let values: Vec<Vec<f64>> =
            (0..30).map(|i| alloc::vec![(i % 7) as f64 / 6.0, (i % 3) as f64]).collect();
        let labels: Vec<usize> = (0..30).map(|i| usize::from(i % 5 < 2)).collect();
        let features = alloc::vec![
            Feature::continuous("x", 0.0, 1.0),
            Feature::categorical("c", &["p", "q", "r"]),
        ];
        let ds = dataset(values.clone(), labels.clone(), features.clone());
        let w = chi2_weights(&ds, 5);
        assert!(w.weights.iter().all(|&v| v >= 0.0));

        let perm: Vec<usize> = (0..30).rev().collect();
        let shuffled = dataset(
            perm.iter().map(|&i| values[i].clone()).collect(),
            perm.iter().map(|&i| labels[i]).collect(),
            features,
        );
        assert_eq!(w.weights, chi2_weights(&shuffled, 5).weights);
    }
}
