//! Random forest over mixed tabular features.
//!
//! Axis-aligned threshold splits on continuous features, equality splits on
//! categorical ones, Gini impurity as the split criterion. Each tree trains
//! on a bootstrap resample and draws `ceil(sqrt(m))` candidate features per
//! split. All per-tree randomness derives from `(seed, tree_index)`, so
//! serial and parallel training produce identical forests.
//!
//! Prediction aggregates the raw class histograms stored at the reached
//! leaves and normalizes once at the end. Integer accumulation keeps the
//! probabilities exactly invariant to tree order.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Float;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::classifier::Classifier;
use crate::dataset::Dataset;
use crate::schema::{FeatureKind, Instance};
use crate::seed;

/// Training hyperparameters.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams { n_trees: 100, max_depth: 16, min_samples_leaf: 1, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TrainError {
    EmptyTrainingSet,
    /// All training labels are identical; a discriminative forest cannot be
    /// fit.
    SingleClassTraining,
}

impl fmt::Display for TrainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrainError::EmptyTrainingSet => write!(f, "training set is empty"),
            TrainError::SingleClassTraining => {
                write!(f, "training set contains a single class")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for TrainError {}

/// Node test: continuous goes left when `value <= threshold`, categorical
/// goes left when `value == category`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SplitTest {
    Threshold(f64),
    Equal(f64),
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TreeNode {
    Split { feature: usize, test: SplitTest, left: u32, right: u32 },
    Leaf { counts: Vec<u32> },
}

/// One trained tree; node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecisionTree {
    nodes: Vec<TreeNode>,
}

impl DecisionTree {
    /// Class histogram of the leaf this instance falls into.
    fn leaf_counts(&self, x: &Instance) -> &[u32] {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                TreeNode::Leaf { counts } => return counts,
                TreeNode::Split { feature, test, left, right } => {
                    let v = x.values[*feature];
                    let go_left = match test {
                        SplitTest::Threshold(t) => v <= *t,
                        SplitTest::Equal(c) => v == *c,
                    };
                    at = if go_left { *left as usize } else { *right as usize };
                }
            }
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }
}

/// Bagged ensemble of decision trees.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RandomForest {
    params: ForestParams,
    n_classes: usize,
    n_features: usize,
    trees: Vec<DecisionTree>,
}

impl RandomForest {
    /// Train on a dataset. Needs at least two classes present.
    pub fn train(train: &Dataset, params: &ForestParams) -> Result<Self, TrainError> {
        if train.is_empty() {
            return Err(TrainError::EmptyTrainingSet);
        }
        if train.class_counts().iter().filter(|&&c| c > 0).count() < 2 {
            return Err(TrainError::SingleClassTraining);
        }
        let n_classes = train.schema.n_classes();
        let m = train.schema.n_features();
        let subset = Float::ceil(Float::sqrt(m as f64)) as usize;
        let subset = subset.clamp(1, m);
        let categorical: Vec<bool> =
            train.schema.features.iter().map(|f| f.kind.is_categorical()).collect();
        let n_categories: Vec<usize> = train
            .schema
            .features
            .iter()
            .map(|f| match &f.kind {
                FeatureKind::Categorical { categories } => categories.len(),
                FeatureKind::Continuous { .. } => 0,
            })
            .collect();
        let ctx = TreeContext {
            train,
            n_classes,
            subset,
            categorical: &categorical,
            n_categories: &n_categories,
            max_depth: params.max_depth,
            min_samples_leaf: params.min_samples_leaf.max(1),
        };

        let tree_seeds: Vec<u64> =
            (0..params.n_trees).map(|t| seed::derive_index(params.seed, t as u64)).collect();
        #[cfg(feature = "parallel")]
        let trees = {
            use rayon::prelude::*;
            tree_seeds.par_iter().map(|&s| build_tree(&ctx, s)).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let trees = tree_seeds.iter().map(|&s| build_tree(&ctx, s)).collect();

        Ok(RandomForest { params: params.clone(), n_classes, n_features: m, trees })
    }

    pub fn params(&self) -> &ForestParams {
        &self.params
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }
}

impl Classifier for RandomForest {
    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn predict_proba(&self, instance: &Instance) -> Vec<f64> {
        debug_assert_eq!(instance.len(), self.n_features);
        let mut acc = vec![0u64; self.n_classes];
        let mut total = 0u64;
        for tree in &self.trees {
            for (c, &count) in tree.leaf_counts(instance).iter().enumerate() {
                acc[c] += count as u64;
                total += count as u64;
            }
        }
        acc.iter().map(|&c| c as f64 / total as f64).collect()
    }
}

struct TreeContext<'a> {
    train: &'a Dataset,
    n_classes: usize,
    subset: usize,
    categorical: &'a [bool],
    n_categories: &'a [usize],
    max_depth: usize,
    min_samples_leaf: usize,
}

fn build_tree(ctx: &TreeContext<'_>, tree_seed: u64) -> DecisionTree {
    let mut rng = ChaCha8Rng::seed_from_u64(tree_seed);
    let n = ctx.train.len();
    let sample: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
    let mut nodes = Vec::new();
    grow(ctx, &mut rng, &mut nodes, &sample, 0);
    DecisionTree { nodes }
}

fn class_counts(ctx: &TreeContext<'_>, samples: &[usize]) -> Vec<u32> {
    let mut counts = vec![0u32; ctx.n_classes];
    for &s in samples {
        counts[ctx.train.labels[s]] += 1;
    }
    counts
}

fn gini(counts: &[u32], total: usize) -> f64 {
    let total = total as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / total) * (c as f64 / total)).sum::<f64>()
}

struct Candidate {
    feature: usize,
    test: SplitTest,
    decrease: f64,
}

fn grow(
    ctx: &TreeContext<'_>,
    rng: &mut ChaCha8Rng,
    nodes: &mut Vec<TreeNode>,
    samples: &[usize],
    depth: usize,
) -> u32 {
    let counts = class_counts(ctx, samples);
    let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
    if pure
        || depth >= ctx.max_depth
        || samples.len() < 2 * ctx.min_samples_leaf
        || samples.len() < 2
    {
        let idx = nodes.len() as u32;
        nodes.push(TreeNode::Leaf { counts });
        return idx;
    }

    let features = sample_features(rng, ctx.train.schema.n_features(), ctx.subset);
    let mut best: Option<Candidate> = None;
    for &f in &features {
        let cand = if ctx.categorical[f] {
            best_categorical_split(ctx, samples, f, &counts)
        } else {
            best_threshold_split(ctx, samples, f, &counts)
        };
        if let Some(c) = cand {
            // Strict improvement keeps the first (deterministic) winner.
            if best.as_ref().map_or(true, |b| c.decrease > b.decrease) {
                best = Some(c);
            }
        }
    }

    let best = match best {
        Some(b) if b.decrease > 1e-12 => b,
        _ => {
            let idx = nodes.len() as u32;
            nodes.push(TreeNode::Leaf { counts });
            return idx;
        }
    };

    let (left_samples, right_samples): (Vec<usize>, Vec<usize>) =
        samples.iter().partition(|&&s| {
            let v = ctx.train.instances[s].values[best.feature];
            match best.test {
                SplitTest::Threshold(t) => v <= t,
                SplitTest::Equal(c) => v == c,
            }
        });

    let idx = nodes.len();
    nodes.push(TreeNode::Leaf { counts: Vec::new() }); // placeholder
    let left = grow(ctx, rng, nodes, &left_samples, depth + 1);
    let right = grow(ctx, rng, nodes, &right_samples, depth + 1);
    nodes[idx] = TreeNode::Split { feature: best.feature, test: best.test, left, right };
    idx as u32
}

/// Partial Fisher-Yates draw of `k` distinct feature indices.
fn sample_features(rng: &mut ChaCha8Rng, m: usize, k: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..m).collect();
    for i in 0..k {
        let j = rng.gen_range(i..m);
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool
}

fn best_threshold_split(
    ctx: &TreeContext<'_>,
    samples: &[usize],
    feature: usize,
    total: &[u32],
) -> Option<Candidate> {
    let n = samples.len();
    let mut pairs: Vec<(f64, usize)> = samples
        .iter()
        .map(|&s| (ctx.train.instances[s].values[feature], ctx.train.labels[s]))
        .collect();
    pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

    let parent = gini(total, n);
    let mut left = vec![0u32; ctx.n_classes];
    let mut right = total.to_vec();
    let mut best: Option<Candidate> = None;
    for i in 1..n {
        let (prev_v, prev_y) = pairs[i - 1];
        left[prev_y] += 1;
        right[prev_y] -= 1;
        if pairs[i].0 <= prev_v {
            continue; // still inside a run of equal values
        }
        let (nl, nr) = (i, n - i);
        if nl < ctx.min_samples_leaf || nr < ctx.min_samples_leaf {
            continue;
        }
        let decrease = parent
            - (nl as f64 / n as f64) * gini(&left, nl)
            - (nr as f64 / n as f64) * gini(&right, nr);
        if best.as_ref().map_or(true, |b| decrease > b.decrease) {
            let threshold = prev_v + (pairs[i].0 - prev_v) / 2.0;
            best = Some(Candidate { feature, test: SplitTest::Threshold(threshold), decrease });
        }
    }
    best
}

fn best_categorical_split(
    ctx: &TreeContext<'_>,
    samples: &[usize],
    feature: usize,
    total: &[u32],
) -> Option<Candidate> {
    let n = samples.len();
    let n_cats = ctx.n_categories[feature];
    let mut per_cat = vec![vec![0u32; ctx.n_classes]; n_cats];
    for &s in samples {
        let cat = ctx.train.instances[s].values[feature] as usize;
        per_cat[cat][ctx.train.labels[s]] += 1;
    }
    let parent = gini(total, n);
    let mut best: Option<Candidate> = None;
    for (cat, left) in per_cat.iter().enumerate() {
        let nl = left.iter().sum::<u32>() as usize;
        if nl == 0 {
            continue;
        }
        let nr = n - nl;
        if nl < ctx.min_samples_leaf || nr < ctx.min_samples_leaf {
            continue;
        }
        let right: Vec<u32> = total.iter().zip(left).map(|(&t, &l)| t - l).collect();
        let decrease = parent
            - (nl as f64 / n as f64) * gini(left, nl)
            - (nr as f64 / n as f64) * gini(&right, nr);
        if best.as_ref().map_or(true, |b| decrease > b.decrease) {
            best = Some(Candidate {
                feature,
                test: SplitTest::Equal(cat as f64),
                decrease,
            });
        }
    }
    best
}
