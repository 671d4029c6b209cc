//! Case base container, tabular ingestion and seeded splitting.
//!
//! Parsing works on already-read string rows so the core stays free of IO;
//! the CLI crate layers file handling and CSV quoting on top.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_traits::Float;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::schema::{Feature, FeatureKind, Instance, Schema, SchemaError};
use crate::seed;

/// Errors raised while turning raw rows into a [`Dataset`] or inferring a
/// schema from them. Row numbers are 1-based data rows (the header is row 0).
#[derive(Debug, Clone, PartialEq)]
pub enum LoadError {
    EmptyTable,
    MissingColumn(String),
    TargetNotFound(String),
    UnparsableValue { row: usize, column: String },
    UnknownCategory { row: usize, column: String },
    Schema(SchemaError),
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::EmptyTable => write!(f, "table has no data rows"),
            LoadError::MissingColumn(c) => write!(f, "header is missing column '{c}'"),
            LoadError::TargetNotFound(c) => write!(f, "target column '{c}' not found"),
            LoadError::UnparsableValue { row, column } => {
                write!(f, "row {row}: cannot parse value in column '{column}'")
            }
            LoadError::UnknownCategory { row, column } => {
                write!(f, "row {row}: unknown category in column '{column}'")
            }
            LoadError::Schema(e) => write!(f, "schema error: {e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for LoadError {}

impl From<SchemaError> for LoadError {
    fn from(e: SchemaError) -> Self {
        LoadError::Schema(e)
    }
}

/// Errors from [`Dataset::split`].
#[derive(Debug, Clone, PartialEq)]
pub enum SplitError {
    EmptyDataset,
    BadFraction(f64),
    /// A class present in the data has fewer than two members, so a
    /// stratified split cannot place it on both sides.
    ClassTooSmall { class: usize, count: usize },
}

impl fmt::Display for SplitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SplitError::EmptyDataset => write!(f, "cannot split an empty dataset"),
            SplitError::BadFraction(v) => write!(f, "test fraction {v} not in (0, 1)"),
            SplitError::ClassTooSmall { class, count } => {
                write!(f, "class {class} has only {count} member(s); stratified split needs 2")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SplitError {}

/// Immutable labeled case base in normalized feature space.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Dataset {
    pub schema: Schema,
    pub instances: Vec<Instance>,
    pub labels: Vec<usize>,
}

impl Dataset {
    /// Bundle instances and labels under a schema, validating every row.
    pub fn new(
        schema: Schema,
        instances: Vec<Instance>,
        labels: Vec<usize>,
    ) -> Result<Self, SchemaError> {
        assert_eq!(instances.len(), labels.len(), "instances and labels must pair up");
        for inst in &instances {
            schema.validate_instance(inst)?;
        }
        for &l in &labels {
            assert!(l < schema.n_classes(), "label {l} out of range");
        }
        Ok(Dataset { schema, instances, labels })
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    /// Members per class, indexed by class.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = alloc::vec![0usize; self.schema.n_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Parse string rows (header + records) into a normalized dataset under
    /// `schema`. Row order is preserved. Continuous values are min/max
    /// normalized with the schema bounds and clamped into `[0, 1]`;
    /// categorical values map to their category index. Extra columns are
    /// ignored; blank or malformed cells abort the load with their location.
    pub fn from_table(
        header: &[String],
        rows: &[Vec<String>],
        schema: &Schema,
    ) -> Result<Self, LoadError> {
        if rows.is_empty() {
            return Err(LoadError::EmptyTable);
        }
        let mut col_of = Vec::with_capacity(schema.n_features());
        for feat in &schema.features {
            let col = header
                .iter()
                .position(|h| h.trim() == feat.name)
                .ok_or_else(|| LoadError::MissingColumn(feat.name.clone()))?;
            col_of.push(col);
        }
        let target_col = header
            .iter()
            .position(|h| h.trim() == schema.target)
            .ok_or_else(|| LoadError::MissingColumn(schema.target.clone()))?;

        let mut instances = Vec::with_capacity(rows.len());
        let mut labels = Vec::with_capacity(rows.len());
        for (r, row) in rows.iter().enumerate() {
            let row_no = r + 1;
            let mut values = Vec::with_capacity(schema.n_features());
            for (i, feat) in schema.features.iter().enumerate() {
                let cell = row.get(col_of[i]).map(|s| s.trim()).ok_or_else(|| {
                    LoadError::UnparsableValue { row: row_no, column: feat.name.clone() }
                })?;
                let v = match &feat.kind {
                    FeatureKind::Continuous { .. } => {
                        let raw: f64 = cell.parse().map_err(|_| LoadError::UnparsableValue {
                            row: row_no,
                            column: feat.name.clone(),
                        })?;
                        if !raw.is_finite() {
                            return Err(LoadError::UnparsableValue {
                                row: row_no,
                                column: feat.name.clone(),
                            });
                        }
                        schema.normalize_value(i, raw)
                    }
                    FeatureKind::Categorical { categories } => {
                        let idx = categories.iter().position(|c| c == cell).ok_or_else(|| {
                            LoadError::UnknownCategory { row: row_no, column: feat.name.clone() }
                        })?;
                        idx as f64
                    }
                };
                values.push(v);
            }
            let cell = row.get(target_col).map(|s| s.trim()).ok_or_else(|| {
                LoadError::UnparsableValue { row: row_no, column: schema.target.clone() }
            })?;
            let label = schema.class_index(cell).ok_or_else(|| LoadError::UnknownCategory {
                row: row_no,
                column: schema.target.clone(),
            })?;
            instances.push(Instance::new(values));
            labels.push(label);
        }
        Ok(Dataset { schema: schema.clone(), instances, labels })
    }

    /// Seeded train/test split; see [`split_indices`] for the partition
    /// rules. Instances keep their original relative order on both sides.
    pub fn split(
        &self,
        test_fraction: f64,
        seed: u64,
        stratified: bool,
    ) -> Result<(Dataset, Dataset), SplitError> {
        let (train_idx, test_idx) = split_indices(
            &self.labels,
            self.schema.n_classes(),
            test_fraction,
            seed,
            stratified,
        )?;
        Ok((self.subset(&train_idx), self.subset(&test_idx)))
    }

    fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            schema: self.schema.clone(),
            instances: idx.iter().map(|&i| self.instances[i].clone()).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

/// Round to nearest, then keep at least one row on each side.
fn test_count(n: usize, fraction: f64) -> usize {
    let k = Float::round(n as f64 * fraction) as usize;
    k.max(1).min(n - 1)
}

/// Disjoint (train, test) row indices, deterministic for a fixed seed.
///
/// Stratified mode shuffles each class separately (with a seed derived per
/// class) and moves `round(count * fraction)` members to the test side, so
/// per-class proportions survive within rounding. Every present class needs
/// at least two members so both sides stay populated.
pub fn split_indices(
    labels: &[usize],
    n_classes: usize,
    test_fraction: f64,
    seed: u64,
    stratified: bool,
) -> Result<(Vec<usize>, Vec<usize>), SplitError> {
    if labels.is_empty() {
        return Err(SplitError::EmptyDataset);
    }
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(SplitError::BadFraction(test_fraction));
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    if stratified {
        for class in 0..n_classes {
            let mut members: Vec<usize> =
                (0..labels.len()).filter(|&i| labels[i] == class).collect();
            if members.is_empty() {
                continue;
            }
            if members.len() < 2 {
                return Err(SplitError::ClassTooSmall { class, count: members.len() });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed::derive_index(seed, class as u64));
            members.shuffle(&mut rng);
            let k = test_count(members.len(), test_fraction);
            test.extend_from_slice(&members[..k]);
            train.extend_from_slice(&members[k..]);
        }
    } else {
        let mut all: Vec<usize> = (0..labels.len()).collect();
        if all.len() < 2 {
            return Err(SplitError::ClassTooSmall { class: labels[0], count: 1 });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        all.shuffle(&mut rng);
        let k = test_count(all.len(), test_fraction);
        test.extend_from_slice(&all[..k]);
        train.extend_from_slice(&all[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Infer a schema from string rows: a column becomes categorical when any
/// value fails to parse as a finite number or when it has at most
/// `categorical_threshold` distinct values; otherwise it is continuous with
/// the observed min/max. Categories and class labels keep first-appearance
/// order, which makes the result deterministic for a given table.
pub fn infer_schema(
    header: &[String],
    rows: &[Vec<String>],
    target: &str,
    categorical_threshold: usize,
) -> Result<Schema, LoadError> {
    if header.is_empty() || rows.is_empty() {
        return Err(LoadError::EmptyTable);
    }
    let target_col = header
        .iter()
        .position(|h| h.trim() == target)
        .ok_or_else(|| LoadError::TargetNotFound(target.to_string()))?;

    let mut features = Vec::new();
    for (col, name) in header.iter().enumerate() {
        let name = name.trim();
        if col == target_col {
            continue;
        }
        let mut distinct: Vec<String> = Vec::new();
        let mut numeric = true;
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for (r, row) in rows.iter().enumerate() {
            let cell = row
                .get(col)
                .map(|s| s.trim())
                .ok_or_else(|| LoadError::UnparsableValue { row: r + 1, column: name.into() })?;
            if !distinct.iter().any(|d| d == cell) {
                distinct.push(cell.to_string());
            }
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => {
                    min = min.min(v);
                    max = max.max(v);
                }
                _ => numeric = false,
            }
        }
        let kind = if !numeric || distinct.len() <= categorical_threshold {
            FeatureKind::Categorical { categories: distinct }
        } else {
            FeatureKind::Continuous { min, max }
        };
        features.push(Feature { name: name.into(), kind });
    }

    let mut class_labels: Vec<String> = Vec::new();
    for (r, row) in rows.iter().enumerate() {
        let cell = row
            .get(target_col)
            .map(|s| s.trim())
            .ok_or_else(|| LoadError::UnparsableValue { row: r + 1, column: target.into() })?;
        if !class_labels.iter().any(|l| l == cell) {
            class_labels.push(cell.to_string());
        }
    }
    Ok(Schema::new(features, target, class_labels)?)
}
