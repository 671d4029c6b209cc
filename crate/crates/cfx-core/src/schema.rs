//! Typed tabular schema, normalized instances and the mixed distance.
//!
//! Continuous features are min/max normalized into `[0, 1]`; categorical
//! features are stored as category indices and compared with the overlap
//! distance (0 on equality, 1 otherwise). All downstream distance
//! computations — neighbour retrieval, surrogate sample weighting, the
//! amount-of-change metric — run in this normalized space.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Float;

/// How one column is typed and normalized.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum FeatureKind {
    /// Numeric column, min/max normalized with the given raw bounds.
    /// `min == max` marks a constant feature; it normalizes to 0.
    Continuous { min: f64, max: f64 },
    /// Nominal column; values are indices into `categories`.
    Categorical { categories: Vec<String> },
}

impl FeatureKind {
    pub fn is_categorical(&self) -> bool {
        matches!(self, FeatureKind::Categorical { .. })
    }
}

/// A named, typed column.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Feature {
    pub name: String,
    pub kind: FeatureKind,
}

impl Feature {
    pub fn continuous(name: &str, min: f64, max: f64) -> Self {
        Feature { name: name.into(), kind: FeatureKind::Continuous { min, max } }
    }

    pub fn categorical(name: &str, categories: &[&str]) -> Self {
        Feature {
            name: name.into(),
            kind: FeatureKind::Categorical {
                categories: categories.iter().map(|c| String::from(*c)).collect(),
            },
        }
    }
}

/// Schema violations detected at construction or validation time.
#[derive(Debug, Clone, PartialEq)]
pub enum SchemaError {
    NoFeatures,
    DuplicateFeature(String),
    TargetIsFeature(String),
    TooFewClasses,
    DuplicateClassLabel(String),
    BadBounds { feature: String },
    EmptyCategories { feature: String },
    DuplicateCategory { feature: String, category: String },
    WrongArity { expected: usize, got: usize },
    ValueOutOfRange { feature: usize },
    BadCategoryIndex { feature: usize },
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemaError::NoFeatures => write!(f, "schema declares no features"),
            SchemaError::DuplicateFeature(n) => write!(f, "duplicate feature name '{n}'"),
            SchemaError::TargetIsFeature(n) => {
                write!(f, "target column '{n}' also declared as a feature")
            }
            SchemaError::TooFewClasses => write!(f, "need at least two class labels"),
            SchemaError::DuplicateClassLabel(n) => write!(f, "duplicate class label '{n}'"),
            SchemaError::BadBounds { feature } => {
                write!(f, "feature '{feature}' has min > max")
            }
            SchemaError::EmptyCategories { feature } => {
                write!(f, "categorical feature '{feature}' has no categories")
            }
            SchemaError::DuplicateCategory { feature, category } => {
                write!(f, "feature '{feature}' repeats category '{category}'")
            }
            SchemaError::WrongArity { expected, got } => {
                write!(f, "instance has {got} values, schema expects {expected}")
            }
            SchemaError::ValueOutOfRange { feature } => {
                write!(f, "continuous value outside [0,1] at feature {feature}")
            }
            SchemaError::BadCategoryIndex { feature } => {
                write!(f, "invalid category index at feature {feature}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SchemaError {}

/// Ordered feature declarations plus the class column.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Schema {
    pub features: Vec<Feature>,
    pub target: String,
    pub class_labels: Vec<String>,
}

impl Schema {
    /// Build a schema, checking name uniqueness, class count and per-feature
    /// invariants.
    pub fn new(
        features: Vec<Feature>,
        target: &str,
        class_labels: Vec<String>,
    ) -> Result<Self, SchemaError> {
        if features.is_empty() {
            return Err(SchemaError::NoFeatures);
        }
        if class_labels.len() < 2 {
            return Err(SchemaError::TooFewClasses);
        }
        for (i, feat) in features.iter().enumerate() {
            if features[..i].iter().any(|f| f.name == feat.name) {
                return Err(SchemaError::DuplicateFeature(feat.name.clone()));
            }
            if feat.name == target {
                return Err(SchemaError::TargetIsFeature(feat.name.clone()));
            }
            match &feat.kind {
                FeatureKind::Continuous { min, max } => {
                    if !(min <= max) {
                        return Err(SchemaError::BadBounds { feature: feat.name.clone() });
                    }
                }
                FeatureKind::Categorical { categories } => {
                    if categories.is_empty() {
                        return Err(SchemaError::EmptyCategories { feature: feat.name.clone() });
                    }
                    for (j, c) in categories.iter().enumerate() {
                        if categories[..j].contains(c) {
                            return Err(SchemaError::DuplicateCategory {
                                feature: feat.name.clone(),
                                category: c.clone(),
                            });
                        }
                    }
                }
            }
        }
        for (i, label) in class_labels.iter().enumerate() {
            if class_labels[..i].contains(label) {
                return Err(SchemaError::DuplicateClassLabel(label.clone()));
            }
        }
        Ok(Schema { features, target: target.into(), class_labels })
    }

    /// Number of features, `m`.
    pub fn n_features(&self) -> usize {
        self.features.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_labels.len()
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    pub fn class_index(&self, label: &str) -> Option<usize> {
        self.class_labels.iter().position(|l| l == label)
    }

    /// Map a raw continuous value into `[0, 1]` under the feature's bounds,
    /// clamping values outside them. Constant features map to 0.
    /// Categorical features pass the index through unchanged.
    pub fn normalize_value(&self, feature: usize, raw: f64) -> f64 {
        match &self.features[feature].kind {
            FeatureKind::Continuous { min, max } => {
                if max > min {
                    ((raw - min) / (max - min)).max(0.0).min(1.0)
                } else {
                    0.0
                }
            }
            FeatureKind::Categorical { .. } => raw,
        }
    }

    /// Inverse of [`Schema::normalize_value`] for in-range values.
    pub fn denormalize_value(&self, feature: usize, value: f64) -> f64 {
        match &self.features[feature].kind {
            FeatureKind::Continuous { min, max } => min + value * (max - min),
            FeatureKind::Categorical { .. } => value,
        }
    }

    /// Check instance arity, continuous range and category indices.
    pub fn validate_instance(&self, instance: &Instance) -> Result<(), SchemaError> {
        if instance.values.len() != self.n_features() {
            return Err(SchemaError::WrongArity {
                expected: self.n_features(),
                got: instance.values.len(),
            });
        }
        for (i, feat) in self.features.iter().enumerate() {
            let v = instance.values[i];
            match &feat.kind {
                FeatureKind::Continuous { .. } => {
                    if !(0.0..=1.0).contains(&v) {
                        return Err(SchemaError::ValueOutOfRange { feature: i });
                    }
                }
                FeatureKind::Categorical { categories } => {
                    let idx = v as usize;
                    if Float::fract(v) != 0.0 || v < 0.0 || idx >= categories.len() {
                        return Err(SchemaError::BadCategoryIndex { feature: i });
                    }
                }
            }
        }
        Ok(())
    }
}

/// One feature vector in normalized space. Continuous entries live in
/// `[0, 1]`; categorical entries hold the category index.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Instance {
    pub values: Vec<f64>,
}

impl Instance {
    pub fn new(values: Vec<f64>) -> Self {
        Instance { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Euclidean distance over normalized features, with the overlap distance
/// (0 if equal, otherwise 1) on categorical entries. Bounded by `sqrt(m)`.
pub fn distance(a: &Instance, b: &Instance, schema: &Schema) -> f64 {
    debug_assert_eq!(a.len(), schema.n_features());
    debug_assert_eq!(b.len(), schema.n_features());
    let mut acc = 0.0;
    for (i, feat) in schema.features.iter().enumerate() {
        match feat.kind {
            FeatureKind::Continuous { .. } => {
                let d = a.values[i] - b.values[i];
                acc += d * d;
            }
            FeatureKind::Categorical { .. } => {
                if a.values[i] != b.values[i] {
                    acc += 1.0;
                }
            }
        }
    }
    Float::sqrt(acc)
}

/// Per-feature contribution to the amount-of-change measure: absolute
/// normalized difference for continuous features, overlap distance for
/// categorical ones.
pub fn feature_delta(a: &Instance, b: &Instance, schema: &Schema, feature: usize) -> f64 {
    match schema.features[feature].kind {
        FeatureKind::Continuous { .. } => Float::abs(a.values[feature] - b.values[feature]),
        FeatureKind::Categorical { .. } => {
            if a.values[feature] != b.values[feature] {
                1.0
            } else {
                0.0
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn mixed_schema() -> Schema {
        Schema::new(
            vec![
                Feature::continuous("age", 0.0, 100.0),
                Feature::categorical("color", &["red", "blue"]),
            ],
            "label",
            vec!["no".into(), "yes".into()],
        )
        .unwrap()
    }

    #[test]
    fn rejects_duplicate_feature_names() {
        let err = Schema::new(
            vec![Feature::continuous("a", 0.0, 1.0), Feature::continuous("a", 0.0, 1.0)],
            "y",
            vec!["n".into(), "p".into()],
        )
        .unwrap_err();
        assert_eq!(err, SchemaError::DuplicateFeature("a".into()));
    }

    #[test]
    fn rejects_target_among_features() {
        let err = Schema::new(
            vec![Feature::continuous("y", 0.0, 1.0)],
            "y",
            vec!["n".into(), "p".into()],
        )
        .unwrap_err();
        assert_eq!(err, SchemaError::TargetIsFeature("y".into()));
    }

    #[test]
    fn normalizes_and_denormalizes() {
        let s = mixed_schema();
        assert_eq!(s.normalize_value(0, 50.0), 0.5);
        assert_eq!(s.normalize_value(0, 100.0), 1.0);
        assert_eq!(s.normalize_value(0, 250.0), 1.0); // clamped
        assert_eq!(s.denormalize_value(0, 0.5), 50.0);
        // categorical passthrough
        assert_eq!(s.normalize_value(1, 1.0), 1.0);
    }

    #[test]
    fn constant_feature_normalizes_to_zero() {
        let s = Schema::new(
            vec![Feature::continuous("c", 3.0, 3.0)],
            "y",
            vec!["n".into(), "p".into()],
        )
        .unwrap();
        assert_eq!(s.normalize_value(0, 3.0), 0.0);
        assert_eq!(s.normalize_value(0, 7.0), 0.0);
    }

    #[test]
    fn distance_matches_hand_computed_cases() {
        let s = Schema::new(
            vec![Feature::continuous("a", 0.0, 1.0), Feature::continuous("b", 0.0, 1.0)],
            "y",
            vec!["n".into(), "p".into()],
        )
        .unwrap();
        let a = Instance::new(vec![0.0, 0.0]);
        let b = Instance::new(vec![0.3, 0.4]);
        assert!((distance(&a, &b, &s) - 0.5).abs() < 1e-15);
        assert_eq!(distance(&a, &a, &s), 0.0);
    }

    #[test]
    fn categorical_difference_counts_one() {
        let s = mixed_schema();
        let a = Instance::new(vec![0.5, 0.0]);
        let b = Instance::new(vec![0.5, 1.0]);
        assert_eq!(distance(&a, &b, &s), 1.0);
        assert_eq!(feature_delta(&a, &b, &s, 1), 1.0);
        assert_eq!(feature_delta(&a, &b, &s, 0), 0.0);
    }

    #[test]
    fn validates_instances() {
        let s = mixed_schema();
        assert!(s.validate_instance(&Instance::new(vec![0.5, 1.0])).is_ok());
        assert!(matches!(
            s.validate_instance(&Instance::new(vec![0.5])),
            Err(SchemaError::WrongArity { .. })
        ));
        assert!(matches!(
            s.validate_instance(&Instance::new(vec![1.5, 0.0])),
            Err(SchemaError::ValueOutOfRange { feature: 0 })
        ));
        assert!(matches!(
            s.validate_instance(&Instance::new(vec![0.5, 2.0])),
            Err(SchemaError::BadCategoryIndex { feature: 1 })
        ));
    }
}
