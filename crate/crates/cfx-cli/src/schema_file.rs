//! The on-disk schema declaration.
//!
//! Schemas are TOML: top-level `target` and `class_labels`, then one
//! `[[feature]]` table per column in dataset order.
//!
//! ```toml
//! target = "income"
//! class_labels = ["<=50K", ">50K"]
//!
//! [[feature]]
//! name = "age"
//! kind = "continuous"
//! # min/max are optional; omitted bounds are fitted on the training split
//!
//! [[feature]]
//! name = "workclass"
//! kind = "categorical"
//! categories = ["private", "government"]
//! ```

use std::path::Path;

use cfx_core::schema::{Feature, FeatureKind, Schema};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SchemaFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse schema file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("feature '{0}': kind must be 'continuous' or 'categorical'")]
    BadKind(String),
    #[error("feature '{0}': categorical features need a categories list")]
    MissingCategories(String),
    #[error("feature '{0}': continuous bounds are incomplete (give both min and max or neither)")]
    HalfBounds(String),
}

/// A parsed schema declaration; continuous bounds may still be open.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemaSpec {
    pub target: String,
    pub class_labels: Vec<String>,
    #[serde(rename = "feature")]
    pub features: Vec<FeatureDecl>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureDecl {
    pub name: String,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub categories: Option<Vec<String>>,
}

impl FeatureDecl {
    pub fn continuous(name: &str) -> Self {
        FeatureDecl {
            name: name.into(),
            kind: "continuous".into(),
            min: None,
            max: None,
            categories: None,
        }
    }

    pub fn categorical(name: &str, categories: Vec<String>) -> Self {
        FeatureDecl {
            name: name.into(),
            kind: "categorical".into(),
            min: None,
            max: None,
            categories: Some(categories),
        }
    }
}

impl SchemaSpec {
    pub fn read(path: &Path) -> Result<Self, SchemaFileError> {
        let text = std::fs::read_to_string(path).map_err(|source| SchemaFileError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let spec: SchemaSpec = toml::from_str(&text)?;
        spec.check()?;
        Ok(spec)
    }

    pub fn write(&self, path: &Path) -> Result<(), SchemaFileError> {
        let text = toml::to_string_pretty(self).expect("schema spec serializes");
        std::fs::write(path, text).map_err(|source| SchemaFileError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    fn check(&self) -> Result<(), SchemaFileError> {
        for f in &self.features {
            match f.kind.as_str() {
                "continuous" => {
                    if f.min.is_some() != f.max.is_some() {
                        return Err(SchemaFileError::HalfBounds(f.name.clone()));
                    }
                }
                "categorical" => {
                    if f.categories.is_none() {
                        return Err(SchemaFileError::MissingCategories(f.name.clone()));
                    }
                }
                _ => return Err(SchemaFileError::BadKind(f.name.clone())),
            }
        }
        Ok(())
    }

    /// Declared bounds for a continuous feature, when present.
    pub fn declared_bounds(&self, index: usize) -> Option<(f64, f64)> {
        let f = &self.features[index];
        match (f.min, f.max) {
            (Some(lo), Some(hi)) => Some((lo, hi)),
            _ => None,
        }
    }

    /// A spec from a fully resolved schema, keeping its bounds.
    pub fn from_schema(schema: &Schema) -> Self {
        SchemaSpec {
            target: schema.target.clone(),
            class_labels: schema.class_labels.clone(),
            features: schema
                .features
                .iter()
                .map(|f| match &f.kind {
                    FeatureKind::Continuous { min, max } => FeatureDecl {
                        min: Some(*min),
                        max: Some(*max),
                        ..FeatureDecl::continuous(&f.name)
                    },
                    FeatureKind::Categorical { categories } => {
                        FeatureDecl::categorical(&f.name, categories.clone())
                    }
                })
                .collect(),
        }
    }

    /// A spec from an inferred schema with the observed continuous bounds
    /// dropped, so downstream preparation refits them on the training split.
    pub fn from_inferred(schema: &Schema) -> Self {
        let mut spec = SchemaSpec::from_schema(schema);
        for f in spec.features.iter_mut() {
            if f.kind == "continuous" {
                f.min = None;
                f.max = None;
            }
        }
        spec
    }

    /// Resolve into a core schema using `bounds` for features without
    /// declared ones. `bounds[i]` is ignored for categorical features and
    /// for continuous features that declare their own.
    pub fn resolve(&self, bounds: &[(f64, f64)]) -> Result<Schema, cfx_core::schema::SchemaError> {
        assert_eq!(bounds.len(), self.features.len());
        let features = self
            .features
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let kind = match f.kind.as_str() {
                    "continuous" => {
                        let (min, max) = self.declared_bounds(i).unwrap_or(bounds[i]);
                        FeatureKind::Continuous { min, max }
                    }
                    _ => FeatureKind::Categorical {
                        categories: f.categories.clone().unwrap_or_default(),
                    },
                };
                Feature { name: f.name.clone(), kind }
            })
            .collect();
        Schema::new(features, &self.target, self.class_labels.clone())
    }
}
