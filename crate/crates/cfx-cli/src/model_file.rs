//! Versioned model persistence.
//!
//! A model file is one JSON document holding the format version, the
//! resolved schema (with its final normalization bounds) and the trained
//! forest. JSON floats round-trip exactly, so saving and loading reproduces
//! predictions bit for bit.

use std::path::Path;

use cfx_core::forest::RandomForest;
use cfx_core::schema::Schema;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse model file {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("model format version {found} is not supported (expected {MODEL_FORMAT_VERSION})")]
    Version { found: u32 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub engine_version: String,
    pub schema: Schema,
    pub forest: RandomForest,
}

impl ModelFile {
    pub fn new(schema: Schema, forest: RandomForest) -> Self {
        ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            engine_version: crate::ENGINE_VERSION.to_string(),
            schema,
            forest,
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), ModelFileError> {
        let json = serde_json::to_string(self).expect("model serializes");
        std::fs::write(path, json).map_err(|source| ModelFileError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self, ModelFileError> {
        let text = std::fs::read_to_string(path).map_err(|source| ModelFileError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let file: ModelFile = serde_json::from_str(&text).map_err(|source| {
            ModelFileError::Parse { path: path.display().to_string(), source }
        })?;
        if file.format_version != MODEL_FORMAT_VERSION {
            return Err(ModelFileError::Version { found: file.format_version });
        }
        Ok(file)
    }
}
