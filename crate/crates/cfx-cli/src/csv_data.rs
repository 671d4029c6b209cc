//! CSV ingestion and leak-free dataset preparation.
//!
//! Files are comma-separated UTF-8 with a header row. Parsing and
//! normalization live in the core crate; this module reads files, wires the
//! split, and fits any undeclared continuous bounds on the training rows
//! only (test values outside them are clamped during normalization).

use std::path::Path;

use cfx_core::dataset::{split_indices, Dataset, LoadError, SplitError};
use cfx_core::schema::Schema;
use cfx_core::seed;
use thiserror::Error;

use crate::schema_file::SchemaSpec;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("csv error in {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error(transparent)]
    Schema(#[from] cfx_core::schema::SchemaError),
    #[error("column '{column}' has no parseable values in the training split")]
    NoTrainValues { column: String },
}

/// A CSV file pulled into memory as strings.
#[derive(Debug, Clone)]
pub struct TableData {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl TableData {
    pub fn read(path: &Path) -> Result<Self, DataError> {
        let wrap =
            |source: csv::Error| DataError::Csv { path: path.display().to_string(), source };
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(wrap)?;
        let header = reader.headers().map_err(wrap)?.iter().map(|s| s.to_string()).collect();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(wrap)?;
            rows.push(record.iter().map(|s| s.to_string()).collect());
        }
        Ok(TableData { header, rows })
    }

    pub fn write(&self, path: &Path) -> Result<(), DataError> {
        let mut writer = csv::Writer::from_path(path)
            .map_err(|e| DataError::Csv { path: path.display().to_string(), source: e })?;
        writer
            .write_record(&self.header)
            .and_then(|_| self.rows.iter().try_for_each(|r| writer.write_record(r)))
            .and_then(|_| writer.flush().map_err(csv::Error::from))
            .map_err(|e| DataError::Csv { path: path.display().to_string(), source: e })?;
        Ok(())
    }
}

/// Load a whole CSV under an already-resolved schema.
pub fn load_csv(path: &Path, schema: &Schema) -> Result<Dataset, DataError> {
    let table = TableData::read(path)?;
    Ok(Dataset::from_table(&table.header, &table.rows, schema)?)
}

/// Infer a schema straight from a CSV file. Columns become categorical when
/// any value is non-numeric or when they have at most `categorical_threshold`
/// distinct values.
pub fn infer_schema(
    path: &Path,
    target: &str,
    categorical_threshold: usize,
) -> Result<Schema, DataError> {
    let table = TableData::read(path)?;
    Ok(cfx_core::dataset::infer_schema(
        &table.header,
        &table.rows,
        target,
        categorical_threshold,
    )?)
}

/// The split, normalized view of one table.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub schema: Schema,
    pub train: Dataset,
    pub test: Dataset,
    /// Original row index (0-based data row) of each train/test instance.
    pub train_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
}

/// Split the raw rows, fit undeclared continuous bounds on the training
/// side, then normalize both sides under the finished schema.
pub fn prepare(
    table: &TableData,
    spec: &SchemaSpec,
    test_fraction: f64,
    seed_value: u64,
) -> Result<Prepared, DataError> {
    let target_col = table
        .header
        .iter()
        .position(|h| *h == spec.target)
        .ok_or_else(|| LoadError::TargetNotFound(spec.target.clone()))?;
    let mut labels = Vec::with_capacity(table.rows.len());
    for (r, row) in table.rows.iter().enumerate() {
        let cell = row.get(target_col).map(String::as_str).unwrap_or("");
        let idx = spec
            .class_labels
            .iter()
            .position(|l| l == cell)
            .ok_or_else(|| LoadError::UnknownCategory {
                row: r + 1,
                column: spec.target.clone(),
            })?;
        labels.push(idx);
    }
    let (train_rows, test_rows) = split_indices(
        &labels,
        spec.class_labels.len(),
        test_fraction,
        seed::derive(seed_value, "split"),
        true,
    )?;

    // Training-split bounds for any feature that does not declare its own.
    let mut bounds = Vec::with_capacity(spec.features.len());
    for (i, decl) in spec.features.iter().enumerate() {
        if decl.kind != "continuous" || spec.declared_bounds(i).is_some() {
            bounds.push((0.0, 1.0)); // unused
            continue;
        }
        let col = table
            .header
            .iter()
            .position(|h| *h == decl.name)
            .ok_or_else(|| LoadError::MissingColumn(decl.name.clone()))?;
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for &r in &train_rows {
            if let Some(v) = table.rows[r].get(col).and_then(|c| c.parse::<f64>().ok()) {
                if v.is_finite() {
                    min = min.min(v);
                    max = max.max(v);
                }
            }
        }
        if min > max {
            return Err(DataError::NoTrainValues { column: decl.name.clone() });
        }
        bounds.push((min, max));
    }
    let schema = spec.resolve(&bounds)?;

    let pick = |idx: &[usize]| -> Vec<Vec<String>> {
        idx.iter().map(|&r| table.rows[r].clone()).collect()
    };
    let train = Dataset::from_table(&table.header, &pick(&train_rows), &schema)?;
    let test = Dataset::from_table(&table.header, &pick(&test_rows), &schema)?;
    Ok(Prepared { schema, train, test, train_rows, test_rows })
}
