//! External prediction sources behind the classifier contract.
//!
//! Two kinds, declared in one JSON file:
//!
//! ```json
//! {"kind": "table", "n_classes": 2,
//!  "entries": [{"instance": [0.5, 1.0], "proba": [0.3, 0.7]}]}
//! ```
//!
//! ```json
//! {"kind": "subprocess", "n_classes": 2, "command": ["python3", "model.py"]}
//! ```
//!
//! A table maps exact instances (bit-equal feature vectors) to probability
//! vectors and must cover every instance the run will probe. A subprocess
//! speaks a line protocol: one JSON array of feature values per request on
//! stdin, one JSON array of class probabilities per response on stdout.
//!
//! The classifier trait has no error channel, so probing an uncovered
//! instance or a protocol breach panics with the underlying error; the
//! experiment runner catches that per query and records the failure.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::Mutex;

use cfx_core::classifier::Classifier;
use cfx_core::schema::Instance;
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AdapterError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse adapter file {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("no prediction stored for instance {0}")]
    LookupMiss(String),
    #[error("subprocess protocol violation: {0}")]
    ProtocolViolation(String),
    #[error("cannot spawn '{command}': {source}")]
    Spawn {
        command: String,
        #[source]
        source: std::io::Error,
    },
    #[error("adapter file must declare n_classes >= 2 and a non-empty command/entry list")]
    BadDeclaration,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum AdapterFile {
    Table { n_classes: usize, entries: Vec<TableEntry> },
    Subprocess { n_classes: usize, command: Vec<String> },
}

#[derive(Debug, Deserialize)]
struct TableEntry {
    instance: Vec<f64>,
    proba: Vec<f64>,
}

/// A classifier backed by a prediction table or a line-protocol subprocess.
pub enum ExternalModel {
    Table { n_classes: usize, entries: HashMap<Vec<u64>, Vec<f64>> },
    Subprocess { n_classes: usize, io: Mutex<SubprocessIo> },
}

pub struct SubprocessIo {
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
}

impl Drop for SubprocessIo {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

fn key(values: &[f64]) -> Vec<u64> {
    values.iter().map(|v| v.to_bits()).collect()
}

impl ExternalModel {
    pub fn load(path: &Path) -> Result<Self, AdapterError> {
        let text = std::fs::read_to_string(path).map_err(|source| AdapterError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let file: AdapterFile = serde_json::from_str(&text).map_err(|source| {
            AdapterError::Parse { path: path.display().to_string(), source }
        })?;
        match file {
            AdapterFile::Table { n_classes, entries } => {
                if n_classes < 2 || entries.is_empty() {
                    return Err(AdapterError::BadDeclaration);
                }
                let mut map = HashMap::with_capacity(entries.len());
                for e in entries {
                    validate_proba(&e.proba, n_classes)
                        .map_err(AdapterError::ProtocolViolation)?;
                    map.insert(key(&e.instance), e.proba);
                }
                Ok(ExternalModel::Table { n_classes, entries: map })
            }
            AdapterFile::Subprocess { n_classes, command } => {
                if n_classes < 2 || command.is_empty() {
                    return Err(AdapterError::BadDeclaration);
                }
                let mut child = Command::new(&command[0])
                    .args(&command[1..])
                    .stdin(Stdio::piped())
                    .stdout(Stdio::piped())
                    .spawn()
                    .map_err(|source| AdapterError::Spawn {
                        command: command.join(" "),
                        source,
                    })?;
                let stdin = child.stdin.take().expect("piped stdin");
                let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
                Ok(ExternalModel::Subprocess {
                    n_classes,
                    io: Mutex::new(SubprocessIo { child, stdin, stdout }),
                })
            }
        }
    }

    /// Fallible prediction; the trait impl panics on these errors instead.
    pub fn try_predict_proba(&self, instance: &Instance) -> Result<Vec<f64>, AdapterError> {
        match self {
            ExternalModel::Table { entries, .. } => entries
                .get(&key(&instance.values))
                .cloned()
                .ok_or_else(|| AdapterError::LookupMiss(format!("{:?}", instance.values))),
            ExternalModel::Subprocess { n_classes, io } => {
                let mut io = io.lock().expect("subprocess lock");
                let request =
                    serde_json::to_string(&instance.values).expect("values serialize");
                io.stdin
                    .write_all(request.as_bytes())
                    .and_then(|_| io.stdin.write_all(b"\n"))
                    .and_then(|_| io.stdin.flush())
                    .map_err(|e| AdapterError::ProtocolViolation(format!("write failed: {e}")))?;
                let mut line = String::new();
                let n = io
                    .stdout
                    .read_line(&mut line)
                    .map_err(|e| AdapterError::ProtocolViolation(format!("read failed: {e}")))?;
                if n == 0 {
                    return Err(AdapterError::ProtocolViolation("unexpected EOF".into()));
                }
                let proba: Vec<f64> = serde_json::from_str(line.trim()).map_err(|e| {
                    AdapterError::ProtocolViolation(format!("bad response '{}': {e}", line.trim()))
                })?;
                validate_proba(&proba, *n_classes).map_err(AdapterError::ProtocolViolation)?;
                Ok(proba)
            }
        }
    }
}

fn validate_proba(proba: &[f64], n_classes: usize) -> Result<(), String> {
    if proba.len() != n_classes {
        return Err(format!("expected {n_classes} probabilities, got {}", proba.len()));
    }
    if proba.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(format!("probabilities outside [0,1]: {proba:?}"));
    }
    let sum: f64 = proba.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(format!("probabilities sum to {sum}, not 1"));
    }
    Ok(())
}

impl Classifier for ExternalModel {
    fn n_classes(&self) -> usize {
        match self {
            ExternalModel::Table { n_classes, .. } => *n_classes,
            ExternalModel::Subprocess { n_classes, .. } => *n_classes,
        }
    }

    fn predict_proba(&self, instance: &Instance) -> Vec<f64> {
        match self.try_predict_proba(instance) {
            Ok(p) => p,
            Err(e) => panic!("external model failure: {e}"),
        }
    }
}
