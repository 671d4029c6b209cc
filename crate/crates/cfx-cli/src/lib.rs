//! File formats, dataset preparation and the experiment runner behind the
//! `cfx` command-line tool. The algorithms live in `cfx-core`; this crate
//! adds everything that touches the filesystem or a subprocess.

pub mod adapter;
pub mod config;
pub mod csv_data;
pub mod model_file;
pub mod report;
pub mod runner;
pub mod schema_file;
pub mod synth;

/// Version string stamped into reports and model files.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
