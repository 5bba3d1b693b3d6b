//! Binary snapshots and JSON run configurations.

pub mod config;
pub mod json;
pub mod snapshot;

pub use config::{parse_config, GridSpec, InitialCondition, OutputSpec, ParamsSpec, RunConfig};
pub use snapshot::{load_header, load_snapshot, read_snapshot, save_snapshot, write_snapshot, SnapshotHeader};
