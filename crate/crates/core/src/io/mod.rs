//! Configuration files, run records and binary state files.

pub mod config;
pub mod report;
pub mod state_file;

pub use config::{load_config, parse_config, RunConfig, TargetConfig};
pub use report::{execute, read_records, write_records, Outcome, RunRecord};
pub use state_file::{decode_state, encode_state, load_state, save_state};
