//! Simulation harness for permutation modulation codes.
//!
//! Builds (or loads) a codebook, runs seeded Monte-Carlo sweeps over an
//! SNR range comparing candidate-list decoding with exact maximum
//! likelihood on the same noise realizations, and reports one CSV row
//! per SNR point. Results are bit-reproducible for a fixed seed and
//! configuration, independent of the worker count.

pub mod config;
pub mod report;
pub mod sweep;

pub use config::{load_or_build, CodeSpec, DecoderMode, SimConfig};
pub use report::{describe_code, emit_csv, emit_csv_string, CSV_HEADER};
pub use sweep::{run_sweep, run_sweep_on, wilson_interval, SweepRow};
