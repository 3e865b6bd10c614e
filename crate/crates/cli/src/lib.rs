//! Experiment orchestration around `aircomp-core`: the TOML configuration
//! schema, the IDX dataset loader, text output formats, a thread-pool
//! executor, and the four CLI commands (`simulate`, `analyze`, `mc`,
//! `topology`).

pub mod commands;
pub mod config;
pub mod formats;
pub mod idx;
pub mod pool;

/// Linear noise variance from an SNR in decibels (`SNR = 1 / sigma^2` at
/// the path-loss reference distance).
pub fn snr_to_variance(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}
