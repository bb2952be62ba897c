//! Experiment runner: flat configs in, CSV data and a JSON manifest out.

pub mod checks;
pub mod config;
pub mod error;
pub mod presets;
pub mod run;

pub use config::{ExperimentConfig, Kind};
pub use error::{CliError, Result};
pub use run::{run_experiment, Manifest};

/// Caps the global thread pool at `QRF_THREADS` when set.
pub fn init_threads() -> Result<()> {
    let Ok(value) = std::env::var("QRF_THREADS") else {
        return Ok(());
    };
    let n: usize = value.parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        CliError::Config(format!(
            "QRF_THREADS must be a positive integer, got {value:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}
