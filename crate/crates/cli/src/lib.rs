//! Benchmark runner: FMC against random and vanilla Monte Carlo baselines,
//! plus swarm-wave dataset generation and oracle slice dumps.

pub mod bench;
pub mod config;
pub mod report;
pub mod slices;
pub mod wave;

use fmc_core::FmcError;

pub use bench::{benchmark, run_benchmark};
pub use config::{EnvId, Policy, RunConfig};
pub use report::{Report, ReportRow};
pub use wave::{run_wave, WaveConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("bad config: {0}")]
    Config(String),
    #[error("environment failure: {0}")]
    Env(#[from] FmcError),
    #[error("io: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Env(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

/// Caps the rayon pool at `FMC_THREADS` when set.
pub fn init_thread_pool() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("FMC_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("FMC_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}
