//! Configuration parsing and experiment orchestration for the `riscorr` tool.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

pub use config::{parse_config, parse_config_str, ConfigIssue, RateSettings, RunConfig};
pub use error::CliError;
pub use experiments::{run_experiment, Design, Experiment, Mode, RunOptions};
pub use output::{config_hash, Header, VERSION};

/// Environment variable capping the worker-thread count.
pub const THREADS_ENV: &str = "RISCORR_THREADS";

/// Sizes the global thread pool from [`THREADS_ENV`], if set.
pub fn init_thread_pool() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = match raw.trim().parse() {
        Ok(n) if n > 0 => n,
        _ => {
            return Err(CliError::Config(vec![ConfigIssue {
                line: None,
                message: format!(
                    "range violation: {THREADS_ENV} must be a positive integer, got `{raw}`"
                ),
            }]))
        }
    };
    // A pool that is already built (e.g. by a test harness) is left alone.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}
