//! Command-line driver for the xorlab experiments: argument parsing, CSV and
//! JSON artifacts, and SVG rendering.

pub mod commands;
pub mod error;
pub mod manifest;
pub mod plot;
pub mod records;

pub use commands::{execute, run, Cli};
pub use error::{CliError, CliResult};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "XORLAB_THREADS";

/// Sizes the global thread pool from `XORLAB_THREADS`, if set.
pub fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "{THREADS_ENV} must be a positive integer, got {raw:?}"
        ))
    })?;
    // A pool that already exists (tests, repeated calls) is left alone.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}
