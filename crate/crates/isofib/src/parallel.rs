//! Worker-count control for the parallel searches.

use crate::error::{Error, Result};

/// Environment variable read by the command-line tool to cap worker threads.
pub const WORKERS_ENV: &str = "ISOFIB_WORKERS";

/// Worker count requested through [`WORKERS_ENV`], if any.
pub fn workers_from_env() -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Error::InvalidInput(format!(
                "{WORKERS_ENV} must be a positive integer, got {s:?}"
            ))),
        },
        Err(_) => Ok(None),
    }
}

/// Run `f` on a dedicated pool of `workers` threads, or on the global pool.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Capability(format!("cannot start {n} workers: {e}")))?;
            Ok(pool.install(f))
        }
    }
}
