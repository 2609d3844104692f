//! Command implementations behind the `alif-spectra` binary: batch
//! decomposition, symbol and spectrum dumps, size sweeps, the truncation
//! table, and the divergence-fixture verification. Everything lands on disk
//! as CSV (plot-ready, 17-significant-digit decimals) or JSON (reports with
//! the resolved configuration embedded); outputs are byte-deterministic for
//! a given configuration and seed, modulo the `generated_unix_ms` field.

use std::fmt;

pub mod commands;
pub mod io;
pub mod spec;

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or missing input (exit code 2).
    Config(String),
    /// Filesystem trouble while writing artifacts (exit code 2).
    Io(String),
    /// The fixture verification found a failing assertion (exit code 1).
    VerificationFailed(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> CliError {
        CliError::Config(msg.into())
    }

    pub fn io(msg: impl Into<String>) -> CliError {
        CliError::Io(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::VerificationFailed(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
            CliError::VerificationFailed(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Worker cap for sweeps: `ALIF_SPECTRA_THREADS`, else the machine's
/// available parallelism.
pub fn thread_cap() -> usize {
    if let Ok(v) = std::env::var("ALIF_SPECTRA_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            return n.max(1);
        }
    }
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// Millisecond timestamp for report provenance; the one field excluded from
/// determinism comparisons.
pub fn unix_ms() -> u128 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}
