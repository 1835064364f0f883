//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("{op} requires p = {required}, got {got}")]
    UnsupportedP { op: &'static str, required: f64, got: f64 },
    #[error("p = 0 admits no departures")]
    NoDepartures,
    #[error("field modulus {0} is not supported; the kernel is fixed to 2^31 - 1")]
    UnsupportedModulus(u64),
    #[error("trials must be at least 1")]
    ZeroTrials,
    #[error("workers must be at least 1")]
    ZeroWorkers,
    #[error("scheme {scheme} only runs at p = 0.5 (got p = {got})")]
    SchemeNeedsSymmetricP { scheme: &'static str, got: f64 },
    #[error("invalid config line {line}: {reason}")]
    BadConfigLine { line: usize, reason: String },
    #[error("unknown {what}: {value}")]
    UnknownValue { what: &'static str, value: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("trace schema error: {0}")]
    Schema(String),
    #[error("trace checksum mismatch: stored {stored}, computed {computed}")]
    Checksum { stored: String, computed: String },
    #[error("replayed trial does not match trace: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("precoder trace {index} is non-causal: rows depend on same-slot state")]
    NonCausalTrace { index: usize },
    #[error("no traces supplied")]
    Empty,
}
