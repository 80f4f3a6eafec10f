//! Batch construction, verification and sweeps of eigenvalue-free rank-one
//! perturbations.

pub mod artifacts;
pub mod commands;
pub mod config;
pub mod grid;

use std::fmt;

/// Process exit code attached to a failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Config = 2,
    Construction = 3,
    Verification = 4,
    Artifact = 5,
}

#[derive(Debug)]
pub struct Failure {
    pub kind: ExitKind,
    pub source: anyhow::Error,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.source)
    }
}

impl std::error::Error for Failure {}

pub trait Classify<T> {
    fn kind(self, kind: ExitKind) -> anyhow::Result<T>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn kind(self, kind: ExitKind) -> anyhow::Result<T> {
        self.map_err(|e| {
            let source = e.into();
            // keep the innermost classification
            if source.downcast_ref::<Failure>().is_some() {
                return source;
            }
            anyhow::Error::new(Failure { kind, source })
        })
    }
}

/// Exit code for an error from any command.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    if let Some(f) = err.downcast_ref::<Failure>() {
        return f.kind as i32;
    }
    if err.downcast_ref::<artifacts::SchemaMismatch>().is_some() {
        return ExitKind::Artifact as i32;
    }
    1
}
