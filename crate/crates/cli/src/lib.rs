//! Scenario ingestion, pipelines and file emission behind the `sle0` binary.

use std::fmt;

pub mod commands;
pub mod presets;
pub mod report;
pub mod scenario;
pub mod settings;
pub mod svg;

#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    Validation(String),
    Incomplete(String),
    Pattern(String),
    Collision(String),
    Verification(String),
    Io(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Incomplete(_) => 3,
            Failure::Pattern(_) => 4,
            Failure::Collision(_) => 5,
            Failure::Verification(_) | Failure::Io(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Validation(m) => write!(f, "validation: {m}"),
            Failure::Incomplete(m) => write!(f, "solver incomplete: {m}"),
            Failure::Pattern(m) => write!(f, "pattern error: {m}"),
            Failure::Collision(m) => write!(f, "collision: {m}"),
            Failure::Verification(m) => write!(f, "verification failed: {m}"),
            Failure::Io(m) => write!(f, "io: {m}"),
        }
    }
}

