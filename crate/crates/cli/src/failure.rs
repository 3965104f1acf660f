use std::fmt;
use std::process::ExitCode;

use altplan_core::{EvaluationError, LoadError, SelectionError, SequencingError};

/// Process exit status of a failed command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Infeasible = 1,
    InvalidInput = 2,
    LimitExceeded = 3,
}

#[derive(Debug)]
pub struct Failure {
    pub status: Status,
    pub message: String,
}

impl Failure {
    pub fn new(status: Status, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Self::new(Status::InvalidInput, message)
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.status as u8)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Invalid(diagnostics) => {
                let lines: Vec<String> = diagnostics.iter().map(ToString::to_string).collect();
                Self::invalid(format!("invalid instance:\n  {}", lines.join("\n  ")))
            }
            other => Self::invalid(other.to_string()),
        }
    }
}

impl From<SelectionError> for Failure {
    fn from(e: SelectionError) -> Self {
        let status = match e {
            SelectionError::Infeasible(_) => Status::Infeasible,
            SelectionError::TooLarge { .. } => Status::LimitExceeded,
            SelectionError::Model(_) => Status::InvalidInput,
        };
        Self::new(status, e.to_string())
    }
}

impl From<SequencingError> for Failure {
    fn from(e: SequencingError) -> Self {
        let status = match e {
            SequencingError::TooManyJobs { .. } => Status::LimitExceeded,
            _ => Status::InvalidInput,
        };
        Self::new(status, e.to_string())
    }
}

impl From<EvaluationError> for Failure {
    fn from(e: EvaluationError) -> Self {
        match e {
            EvaluationError::Selection(e) => e.into(),
            EvaluationError::Sequencing(e) => e.into(),
            EvaluationError::NegativeInput { .. } => Self::invalid(e.to_string()),
        }
    }
}
