use thiserror::Error;

use crate::model::{ConditionClass, Seconds, TestCaseId};
use crate::validate::Diagnostic;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("unknown period {0}")]
    UnknownPeriod(u32),
    #[error("unknown test case TC{0}")]
    UnknownTestCase(u32),
    #[error("shape mismatch: expected {expected:?} (cases x periods), found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("schema violation at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("invalid instance: {}", summarize(.0))]
    Invalid(Vec<Diagnostic>),
}

fn summarize(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Why the selection model has no feasible point.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Infeasibility {
    #[error(
        "period {period}: effective cases alone need {required} s but the limit is {limit} s \
         (relax the effective-case inclusion rung)"
    )]
    EffectiveOverBudget {
        period: u32,
        required: Seconds,
        limit: Seconds,
    },
    #[error(
        "{test_case} cannot run under {class} in any period within the time limit \
         (relax the condition-coverage rung)"
    )]
    CoverageUnsatisfiable {
        test_case: TestCaseId,
        class: ConditionClass,
    },
    #[error(
        "condition coverage cannot be met jointly within the time limits \
         (relax the condition-coverage rung)"
    )]
    CoverageJointlyInfeasible,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SelectionError {
    #[error("infeasible: {0}")]
    Infeasible(#[from] Infeasibility),
    #[error("enumeration needs {points} points, above the guard of {guard}")]
    TooLarge { points: u128, guard: u128 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SequencingError {
    #[error("order is not a permutation of the {jobs} jobs")]
    NotPermutation { jobs: usize },
    #[error("precedence among jobs contains a cycle")]
    PrecedenceCycle,
    #[error("job list has {jobs} jobs, above the limit of {limit}")]
    TooManyJobs { jobs: usize, limit: usize },
    #[error("duplicate job {0}")]
    DuplicateJob(String),
    #[error("precedence refers to job {0} outside the list")]
    UnknownJob(usize),
    #[error(
        "plan selects {count} runs of {test_case} in period {period}; at most 2 are supported"
    )]
    TooManyRuns {
        test_case: TestCaseId,
        period: u32,
        count: u32,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvaluationError {
    #[error(
        "effectiveness values must be nonnegative (baseline {baseline}, optimized {optimized})"
    )]
    NegativeInput { baseline: f64, optimized: f64 },
    #[error(transparent)]
    Selection(#[from] SelectionError),
    #[error(transparent)]
    Sequencing(#[from] SequencingError),
}
