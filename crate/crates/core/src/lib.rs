//! Exact selection and sequencing of accelerated reliability test cases.
//!
//! A test runs in periods, each under one temperature/voltage condition. The
//! [`selection`] step decides how many times each test case runs per period
//! within a time budget; the [`sequencing`] step orders the selected runs so
//! that weighted cases finish close to their historical failure times. The
//! [`evaluation`] module compares optimized orders with an unoptimized
//! baseline and assembles the full report.

pub mod error;
pub mod evaluation;
pub mod fixture;
pub mod grid;
pub mod io;
pub mod model;
pub mod selection;
pub mod sequencing;
pub mod validate;

pub use error::{
    EvaluationError, Infeasibility, LoadError, ModelError, SelectionError, SequencingError,
};
pub use evaluation::{
    baseline_sequence, gap, run_pipeline, run_pipeline_with_plan, EffectivenessReport, Gap,
    PeriodReport, PlanSource,
};
pub use fixture::{paper_instance, published_selection};
pub use grid::Grid;
pub use io::{instance_to_json, load_instance, load_instance_file, read_plan};
pub use model::{
    ConditionClass, Instance, PeriodSpec, PriorityFactors, PriorityPartition, PrioritySets,
    Seconds, Temperature, TestCase, TestCaseId, Tier, Voltage,
};
pub use selection::{
    brute_force_selection, check_selection, selection_objective, solve_selection,
    FeasibilityReport, SelectionPlan,
};
pub use sequencing::{
    brute_force_sequencing, check_milp_constraints, evaluate_schedule, expand_jobs,
    solve_sequencing, Job, JobKind, JobList, MilpReport, Schedule,
};
pub use validate::{validate, Diagnostic};
