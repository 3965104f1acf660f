//! Choosing how many times each test case runs in each period.
//!
//! The model maximizes failure-weighted, priority-tiered run counts subject to
//! a per-period time limit, mandatory inclusion of effective cases, coverage of
//! every stress condition by every case, and run-count bounds (at most two runs
//! of an effective case, at most one of any other).

mod branch_bound;
mod enumerate;

use std::fmt;

use serde::Serialize;

pub use branch_bound::solve_selection;
pub use enumerate::{brute_force_selection, DEFAULT_ENUMERATION_GUARD};

use crate::error::{Infeasibility, ModelError};
use crate::grid::Grid;
use crate::model::{ConditionClass, Instance, Seconds, TestCaseId};

/// Run counts per `[test_case][period]` with their objective value.
#[derive(Clone, Debug, PartialEq)]
pub struct SelectionPlan {
    pub counts: Grid<u32>,
    pub objective: f64,
    pub period_totals: Vec<Seconds>,
}

impl SelectionPlan {
    /// Wraps externally supplied counts, computing objective and totals.
    pub fn from_counts(inst: &Instance, counts: Grid<u32>) -> Result<Self, ModelError> {
        let objective = selection_objective(inst, &counts)?;
        let period_totals = period_totals(inst, &counts);
        Ok(Self {
            counts,
            objective,
            period_totals,
        })
    }
}

fn check_shape(inst: &Instance, x: &Grid<u32>) -> Result<(), ModelError> {
    let expected = (inst.num_cases(), inst.num_periods());
    if x.shape() != expected {
        return Err(ModelError::ShapeMismatch {
            expected,
            found: x.shape(),
        });
    }
    Ok(())
}

/// Weighted objective of `x`. Feasibility is not checked.
pub fn selection_objective(inst: &Instance, x: &Grid<u32>) -> Result<f64, ModelError> {
    check_shape(inst, x)?;
    let mut total = 0.0;
    for p in 0..inst.num_periods() {
        for i in 0..inst.num_cases() {
            let count = x.get(i, p);
            if count > 0 {
                total += inst.unit_value(i, p) * count as f64;
            }
        }
    }
    Ok(total)
}

fn period_totals(inst: &Instance, x: &Grid<u32>) -> Vec<Seconds> {
    (0..inst.num_periods())
        .map(|p| {
            (0..inst.num_cases())
                .map(|i| inst.run_seconds.get(i, p) * x.get(i, p) as Seconds)
                .sum()
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum SelectionConstraint {
    /// Total run time of a period within its limit.
    TimeLimit,
    /// Every effective case runs at least once.
    EffectiveIncluded,
    /// Every case runs at least once under every stress condition present.
    ConditionCoverage,
    /// An effective case runs at most twice.
    RepeatCap,
    /// A non-effective case runs at most once.
    NonEffectiveBinary,
}

impl fmt::Display for SelectionConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::TimeLimit => "time-limit",
            Self::EffectiveIncluded => "effective-included",
            Self::ConditionCoverage => "condition-coverage",
            Self::RepeatCap => "repeat-cap",
            Self::NonEffectiveBinary => "non-effective-binary",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelectionViolation {
    pub constraint: SelectionConstraint,
    pub period: Option<u32>,
    pub test_case: Option<TestCaseId>,
    #[serde(serialize_with = "serialize_class")]
    pub class: Option<ConditionClass>,
    /// Signed slack of the violated inequality (negative when violated).
    pub slack: i64,
}

fn serialize_class<S: serde::Serializer>(
    c: &Option<ConditionClass>,
    s: S,
) -> Result<S::Ok, S::Error> {
    match c {
        Some(c) => s.serialize_some(&c.to_string()),
        None => s.serialize_none(),
    }
}

impl fmt::Display for SelectionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.constraint)?;
        if let Some(j) = self.period {
            write!(f, " period {j}")?;
        }
        if let Some(c) = self.class {
            write!(f, " class {c}")?;
        }
        if let Some(id) = self.test_case {
            write!(f, " {id}")?;
        }
        write!(f, " (slack {})", self.slack)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FeasibilityReport {
    pub violations: Vec<SelectionViolation>,
    pub period_totals: Vec<Seconds>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Lists every violated selection constraint of `x`.
pub fn check_selection(inst: &Instance, x: &Grid<u32>) -> Result<FeasibilityReport, ModelError> {
    check_shape(inst, x)?;
    let mut violations = Vec::new();
    let totals = period_totals(inst, x);
    for (p, spec) in inst.periods.iter().enumerate() {
        let slack = spec.time_limit - totals[p];
        if slack < 0 {
            violations.push(SelectionViolation {
                constraint: SelectionConstraint::TimeLimit,
                period: Some(spec.index),
                test_case: None,
                class: None,
                slack,
            });
        }
        for (i, case) in inst.test_cases.iter().enumerate() {
            let count = x.get(i, p) as i64;
            let mut push = |constraint, slack| {
                violations.push(SelectionViolation {
                    constraint,
                    period: Some(spec.index),
                    test_case: Some(case.id),
                    class: None,
                    slack,
                })
            };
            if inst.is_effective(i, p) {
                if count < 1 {
                    push(SelectionConstraint::EffectiveIncluded, count - 1);
                }
                if count > 2 {
                    push(SelectionConstraint::RepeatCap, 2 - count);
                }
            } else if count > 1 {
                push(SelectionConstraint::NonEffectiveBinary, 1 - count);
            }
        }
    }
    let by_class = inst.periods_by_class();
    for (i, case) in inst.test_cases.iter().enumerate() {
        for (k, periods) in by_class.iter().enumerate() {
            if periods.is_empty() {
                continue;
            }
            let runs: i64 = periods.iter().map(|&p| x.get(i, p) as i64).sum();
            if runs < 1 {
                violations.push(SelectionViolation {
                    constraint: SelectionConstraint::ConditionCoverage,
                    period: None,
                    test_case: Some(case.id),
                    class: Some(ConditionClass::ALL[k]),
                    slack: runs - 1,
                });
            }
        }
    }
    Ok(FeasibilityReport {
        violations,
        period_totals: totals,
    })
}

/// Upper run count of a cell.
pub(crate) fn max_runs(inst: &Instance, case: usize, period: usize) -> u32 {
    if inst.is_effective(case, period) {
        2
    } else {
        1
    }
}

/// Lower run count of a cell.
pub(crate) fn min_runs(inst: &Instance, case: usize, period: usize) -> u32 {
    u32::from(inst.is_effective(case, period))
}

/// Tolerance for objective comparisons; objectives mix integer failure counts
/// with real priority factors.
pub(crate) fn improves(candidate: f64, best: Option<f64>) -> bool {
    match best {
        None => true,
        Some(b) => candidate > b + 1e-9 * (1.0 + b.abs()),
    }
}

/// Names the first obviously unsatisfiable rung, if any.
pub(crate) fn diagnose(inst: &Instance) -> Option<Infeasibility> {
    let mandatory: Vec<Seconds> = (0..inst.num_periods())
        .map(|p| {
            (0..inst.num_cases())
                .filter(|&i| inst.is_effective(i, p))
                .map(|i| inst.run_seconds.get(i, p))
                .sum()
        })
        .collect();
    for (p, spec) in inst.periods.iter().enumerate() {
        if mandatory[p] > spec.time_limit {
            return Some(Infeasibility::EffectiveOverBudget {
                period: spec.index,
                required: mandatory[p],
                limit: spec.time_limit,
            });
        }
    }
    for (k, periods) in inst.periods_by_class().iter().enumerate() {
        if periods.is_empty() {
            continue;
        }
        for (i, case) in inst.test_cases.iter().enumerate() {
            let reachable = periods.iter().any(|&p| {
                inst.is_effective(i, p)
                    || mandatory[p] + inst.run_seconds.get(i, p) <= inst.periods[p].time_limit
            });
            if !reachable {
                return Some(Infeasibility::CoverageUnsatisfiable {
                    test_case: case.id,
                    class: ConditionClass::ALL[k],
                });
            }
        }
    }
    None
}

pub(crate) fn warn_missing_classes(inst: &Instance) {
    for (k, periods) in inst.periods_by_class().iter().enumerate() {
        if periods.is_empty() {
            log::warn!(
                "no period runs under {}; its coverage requirement is skipped",
                ConditionClass::ALL[k]
            );
        }
    }
}
