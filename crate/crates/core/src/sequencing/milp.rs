use std::fmt;

use serde::Serialize;

use crate::model::Seconds;

use super::{JobList, Schedule};

/// Constraint families of the linear-ordering formulation of sequencing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum MilpConstraint {
    /// `x_ab + x_ba = 1` for every pair of distinct jobs.
    Antisymmetry,
    /// `x_ac >= x_ab + x_bc - 1`.
    Transitivity,
    /// `x_ab = 1` for every precedence pair.
    Precedence,
    /// `t_b - t_a + M (1 - x_ab) >= r_b`.
    BigMSequencing,
    /// `t_a <= Σ r + start`.
    Horizon,
    /// `t_a` is a nonnegative integer.
    NonNegativeTime,
    /// `x_ab` is binary.
    Binary,
}

impl fmt::Display for MilpConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Antisymmetry => "antisymmetry",
            Self::Transitivity => "transitivity",
            Self::Precedence => "precedence",
            Self::BigMSequencing => "big-M sequencing",
            Self::Horizon => "horizon",
            Self::NonNegativeTime => "nonnegative time",
            Self::Binary => "binary",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MilpViolation {
    pub constraint: MilpConstraint,
    /// Job positions taking part, in constraint order.
    pub jobs: Vec<usize>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MilpReport {
    pub big_m: Seconds,
    pub violations: Vec<MilpViolation>,
}

impl MilpReport {
    pub fn is_satisfied(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Rebuilds the ordering incidences and completion times of `schedule` and
/// checks every constraint of the linear-ordering model, with
/// `M = Σ r + start`.
pub fn check_milp_constraints(jobs: &JobList, schedule: &Schedule) -> MilpReport {
    let n = jobs.len();
    let total: Seconds = jobs.total_run_seconds();
    let big_m = total + jobs.start;
    let label = |v: usize| jobs.jobs()[v].label();

    let mut position: Vec<Option<usize>> = vec![None; n];
    let mut time: Vec<Option<Seconds>> = vec![None; n];
    for (pos, &v) in schedule.order.iter().enumerate() {
        if v < n && position[v].is_none() {
            position[v] = Some(pos);
            time[v] = schedule.completion.get(pos).copied();
        }
    }
    let before = |a: usize, b: usize| -> i64 {
        match (position[a], position[b]) {
            (Some(pa), Some(pb)) if pa < pb => 1,
            _ => 0,
        }
    };

    let mut violations = Vec::new();
    let mut push = |constraint, jobs: Vec<usize>, detail: String| {
        violations.push(MilpViolation {
            constraint,
            jobs,
            detail,
        })
    };

    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let x = before(a, b);
            if !(0..=1).contains(&x) {
                push(
                    MilpConstraint::Binary,
                    vec![a, b],
                    format!("x({},{}) = {x}", label(a), label(b)),
                );
            }
            if a < b && x + before(b, a) != 1 {
                push(
                    MilpConstraint::Antisymmetry,
                    vec![a, b],
                    format!("x({0},{1}) + x({1},{0}) != 1", label(a), label(b)),
                );
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if a == b || b == c || a == c {
                    continue;
                }
                if before(a, c) < before(a, b) + before(b, c) - 1 {
                    push(
                        MilpConstraint::Transitivity,
                        vec![a, b, c],
                        format!(
                            "{} < {} < {} but not {0} < {2}",
                            label(a),
                            label(b),
                            label(c)
                        ),
                    );
                }
            }
        }
    }
    for &(a, b) in jobs.precedence() {
        if before(a, b) != 1 {
            push(
                MilpConstraint::Precedence,
                vec![a, b],
                format!("{} must precede {}", label(a), label(b)),
            );
        }
    }
    for a in 0..n {
        let Some(ta) = time[a] else { continue };
        if ta < 0 {
            push(
                MilpConstraint::NonNegativeTime,
                vec![a],
                format!("t({}) = {ta}", label(a)),
            );
        }
        if ta > big_m {
            push(
                MilpConstraint::Horizon,
                vec![a],
                format!("t({}) = {ta} exceeds {big_m}", label(a)),
            );
        }
        for (b, &tb) in time.iter().enumerate() {
            let Some(tb) = tb.filter(|_| a != b) else {
                continue;
            };
            let rb = jobs.jobs()[b].run_seconds;
            if tb - ta + big_m * (1 - before(a, b)) < rb {
                push(
                    MilpConstraint::BigMSequencing,
                    vec![a, b],
                    format!("t({}) - t({}) = {} < r = {rb}", label(b), label(a), tb - ta),
                );
            }
        }
    }
    MilpReport { big_m, violations }
}
