//! Ordering the selected runs of one period.
//!
//! Each selected case becomes a primary job carrying its failure weight and
//! historical failure time; a second run becomes a duplicate job that only
//! consumes time. The effectiveness index of an order is the weighted absolute
//! deviation between completion and historical failure times, normalized by
//! total run time and total weight, in percent. Lower is better.

mod dp;
mod enumerate;
mod milp;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

pub use dp::{solve_sequencing, DEFAULT_DP_JOB_LIMIT};
pub use enumerate::{brute_force_sequencing, DEFAULT_PERMUTATION_GUARD};
pub use milp::{check_milp_constraints, MilpConstraint, MilpReport, MilpViolation};

use crate::error::{ModelError, SequencingError};
use crate::grid::Grid;
use crate::model::{Instance, Seconds, TestCaseId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum JobKind {
    Primary,
    Duplicate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Job {
    pub case: TestCaseId,
    pub kind: JobKind,
    pub run_seconds: Seconds,
    /// Failure weight; always zero for a duplicate.
    pub weight: i64,
    /// Historical failure time; `None` for a duplicate.
    pub due: Option<Seconds>,
}

impl Job {
    pub fn primary(case: TestCaseId, run_seconds: Seconds, weight: i64, due: Seconds) -> Self {
        Self {
            case,
            kind: JobKind::Primary,
            run_seconds,
            weight,
            due: Some(due),
        }
    }

    pub fn duplicate(case: TestCaseId, run_seconds: Seconds) -> Self {
        Self {
            case,
            kind: JobKind::Duplicate,
            run_seconds,
            weight: 0,
            due: None,
        }
    }

    /// Weighted deviation of this job when it completes at `t`.
    #[inline]
    pub fn cost_at(&self, t: Seconds) -> i64 {
        match self.due {
            Some(due) if self.weight != 0 => self.weight * (t - due).abs(),
            _ => 0,
        }
    }

    pub fn label(&self) -> String {
        match self.kind {
            JobKind::Primary => self.case.to_string(),
            JobKind::Duplicate => format!("{}-", self.case),
        }
    }
}

/// Jobs of one period. Job positions define the tie-break order of the
/// solvers: among optimal sequences the lexicographically smallest sequence of
/// positions wins.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JobList {
    pub period: u32,
    pub start: Seconds,
    jobs: Vec<Job>,
    precedence: BTreeSet<(usize, usize)>,
}

impl JobList {
    pub fn new(
        period: u32,
        start: Seconds,
        jobs: Vec<Job>,
        precedence: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, SequencingError> {
        let mut seen = BTreeSet::new();
        for job in &jobs {
            if !seen.insert((job.case, job.kind)) {
                return Err(SequencingError::DuplicateJob(job.label()));
            }
        }
        let precedence: BTreeSet<(usize, usize)> = precedence.into_iter().collect();
        for &(a, b) in &precedence {
            for idx in [a, b] {
                if idx >= jobs.len() {
                    return Err(SequencingError::UnknownJob(idx));
                }
            }
        }
        Ok(Self {
            period,
            start,
            jobs,
            precedence,
        })
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    /// Pairs `(a, b)`: job `a` must complete before job `b` starts.
    pub fn precedence(&self) -> &BTreeSet<(usize, usize)> {
        &self.precedence
    }

    pub fn total_run_seconds(&self) -> Seconds {
        self.jobs.iter().map(|j| j.run_seconds).sum()
    }

    pub fn total_weight(&self) -> i64 {
        self.jobs.iter().map(|j| j.weight).sum()
    }

    pub fn position(&self, case: TestCaseId, kind: JobKind) -> Option<usize> {
        self.jobs
            .iter()
            .position(|j| j.case == case && j.kind == kind)
    }

    /// Bitmask of required predecessors per job.
    pub(crate) fn predecessor_masks(&self) -> Vec<u64> {
        let mut masks = vec![0u64; self.jobs.len()];
        for &(a, b) in &self.precedence {
            masks[b] |= 1 << a;
        }
        masks
    }

    pub(crate) fn is_acyclic(&self) -> bool {
        let n = self.jobs.len();
        let mut indegree = vec![0usize; n];
        for &(_, b) in &self.precedence {
            indegree[b] += 1;
        }
        let mut ready: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = ready.pop() {
            seen += 1;
            for &(a, b) in &self.precedence {
                if a == v {
                    indegree[b] -= 1;
                    if indegree[b] == 0 {
                        ready.push(b);
                    }
                }
            }
        }
        seen == n
    }
}

/// Builds the job list of period `j` from selection counts.
///
/// For every precedence pair `(i, k)` with both cases selected, the primary
/// job of `i` precedes every job of `k`. A case that precedes every other case
/// of the period (a leader) also runs its primary job before its own
/// duplicate; other duplicates are unconstrained by their own primary.
pub fn expand_jobs(
    inst: &Instance,
    counts: &Grid<u32>,
    j: u32,
) -> Result<JobList, SequencingError> {
    let expected = (inst.num_cases(), inst.num_periods());
    if counts.shape() != expected {
        return Err(ModelError::ShapeMismatch {
            expected,
            found: counts.shape(),
        }
        .into());
    }
    let p = inst.period_pos(j)?;
    let mut jobs = Vec::new();
    for (i, case) in inst.test_cases.iter().enumerate() {
        let count = counts.get(i, p);
        if count > 2 {
            return Err(SequencingError::TooManyRuns {
                test_case: case.id,
                period: j,
                count,
            });
        }
        let run = inst.run_seconds.get(i, p);
        if count >= 1 {
            jobs.push(Job::primary(
                case.id,
                run,
                inst.failures.get(i, p),
                inst.original_finish.get(i, p),
            ));
        }
        if count == 2 {
            jobs.push(Job::duplicate(case.id, run));
        }
    }

    let primary = |id: TestCaseId| {
        jobs.iter()
            .position(|job| job.case == id && job.kind == JobKind::Primary)
    };
    let mut precedence = BTreeSet::new();
    for &(a, b) in &inst.precedence[p] {
        let Some(src) = primary(a) else { continue };
        for (idx, job) in jobs.iter().enumerate() {
            if job.case == b {
                precedence.insert((src, idx));
            }
        }
    }
    for leader in inst.leaders(p) {
        let src = primary(leader);
        let dup = jobs
            .iter()
            .position(|job| job.case == leader && job.kind == JobKind::Duplicate);
        if let (Some(src), Some(dup)) = (src, dup) {
            precedence.insert((src, dup));
        }
    }
    JobList::new(j, inst.periods[p].start, jobs, precedence)
}

/// An evaluated order of a job list.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Schedule {
    pub period: u32,
    pub start: Seconds,
    /// Job positions in execution order.
    pub order: Vec<usize>,
    /// Job labels in execution order (`TC3`, `TC3-`).
    pub labels: Vec<String>,
    /// Completion time of each job in execution order.
    pub completion: Vec<Seconds>,
    /// Σ weight · |completion − historical failure time| over primary jobs.
    pub deviation: i64,
    pub total_run_seconds: Seconds,
    pub total_weight: i64,
    /// Effectiveness index in percent.
    pub effectiveness: f64,
    /// Set when the job list carries no weight; the index is then 0.
    pub zero_weight: bool,
    /// Precedence pairs `(a, b)` where `b` runs before `a`.
    pub precedence_violations: Vec<(usize, usize)>,
}

impl Schedule {
    pub fn is_precedence_feasible(&self) -> bool {
        self.precedence_violations.is_empty()
    }

    /// Denominator of the index before scaling to percent.
    pub fn normalizer(&self) -> i64 {
        self.total_run_seconds * self.total_weight
    }
}

pub(crate) fn effectiveness(deviation: i64, total_run: Seconds, total_weight: i64) -> (f64, bool) {
    let denominator = total_run * total_weight;
    if denominator == 0 {
        (0.0, true)
    } else {
        (100.0 * deviation as f64 / denominator as f64, false)
    }
}

/// Evaluates `order` (job positions). Precedence violations are reported,
/// not rejected.
pub fn evaluate_schedule(jobs: &JobList, order: &[usize]) -> Result<Schedule, SequencingError> {
    let n = jobs.len();
    let mut seen = vec![false; n];
    if order.len() != n
        || order
            .iter()
            .any(|&v| v >= n || std::mem::replace(&mut seen[v], true))
    {
        return Err(SequencingError::NotPermutation { jobs: n });
    }
    let mut position = vec![0; n];
    for (pos, &v) in order.iter().enumerate() {
        position[v] = pos;
    }
    let mut t = jobs.start;
    let mut completion = Vec::with_capacity(n);
    let mut deviation = 0;
    for &v in order {
        let job = &jobs.jobs[v];
        t += job.run_seconds;
        completion.push(t);
        deviation += job.cost_at(t);
    }
    let precedence_violations = jobs
        .precedence
        .iter()
        .filter(|&&(a, b)| position[b] < position[a])
        .copied()
        .collect();
    let (total_run, total_weight) = (jobs.total_run_seconds(), jobs.total_weight());
    let (effectiveness, zero_weight) = effectiveness(deviation, total_run, total_weight);
    Ok(Schedule {
        period: jobs.period,
        start: jobs.start,
        order: order.to_vec(),
        labels: order.iter().map(|&v| jobs.jobs[v].label()).collect(),
        completion,
        deviation,
        total_run_seconds: total_run,
        total_weight,
        effectiveness,
        zero_weight,
        precedence_violations,
    })
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "period {}: {} ({:.4})",
            self.period,
            self.labels.join(" "),
            self.effectiveness
        )
    }
}
