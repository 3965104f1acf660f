use std::collections::HashMap;

use crate::error::SequencingError;
use crate::model::Seconds;

use super::{evaluate_schedule, JobList, Schedule};

/// Largest job list the subset dynamic program accepts.
pub const DEFAULT_DP_JOB_LIMIT: usize = 24;

/// Exact minimum-effectiveness order of a job list.
///
/// Dynamic program over the set of already placed jobs: with no idle time the
/// completion time of the next job depends only on that set, so the cheapest
/// completion of the remaining jobs is a function of the set alone. Only
/// precedence-closed sets are ever reached.
pub fn solve_sequencing(jobs: &JobList) -> Result<Schedule, SequencingError> {
    if jobs.len() > DEFAULT_DP_JOB_LIMIT {
        return Err(SequencingError::TooManyJobs {
            jobs: jobs.len(),
            limit: DEFAULT_DP_JOB_LIMIT,
        });
    }
    if !jobs.is_acyclic() {
        return Err(SequencingError::PrecedenceCycle);
    }
    let mut table = Table {
        jobs,
        preds: jobs.predecessor_masks(),
        full: (1u64 << jobs.len()) - 1,
        memo: HashMap::new(),
    };
    let mut order = Vec::with_capacity(jobs.len());
    let (mut placed, mut elapsed) = (0u64, 0);
    while placed != table.full {
        let target = table.cost_to_go(placed, elapsed);
        let next = (0..jobs.len())
            .find(|&v| table.eligible(placed, v) && table.step(placed, elapsed, v) == target)
            .expect("optimal successor exists");
        order.push(next);
        placed |= 1 << next;
        elapsed += jobs.jobs[next].run_seconds;
    }
    evaluate_schedule(jobs, &order)
}

struct Table<'a> {
    jobs: &'a JobList,
    preds: Vec<u64>,
    full: u64,
    memo: HashMap<u64, i64>,
}

impl Table<'_> {
    #[inline]
    fn eligible(&self, placed: u64, v: usize) -> bool {
        placed & (1 << v) == 0 && self.preds[v] & !placed == 0
    }

    /// Cost of placing `v` next plus the best completion afterwards.
    fn step(&mut self, placed: u64, elapsed: Seconds, v: usize) -> i64 {
        let job = &self.jobs.jobs[v];
        let t = self.jobs.start + elapsed + job.run_seconds;
        job.cost_at(t) + self.cost_to_go(placed | (1 << v), elapsed + job.run_seconds)
    }

    fn cost_to_go(&mut self, placed: u64, elapsed: Seconds) -> i64 {
        if placed == self.full {
            return 0;
        }
        if let Some(&c) = self.memo.get(&placed) {
            return c;
        }
        let mut best = i64::MAX;
        for v in 0..self.jobs.len() {
            if self.eligible(placed, v) {
                best = best.min(self.step(placed, elapsed, v));
            }
        }
        self.memo.insert(placed, best);
        best
    }
}
