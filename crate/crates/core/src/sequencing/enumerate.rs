use crate::error::SequencingError;
use crate::model::Seconds;

use super::{evaluate_schedule, JobList, Schedule};

pub const DEFAULT_PERMUTATION_GUARD: usize = 10;

/// Reference solver: walks every precedence-feasible permutation in
/// lexicographic order of job positions and keeps the first minimum.
pub fn brute_force_sequencing(jobs: &JobList, guard: usize) -> Result<Schedule, SequencingError> {
    if jobs.len() > guard {
        return Err(SequencingError::TooManyJobs {
            jobs: jobs.len(),
            limit: guard,
        });
    }
    if !jobs.is_acyclic() {
        return Err(SequencingError::PrecedenceCycle);
    }
    let mut walk = Walk {
        jobs,
        preds: jobs.predecessor_masks(),
        prefix: Vec::with_capacity(jobs.len()),
        best: None,
    };
    walk.visit(0, 0, 0);
    let (_, order) = walk.best.expect("acyclic job lists have a feasible order");
    evaluate_schedule(jobs, &order)
}

struct Walk<'a> {
    jobs: &'a JobList,
    preds: Vec<u64>,
    prefix: Vec<usize>,
    best: Option<(i64, Vec<usize>)>,
}

impl Walk<'_> {
    fn visit(&mut self, placed: u64, elapsed: Seconds, cost: i64) {
        let n = self.jobs.len();
        if self.prefix.len() == n {
            if self.best.as_ref().is_none_or(|(b, _)| cost < *b) {
                self.best = Some((cost, self.prefix.clone()));
            }
            return;
        }
        for v in 0..n {
            if placed & (1 << v) != 0 || self.preds[v] & !placed != 0 {
                continue;
            }
            let job = &self.jobs.jobs[v];
            let t = self.jobs.start + elapsed + job.run_seconds;
            self.prefix.push(v);
            self.visit(
                placed | (1 << v),
                elapsed + job.run_seconds,
                cost + job.cost_at(t),
            );
            self.prefix.pop();
        }
    }
}
