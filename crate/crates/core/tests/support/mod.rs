//! Seeded random instances and job lists shared by the integration suites.

#![allow(dead_code)]

use std::collections::BTreeSet;

use altplan_core::{
    ConditionClass, Grid, Instance, Job, JobList, PeriodSpec, PriorityFactors, PrioritySets,
    Seconds, TestCase, TestCaseId,
};
use rand::seq::SliceRandom;
use rand::Rng;

/// A job list of at most `max_jobs` jobs over a random precedence DAG.
pub fn random_job_list<R: Rng>(rng: &mut R, max_jobs: usize) -> JobList {
    let n = rng.gen_range(1..=max_jobs);
    let start: Seconds = rng.gen_range(0..=5_000);
    let mut keys: Vec<(u32, bool)> = (1..=n as u32 + 2)
        .flat_map(|c| [(c, false), (c, true)])
        .collect();
    keys.shuffle(rng);
    keys.truncate(n);
    keys.sort();
    let jobs: Vec<Job> = keys
        .iter()
        .map(|&(case, duplicate)| {
            let run = rng.gen_range(1..=200);
            if duplicate {
                Job::duplicate(TestCaseId(case), run)
            } else {
                let weight = if rng.gen_bool(0.3) {
                    0
                } else {
                    rng.gen_range(1..=20)
                };
                Job::primary(
                    TestCaseId(case),
                    run,
                    weight,
                    start + rng.gen_range(0..=1_500),
                )
            }
        })
        .collect();
    let mut topo: Vec<usize> = (0..n).collect();
    topo.shuffle(rng);
    let density = rng.gen_range(0.0..0.5);
    let mut precedence = BTreeSet::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(density) {
                precedence.insert((topo[a], topo[b]));
            }
        }
    }
    JobList::new(rng.gen_range(1..=8), start, jobs, precedence)
        .expect("generated list is well formed")
}

/// Same jobs with every time multiplied by `factor`.
pub fn rescale_times(jobs: &JobList, factor: Seconds) -> JobList {
    let scaled = jobs
        .jobs()
        .iter()
        .map(|j| match j.due {
            Some(due) => Job::primary(j.case, j.run_seconds * factor, j.weight, due * factor),
            None => Job::duplicate(j.case, j.run_seconds * factor),
        })
        .collect();
    JobList::new(
        jobs.period,
        jobs.start * factor,
        scaled,
        jobs.precedence().iter().copied(),
    )
    .expect("rescaling keeps the list well formed")
}

/// A valid instance with up to `max_cases` cases and `max_periods` periods.
/// Priority factors are integers so objectives are exact in floating point.
pub fn random_instance<R: Rng>(rng: &mut R, max_cases: usize, max_periods: usize) -> Instance {
    let n = rng.gen_range(1..=max_cases);
    let m = rng.gen_range(1..=max_periods);
    let mut id = 0;
    let test_cases: Vec<TestCase> = (0..n)
        .map(|_| {
            id += rng.gen_range(1..=3);
            TestCase {
                id: TestCaseId(id),
                name: rng.gen_bool(0.3).then(|| format!("case {id}")),
            }
        })
        .collect();
    let ids: Vec<TestCaseId> = test_cases.iter().map(|c| c.id).collect();

    let mut failures = Grid::filled(n, m, 0);
    let mut run_seconds = Grid::filled(n, m, 1);
    let mut original_finish = Grid::filled(n, m, 0);
    let mut periods = Vec::with_capacity(m);
    let mut start = 0;
    for p in 0..m {
        let mut clock = start;
        let (mut owed, mut optional) = (0, 0);
        for i in 0..n {
            let run = rng.gen_range(1..=24) * 5;
            let weight = if rng.gen_bool(0.6) {
                0
            } else {
                rng.gen_range(1..=5)
            };
            clock += run;
            run_seconds.set(i, p, run);
            failures.set(i, p, weight);
            original_finish.set(i, p, clock);
            if weight > 0 {
                owed += run;
            }
            optional += run;
        }
        let time_limit = (owed + rng.gen_range(optional * 2 / 5..=optional)).max(1);
        periods.push(PeriodSpec {
            index: p as u32 + 1,
            condition: ConditionClass::ALL[rng.gen_range(0..4)],
            time_limit,
            start,
        });
        start += time_limit.max(clock - start) + rng.gen_range(0..=100);
    }

    let precedence = (0..m)
        .map(|_| {
            let mut pairs = BTreeSet::new();
            for a in 0..n {
                for b in a + 1..n {
                    if rng.gen_bool(0.2) {
                        pairs.insert((ids[a], ids[b]));
                    }
                }
            }
            pairs
        })
        .collect();
    let priority_sets = (0..m)
        .map(|_| {
            let mut sets = PrioritySets::default();
            for &c in &ids {
                match rng.gen_range(0..5) {
                    0 => {
                        sets.b.insert(c);
                    }
                    1 => {
                        sets.gamma.insert(c);
                    }
                    _ => {}
                }
            }
            sets
        })
        .collect();
    let mut factors: Vec<f64> = (0..4).map(|_| f64::from(rng.gen_range(0..=6))).collect();
    factors.sort_by(|a, b| b.total_cmp(a));

    Instance {
        periods,
        test_cases,
        failures,
        run_seconds,
        original_finish,
        precedence,
        priority_sets,
        priority_factors: PriorityFactors {
            p1: factors[0],
            p2: factors[1],
            p3: factors[2],
            p4: factors[3],
        },
    }
}

/// Number of points in the run-count box of `inst`: every cell has two
/// admissible counts.
pub fn box_points(inst: &Instance) -> u128 {
    1u128 << (inst.num_cases() * inst.num_periods())
}
