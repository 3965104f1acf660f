use crate::error::{Infeasibility, SelectionError};
use crate::grid::Grid;
use crate::model::{Instance, Seconds};

use super::{diagnose, improves, max_runs, min_runs, SelectionPlan};

pub const DEFAULT_ENUMERATION_GUARD: u128 = 100_000_000;

/// Exhaustive reference solver: visits every point of the run-count box in
/// the same order as [`super::solve_selection`] and keeps the first strict
/// improvement.
pub fn brute_force_selection(
    inst: &Instance,
    guard: u128,
) -> Result<SelectionPlan, SelectionError> {
    let (n, m) = (inst.num_cases(), inst.num_periods());
    let mut points: u128 = 1;
    for p in 0..m {
        for i in 0..n {
            let size = (max_runs(inst, i, p) - min_runs(inst, i, p) + 1) as u128;
            points = points.saturating_mul(size);
        }
    }
    if points > guard {
        return Err(SelectionError::TooLarge { points, guard });
    }

    let mut walk = Walk {
        inst,
        counts: Grid::filled(n, m, 0),
        best: None,
    };
    walk.visit(0);
    match walk.best {
        Some((_, counts)) => Ok(SelectionPlan::from_counts(inst, counts)?),
        None => Err(diagnose(inst)
            .unwrap_or(Infeasibility::CoverageJointlyInfeasible)
            .into()),
    }
}

struct Walk<'a> {
    inst: &'a Instance,
    counts: Grid<u32>,
    best: Option<(f64, Grid<u32>)>,
}

impl Walk<'_> {
    fn visit(&mut self, var: usize) {
        let (n, m) = (self.inst.num_cases(), self.inst.num_periods());
        if var == n * m {
            self.leaf();
            return;
        }
        let (p, i) = (var / n, var % n);
        for count in (min_runs(self.inst, i, p)..=max_runs(self.inst, i, p)).rev() {
            self.counts.set(i, p, count);
            self.visit(var + 1);
        }
        self.counts.set(i, p, 0);
    }

    fn leaf(&mut self) {
        let inst = self.inst;
        let x = &self.counts;
        for (p, spec) in inst.periods.iter().enumerate() {
            let load: Seconds = (0..inst.num_cases())
                .map(|i| inst.run_seconds.get(i, p) * x.get(i, p) as Seconds)
                .sum();
            if load > spec.time_limit {
                return;
            }
        }
        for periods in inst.periods_by_class() {
            if periods.is_empty() {
                continue;
            }
            for i in 0..inst.num_cases() {
                if periods.iter().all(|&p| x.get(i, p) == 0) {
                    return;
                }
            }
        }
        let mut value = 0.0;
        for p in 0..inst.num_periods() {
            for i in 0..inst.num_cases() {
                value += inst.unit_value(i, p) * x.get(i, p) as f64;
            }
        }
        if improves(value, self.best.as_ref().map(|b| b.0)) {
            self.best = Some((value, x.clone()));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture::paper_instance;
    use crate::model::TestCaseId;
    use crate::selection::solve_selection;

    fn ids(v: &[u32]) -> Vec<TestCaseId> {
        v.iter().map(|&i| TestCaseId(i)).collect()
    }

    #[test]
    fn matches_solver_on_four_cases_four_periods() {
        let inst = paper_instance()
            .restrict(&ids(&[1, 2, 8, 9]), &[1, 2, 3, 4])
            .unwrap();
        let exact = solve_selection(&inst).unwrap();
        let oracle = brute_force_selection(&inst, DEFAULT_ENUMERATION_GUARD).unwrap();
        assert_eq!(exact, oracle);
    }

    #[test]
    fn matches_solver_on_two_cases_all_periods() {
        let inst = paper_instance()
            .restrict(&ids(&[1, 5]), &[1, 2, 3, 4, 5, 6, 7, 8])
            .unwrap();
        let exact = solve_selection(&inst).unwrap();
        let oracle = brute_force_selection(&inst, DEFAULT_ENUMERATION_GUARD).unwrap();
        assert_eq!(exact.objective, oracle.objective);
        assert_eq!(exact.counts, oracle.counts);
    }

    #[test]
    fn single_effective_case_repeats_when_it_fits() {
        let mut inst = paper_instance().restrict(&ids(&[1]), &[1]).unwrap();
        let plan = brute_force_selection(&inst, 10).unwrap();
        assert_eq!(plan.counts.get(0, 0), 2);
        inst.periods[0].time_limit = 399;
        let plan = brute_force_selection(&inst, 10).unwrap();
        assert_eq!(plan.counts.get(0, 0), 1);
    }

    #[test]
    fn guard_rejects_large_boxes() {
        let err = brute_force_selection(&paper_instance(), DEFAULT_ENUMERATION_GUARD).unwrap_err();
        assert_eq!(
            err,
            SelectionError::TooLarge {
                points: 1 << 80,
                guard: DEFAULT_ENUMERATION_GUARD
            }
        );
    }
}
