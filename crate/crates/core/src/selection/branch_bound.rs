use crate::error::{Infeasibility, SelectionError};
use crate::grid::Grid;
use crate::model::{Instance, Seconds};

use super::{diagnose, improves, max_runs, min_runs, warn_missing_classes, SelectionPlan};

/// Largest number of cells the exact per-period knapsack tables may use.
const EXACT_BOUND_CELLS: usize = 20_000_000;

/// One optional unit of a period's fractional knapsack relaxation.
#[derive(Clone, Copy)]
struct Unit {
    case: usize,
    value: f64,
    weight: Seconds,
}

/// Depth-first branch and bound over the run counts of one condition class,
/// period-major and case-minor, trying larger counts first.
///
/// The node bound drops condition coverage, which leaves one independent
/// knapsack per period. Those are solved exactly by a table over remaining
/// seconds (in units of the gcd of the period's run times), or relaxed to
/// fractional knapsacks when the tables would be too large. A candidate
/// replaces the incumbent only when it is strictly better, so the returned
/// plan is the lexicographically greatest optimal count vector in scan order.
struct Search<'a> {
    inst: &'a Instance,
    cases: usize,
    /// Positions of the periods searched, ascending.
    periods: Vec<usize>,
    /// Optional units of each period sorted by value density.
    units: Vec<Vec<Unit>>,
    /// Per period: time unit and `best[i][room]`, the best value of cases
    /// `i..` within `room` units, `NEG_INFINITY` when owed runs do not fit.
    exact: Option<&'a [KnapsackTable]>,
    /// Relaxed value of each whole period.
    period_bound: Vec<f64>,
    /// Relaxed value of the searched periods after the `k`-th.
    tail_bound: Vec<f64>,
    /// Run time still owed by effective cases after case `i` in period `p`.
    owed_after: Grid<Seconds>,
    /// Objective value of those owed runs.
    owed_value_after: Grid<f64>,
    /// Whether period `p` is the last one of its condition class.
    closes_class: Vec<bool>,
    class_of: Vec<usize>,

    counts: Grid<u32>,
    used: Vec<Seconds>,
    covered: Vec<[u32; 4]>,
    value: f64,
    best: Option<(f64, Grid<u32>)>,
}

impl<'a> Search<'a> {
    fn new(inst: &'a Instance, periods: Vec<usize>, exact: Option<&'a [KnapsackTable]>) -> Self {
        let (n, m) = (inst.num_cases(), inst.num_periods());
        let mut units = Vec::with_capacity(m);
        let mut owed_after = Grid::filled(n, m, 0);
        let mut owed_value_after = Grid::filled(n, m, 0.0);
        for p in 0..m {
            let mut list: Vec<Unit> = (0..n)
                .map(|i| Unit {
                    case: i,
                    value: inst.unit_value(i, p),
                    weight: inst.run_seconds.get(i, p),
                })
                .collect();
            list.sort_by(|a, b| {
                let (da, db) = (a.value / a.weight as f64, b.value / b.weight as f64);
                db.total_cmp(&da).then(a.case.cmp(&b.case))
            });
            units.push(list);

            let (mut owed, mut owed_value) = (0, 0.0);
            for i in (0..n).rev() {
                owed_after.set(i, p, owed);
                owed_value_after.set(i, p, owed_value);
                if inst.is_effective(i, p) {
                    owed += inst.run_seconds.get(i, p);
                    owed_value += inst.unit_value(i, p);
                }
            }
        }

        let class_of: Vec<usize> = inst.periods.iter().map(|s| s.condition.ordinal()).collect();
        let closes_class = (0..m)
            .map(|p| (p + 1..m).all(|q| class_of[q] != class_of[p]))
            .collect();

        let mut search = Self {
            inst,
            cases: n,
            periods,
            exact,
            units,
            period_bound: vec![0.0; m],
            tail_bound: vec![0.0; m],
            owed_after,
            owed_value_after,
            closes_class,
            class_of,
            counts: Grid::filled(n, m, 0),
            used: vec![0; m],
            covered: vec![[0; 4]; n],
            value: 0.0,
            best: None,
        };
        for p in 0..m {
            search.period_bound[p] = search.relaxed(p, 0, 0);
        }
        let mut acc = 0.0;
        for k in (0..search.periods.len()).rev() {
            search.tail_bound[k] = acc;
            acc += search.period_bound[search.periods[k]];
        }
        search
    }

    /// Relaxed value of cases `from..` of period `p` given `used` seconds
    /// already committed to cases before `from`.
    fn relaxed(&self, p: usize, from: usize, used: Seconds) -> f64 {
        let inst = self.inst;
        if let Some(tables) = self.exact {
            return tables[p].best(from, inst.periods[p].time_limit - used);
        }
        let (mut owed, mut value) = (0, 0.0);
        if from < self.cases {
            owed = self.owed_after.get(from, p);
            value = self.owed_value_after.get(from, p);
            if inst.is_effective(from, p) {
                owed += inst.run_seconds.get(from, p);
                value += inst.unit_value(from, p);
            }
        }
        let mut room = inst.periods[p].time_limit - used - owed;
        if room < 0 {
            return f64::NEG_INFINITY;
        }
        for unit in &self.units[p] {
            if unit.case < from || unit.value <= 0.0 {
                continue;
            }
            if unit.weight <= room {
                room -= unit.weight;
                value += unit.value;
            } else {
                value += unit.value * room as f64 / unit.weight as f64;
                break;
            }
        }
        value
    }

    fn dfs(&mut self, var: usize) {
        let total = self.cases * self.periods.len();
        if var == total {
            if improves(self.value, self.best.as_ref().map(|b| b.0)) {
                self.best = Some((self.value, self.counts.clone()));
            }
            return;
        }
        let (k, i) = (var / self.cases, var % self.cases);
        let p = self.periods[k];
        let bound = self.value + self.relaxed(p, i, self.used[p]) + self.tail_bound[k];
        if !improves(bound, self.best.as_ref().map(|b| b.0)) {
            return;
        }

        let inst = self.inst;
        let run = inst.run_seconds.get(i, p);
        let unit_value = inst.unit_value(i, p);
        let limit = inst.periods[p].time_limit;
        let class = self.class_of[p];
        for count in (min_runs(inst, i, p)..=max_runs(inst, i, p)).rev() {
            let load = self.used[p] + run * count as Seconds;
            if load + self.owed_after.get(i, p) > limit {
                continue;
            }
            if count == 0 && self.closes_class[p] && self.covered[i][class] == 0 {
                continue;
            }
            self.counts.set(i, p, count);
            self.used[p] = load;
            self.value += unit_value * count as f64;
            if count > 0 {
                self.covered[i][class] += 1;
            }

            self.dfs(var + 1);

            if count > 0 {
                self.covered[i][class] -= 1;
            }
            self.value -= unit_value * count as f64;
            self.used[p] -= run * count as Seconds;
            self.counts.set(i, p, 0);
        }
    }
}

struct KnapsackTable {
    unit: Seconds,
    rooms: usize,
    /// Row-major `[case][room]`, one extra row for "no case left".
    best: Vec<f64>,
}

impl KnapsackTable {
    fn build_all(inst: &Instance) -> Option<Vec<Self>> {
        let n = inst.num_cases();
        let mut cells = 0usize;
        let mut shapes = Vec::with_capacity(inst.num_periods());
        for p in 0..inst.num_periods() {
            let unit = (0..n)
                .fold(0, |g, i| gcd(g, inst.run_seconds.get(i, p)))
                .max(1);
            let rooms = usize::try_from(inst.periods[p].time_limit.max(0) / unit).ok()? + 1;
            cells = cells.checked_add(rooms.checked_mul(n + 1)?)?;
            shapes.push((unit, rooms));
        }
        if cells > EXACT_BOUND_CELLS {
            return None;
        }
        Some(
            shapes
                .into_iter()
                .enumerate()
                .map(|(p, (unit, rooms))| Self::build(inst, p, unit, rooms))
                .collect(),
        )
    }

    fn build(inst: &Instance, p: usize, unit: Seconds, rooms: usize) -> Self {
        let n = inst.num_cases();
        let mut best = vec![0.0; (n + 1) * rooms];
        for i in (0..n).rev() {
            let run = (inst.run_seconds.get(i, p) / unit) as usize;
            let value = inst.unit_value(i, p);
            let counts = min_runs(inst, i, p)..=max_runs(inst, i, p);
            for room in 0..rooms {
                let mut cell = f64::NEG_INFINITY;
                for count in counts.clone() {
                    let need = run * count as usize;
                    if need <= room {
                        let rest = best[(i + 1) * rooms + room - need];
                        cell = cell.max(value * count as f64 + rest);
                    }
                }
                best[i * rooms + room] = cell;
            }
        }
        Self { unit, rooms, best }
    }

    fn best(&self, from: usize, room: Seconds) -> f64 {
        if room < 0 {
            return f64::NEG_INFINITY;
        }
        let room = ((room / self.unit) as usize).min(self.rooms - 1);
        self.best[from * self.rooms + room]
    }
}

fn gcd(a: Seconds, b: Seconds) -> Seconds {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Exact optimum of the selection model.
pub fn solve_selection(inst: &Instance) -> Result<SelectionPlan, SelectionError> {
    if let Some(reason) = diagnose(inst) {
        return Err(reason.into());
    }
    warn_missing_classes(inst);
    search(inst, true)
}

/// Coverage only links periods of the same condition class, so each class is
/// searched on its own. Combining the per-class lexicographically greatest
/// optima gives the lexicographically greatest optimum of the whole model.
fn search(inst: &Instance, exact_bound: bool) -> Result<SelectionPlan, SelectionError> {
    let tables = KnapsackTable::build_all(inst).filter(|_| exact_bound);
    let mut counts = Grid::filled(inst.num_cases(), inst.num_periods(), 0);
    for periods in inst.periods_by_class() {
        if periods.is_empty() {
            continue;
        }
        let mut search = Search::new(inst, periods.clone(), tables.as_deref());
        search.dfs(0);
        let (_, best) = search.best.ok_or(SelectionError::Infeasible(
            Infeasibility::CoverageJointlyInfeasible,
        ))?;
        for p in periods {
            for i in 0..inst.num_cases() {
                counts.set(i, p, best.get(i, p));
            }
        }
    }
    Ok(SelectionPlan::from_counts(inst, counts)?)
}
