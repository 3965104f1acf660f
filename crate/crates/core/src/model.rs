//! Domain types for a temperature/voltage cycle test: periods, test cases,
//! per-period data matrices, precedence and priority tiers.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::grid::Grid;

/// All durations and instants are integer seconds.
pub type Seconds = i64;

/// 1-based test case identifier, printed as `TC<n>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TestCaseId(pub u32);

impl fmt::Display for TestCaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TC{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Temperature {
    LT,
    HT,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Voltage {
    LV,
    HV,
}

/// Accelerated stress condition applied during a period.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConditionClass {
    pub temperature: Temperature,
    pub voltage: Voltage,
}

impl ConditionClass {
    pub const LTLV: Self = Self::new(Temperature::LT, Voltage::LV);
    pub const HTLV: Self = Self::new(Temperature::HT, Voltage::LV);
    pub const LTHV: Self = Self::new(Temperature::LT, Voltage::HV);
    pub const HTHV: Self = Self::new(Temperature::HT, Voltage::HV);

    pub const ALL: [Self; 4] = [Self::LTLV, Self::HTLV, Self::LTHV, Self::HTHV];

    pub const fn new(temperature: Temperature, voltage: Voltage) -> Self {
        Self {
            temperature,
            voltage,
        }
    }

    /// Position in [`ConditionClass::ALL`].
    pub fn ordinal(self) -> usize {
        match (self.temperature, self.voltage) {
            (Temperature::LT, Voltage::LV) => 0,
            (Temperature::HT, Voltage::LV) => 1,
            (Temperature::LT, Voltage::HV) => 2,
            (Temperature::HT, Voltage::HV) => 3,
        }
    }
}

impl fmt::Display for ConditionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{:?}", self.temperature, self.voltage)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PeriodSpec {
    pub index: u32,
    pub condition: ConditionClass,
    /// Time budget for the selected cases of this period.
    pub time_limit: Seconds,
    pub start: Seconds,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestCase {
    pub id: TestCaseId,
    pub name: Option<String>,
}

/// The `B` and `Gamma` priority sets of one period.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrioritySets {
    pub b: BTreeSet<TestCaseId>,
    pub gamma: BTreeSet<TestCaseId>,
}

/// Objective weights of the four priority tiers, highest tier first.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriorityFactors {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p4: f64,
}

impl PriorityFactors {
    pub fn weight(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Effective => self.p1,
            Tier::Preferred => self.p2,
            Tier::Secondary => self.p3,
            Tier::Remainder => self.p4,
        }
    }
}

/// Priority tier of a test case within one period.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tier {
    /// Exposed at least one failure in this period.
    Effective,
    /// In `B` and not effective.
    Preferred,
    /// In `Gamma` and not effective.
    Secondary,
    /// Everything else.
    Remainder,
}

/// Full problem data. Matrices are indexed `[test_case][period]` by position
/// in `test_cases` and `periods`.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub periods: Vec<PeriodSpec>,
    pub test_cases: Vec<TestCase>,
    /// Historical failure counts.
    pub failures: Grid<i64>,
    pub run_seconds: Grid<Seconds>,
    /// Completion time of each case in the original, unreduced schedule.
    pub original_finish: Grid<Seconds>,
    /// Per-period precedence pairs `(before, after)`.
    pub precedence: Vec<BTreeSet<(TestCaseId, TestCaseId)>>,
    pub priority_sets: Vec<PrioritySets>,
    pub priority_factors: PriorityFactors,
}

/// The four disjoint priority tiers of one period.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PriorityPartition {
    pub effective: BTreeSet<TestCaseId>,
    pub preferred: BTreeSet<TestCaseId>,
    pub secondary: BTreeSet<TestCaseId>,
    pub remainder: BTreeSet<TestCaseId>,
}

impl Instance {
    pub fn num_periods(&self) -> usize {
        self.periods.len()
    }

    pub fn num_cases(&self) -> usize {
        self.test_cases.len()
    }

    pub fn case_ids(&self) -> impl Iterator<Item = TestCaseId> + '_ {
        self.test_cases.iter().map(|c| c.id)
    }

    /// Position of period `j` (1-based index as printed in tables).
    pub fn period_pos(&self, j: u32) -> Result<usize, ModelError> {
        self.periods
            .iter()
            .position(|p| p.index == j)
            .ok_or(ModelError::UnknownPeriod(j))
    }

    pub fn case_pos(&self, id: TestCaseId) -> Result<usize, ModelError> {
        self.test_cases
            .iter()
            .position(|c| c.id == id)
            .ok_or(ModelError::UnknownTestCase(id.0))
    }

    pub fn period(&self, j: u32) -> Result<&PeriodSpec, ModelError> {
        Ok(&self.periods[self.period_pos(j)?])
    }

    pub fn is_effective(&self, case: usize, period: usize) -> bool {
        self.failures.get(case, period) >= 1
    }

    /// Cases that exposed at least one failure in period `j`.
    pub fn effective_set(&self, j: u32) -> Result<BTreeSet<TestCaseId>, ModelError> {
        let p = self.period_pos(j)?;
        Ok((0..self.num_cases())
            .filter(|&i| self.is_effective(i, p))
            .map(|i| self.test_cases[i].id)
            .collect())
    }

    pub fn condition_class(&self, j: u32) -> Result<ConditionClass, ModelError> {
        Ok(self.period(j)?.condition)
    }

    /// Tier of case position `case` in period position `period`.
    pub fn tier(&self, case: usize, period: usize) -> Tier {
        if self.is_effective(case, period) {
            return Tier::Effective;
        }
        let id = self.test_cases[case].id;
        let sets = &self.priority_sets[period];
        if sets.b.contains(&id) {
            Tier::Preferred
        } else if sets.gamma.contains(&id) {
            Tier::Secondary
        } else {
            Tier::Remainder
        }
    }

    pub fn priority_partition(&self, j: u32) -> Result<PriorityPartition, ModelError> {
        let p = self.period_pos(j)?;
        let mut part = PriorityPartition::default();
        for (i, case) in self.test_cases.iter().enumerate() {
            let set = match self.tier(i, p) {
                Tier::Effective => &mut part.effective,
                Tier::Preferred => &mut part.preferred,
                Tier::Secondary => &mut part.secondary,
                Tier::Remainder => &mut part.remainder,
            };
            set.insert(case.id);
        }
        Ok(part)
    }

    /// Objective coefficient of one unit of `x[case][period]`.
    pub fn unit_value(&self, case: usize, period: usize) -> f64 {
        self.failures.get(case, period) as f64
            + self.priority_factors.weight(self.tier(case, period))
    }

    /// Cases that must precede every other case in the period.
    pub fn leaders(&self, period: usize) -> BTreeSet<TestCaseId> {
        let pairs = &self.precedence[period];
        self.case_ids()
            .filter(|&i| {
                self.num_cases() > 1
                    && self
                        .case_ids()
                        .filter(|&k| k != i)
                        .all(|k| pairs.contains(&(i, k)))
            })
            .collect()
    }

    /// Period positions grouped by condition class, in [`ConditionClass::ALL`] order.
    pub fn periods_by_class(&self) -> [Vec<usize>; 4] {
        let mut out: [Vec<usize>; 4] = Default::default();
        for (p, spec) in self.periods.iter().enumerate() {
            out[spec.condition.ordinal()].push(p);
        }
        out
    }

    /// Σ_i r_ij over all cases: the period length when every case runs once.
    pub fn full_period_seconds(&self, period: usize) -> Seconds {
        self.run_seconds.column(period).sum()
    }

    /// Sub-instance on the given cases and periods (by id and 1-based index).
    /// Periods are renumbered `1..=k`; start times and limits are kept.
    pub fn restrict(&self, cases: &[TestCaseId], periods: &[u32]) -> Result<Instance, ModelError> {
        let rows = cases
            .iter()
            .map(|&c| self.case_pos(c))
            .collect::<Result<Vec<_>, _>>()?;
        let cols = periods
            .iter()
            .map(|&j| self.period_pos(j))
            .collect::<Result<Vec<_>, _>>()?;
        let keep: BTreeSet<TestCaseId> = cases.iter().copied().collect();
        let filter = |set: &BTreeSet<TestCaseId>| -> BTreeSet<TestCaseId> {
            set.intersection(&keep).copied().collect()
        };
        Ok(Instance {
            periods: cols
                .iter()
                .enumerate()
                .map(|(n, &p)| PeriodSpec {
                    index: n as u32 + 1,
                    ..self.periods[p]
                })
                .collect(),
            test_cases: rows.iter().map(|&r| self.test_cases[r].clone()).collect(),
            failures: self.failures.select(&rows, &cols),
            run_seconds: self.run_seconds.select(&rows, &cols),
            original_finish: self.original_finish.select(&rows, &cols),
            precedence: cols
                .iter()
                .map(|&p| {
                    self.precedence[p]
                        .iter()
                        .filter(|(a, b)| keep.contains(a) && keep.contains(b))
                        .copied()
                        .collect()
                })
                .collect(),
            priority_sets: cols
                .iter()
                .map(|&p| PrioritySets {
                    b: filter(&self.priority_sets[p].b),
                    gamma: filter(&self.priority_sets[p].gamma),
                })
                .collect(),
            priority_factors: self.priority_factors,
        })
    }
}
