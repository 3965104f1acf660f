//! The router-motherboard case study: two cycles of four periods, ten test
//! cases, and the published selection/sequencing results.

use std::collections::BTreeSet;

use crate::grid::Grid;
use crate::model::{
    ConditionClass, Instance, PeriodSpec, PriorityFactors, PrioritySets, Seconds, TestCase,
    TestCaseId,
};

pub const PERIOD_LIMIT: Seconds = 1080;

const FAILURES: [[i64; 8]; 10] = [
    [20, 20, 15, 14, 5, 3, 1, 2],
    [0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, 2, 0, 1, 0],
    [0, 0, 0, 0, 0, 0, 0, 0],
    [1, 0, 0, 0, 1, 0, 0, 0],
    [1, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0],
    [1, 0, 0, 0, 0, 0, 0, 1],
    [0, 0, 0, 0, 0, 0, 0, 0],
    [2, 0, 1, 0, 2, 0, 0, 1],
];

const RUN_SECONDS: [[i64; 8]; 10] = [
    [200, 190, 200, 190, 200, 190, 200, 190],
    [25, 20, 25, 20, 25, 20, 25, 20],
    [100, 150, 200, 210, 100, 150, 200, 210],
    [55, 65, 65, 65, 65, 65, 55, 65],
    [70, 70, 60, 70, 70, 70, 70, 60],
    [150, 140, 150, 150, 145, 140, 170, 150],
    [125, 120, 120, 110, 115, 120, 115, 110],
    [10, 10, 10, 10, 10, 10, 10, 10],
    [60, 40, 45, 50, 60, 40, 45, 50],
    [400, 350, 300, 320, 400, 350, 300, 300],
];

const ORIGINAL_FINISH: [[i64; 8]; 10] = [
    [200, 1390, 2600, 3790, 5000, 6190, 7400, 8590],
    [225, 1410, 2625, 3810, 5025, 6210, 7425, 8610],
    [325, 1560, 2825, 4020, 5125, 6360, 7625, 8820],
    [380, 1625, 2890, 4085, 5190, 6425, 7680, 8885],
    [450, 1695, 2950, 4155, 5260, 6495, 7750, 8945],
    [600, 1835, 3100, 4305, 5405, 6635, 7920, 9095],
    [725, 1955, 3220, 4415, 5520, 6755, 8035, 9205],
    [735, 1965, 3230, 4425, 5530, 6765, 8045, 9215],
    [795, 2005, 3275, 4475, 5590, 6805, 8090, 9265],
    [1195, 2355, 3575, 4795, 5990, 7155, 8390, 9565],
];

const PUBLISHED_SELECTION: [[u32; 8]; 10] = [
    [2, 2, 2, 2, 1, 2, 1, 2],
    [1, 1, 1, 1, 0, 1, 1, 1],
    [0, 1, 1, 1, 1, 0, 2, 0],
    [0, 1, 1, 1, 1, 1, 1, 0],
    [1, 1, 1, 1, 2, 1, 0, 1],
    [1, 1, 0, 1, 0, 0, 1, 0],
    [0, 1, 0, 1, 1, 1, 1, 0],
    [2, 1, 1, 1, 0, 1, 1, 2],
    [0, 0, 0, 1, 1, 1, 1, 0],
    [1, 0, 1, 0, 1, 1, 0, 2],
];

/// Published per-period totals of the selection.
pub const PUBLISHED_TOTALS: [Seconds; 8] = [1065, 955, 1060, 1065, 1080, 1055, 1020, 1080];

/// Published effectiveness of the optimized sequences (percent).
pub const PUBLISHED_OPTIMIZED: [f64; 8] = [
    1.3897, 12.5654, 21.9478, 33.8028, 38.7963, 56.8720, 41.4216, 73.8426,
];

/// Published effectiveness of the unoptimized sequences (percent).
pub const PUBLISHED_BASELINE: [f64; 8] = [
    5.9415, 54.9020, 95.5198, 144.0000, 162.0297, 242.7746, 307.3171, 458.6207,
];

pub const PUBLISHED_GAP: [f64; 8] = [
    76.6108, 77.1129, 77.0227, 76.5258, 76.0561, 76.5741, 86.5216, 83.8990,
];

/// Published sequences as `(case, is_repeat)` per period.
const PUBLISHED_ORDERS: [&[&str]; 8] = [
    &["TC1", "TC1-", "TC5", "TC6", "TC8-", "TC2", "TC8", "TC10"],
    &[
        "TC1", "TC1-", "TC6", "TC3", "TC4", "TC5", "TC8", "TC2", "TC7",
    ],
    &["TC1", "TC1-", "TC4", "TC3", "TC5", "TC8", "TC2", "TC10"],
    &[
        "TC1", "TC4", "TC3", "TC7", "TC8", "TC6", "TC9", "TC1-", "TC5", "TC2",
    ],
    &["TC1", "TC7", "TC9", "TC5-", "TC4", "TC5", "TC3", "TC10"],
    &[
        "TC1", "TC7", "TC4", "TC10", "TC1-", "TC9", "TC5", "TC8", "TC2",
    ],
    &[
        "TC1", "TC2", "TC7", "TC4", "TC9", "TC3-", "TC6", "TC3", "TC8",
    ],
    &["TC1", "TC2", "TC10-", "TC8-", "TC5", "TC1-", "TC10", "TC8"],
];

/// The embedded case-study instance.
pub fn paper_instance() -> Instance {
    let conditions = [
        ConditionClass::LTLV,
        ConditionClass::HTLV,
        ConditionClass::LTHV,
        ConditionClass::HTHV,
    ];
    let periods = (0..8)
        .map(|p| PeriodSpec {
            index: p as u32 + 1,
            condition: conditions[p % 4],
            time_limit: PERIOD_LIMIT,
            start: PERIOD_LIMIT * p as Seconds,
        })
        .collect();
    let test_cases = (1..=10)
        .map(|i| TestCase {
            id: TestCaseId(i),
            name: None,
        })
        .collect();

    let mut pairs = BTreeSet::new();
    pairs.insert((TestCaseId(3), TestCaseId(8)));
    for k in 2..=10 {
        pairs.insert((TestCaseId(1), TestCaseId(k)));
    }
    let sets = PrioritySets {
        b: [TestCaseId(8)].into(),
        gamma: [TestCaseId(9), TestCaseId(10)].into(),
    };

    Instance {
        periods,
        test_cases,
        failures: grid(&FAILURES),
        run_seconds: grid(&RUN_SECONDS),
        original_finish: grid(&ORIGINAL_FINISH),
        precedence: vec![pairs; 8],
        priority_sets: vec![sets; 8],
        priority_factors: PriorityFactors {
            p1: 4.0,
            p2: 3.0,
            p3: 2.0,
            p4: 1.0,
        },
    }
}

/// The published selection counts (cases x periods).
pub fn published_selection() -> Grid<u32> {
    grid(&PUBLISHED_SELECTION)
}

/// The published order of period `j` (1-based) as `(case, is_repeat)` runs.
pub fn published_order(j: u32) -> Option<Vec<(TestCaseId, bool)>> {
    let labels = PUBLISHED_ORDERS.get((j as usize).checked_sub(1)?)?;
    Some(
        labels
            .iter()
            .map(|l| {
                let repeat = l.ends_with('-');
                let id = l.trim_start_matches("TC").trim_end_matches('-');
                (TestCaseId(id.parse().expect("fixture label")), repeat)
            })
            .collect(),
    )
}

fn grid<T: Copy, const C: usize>(rows: &[[T; C]]) -> Grid<T> {
    Grid::from_rows(rows.iter().map(|r| r.to_vec()).collect()).expect("rectangular fixture")
}
