//! Acceptance suite: one pass/fail line per criterion, non-zero exit status
//! when any criterion fails.

mod support;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use altplan_core::evaluation::render::fmt4;
use altplan_core::selection::DEFAULT_ENUMERATION_GUARD;
use altplan_core::sequencing::DEFAULT_PERMUTATION_GUARD;
use altplan_core::{
    baseline_sequence, brute_force_selection, brute_force_sequencing, check_milp_constraints,
    check_selection, expand_jobs, gap, instance_to_json, load_instance, paper_instance,
    published_selection, run_pipeline_with_plan, selection_objective, solve_selection,
    solve_sequencing, Instance, JobList, PlanSource, SelectionPlan, TestCaseId,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use support::{box_points, random_instance, random_job_list, rescale_times};

const SEED: u64 = 0x5eed_a17e;

/// Printed effectiveness values are compared after rounding to this many
/// decimals.
const DECIMALS: i32 = 4;
/// Half a unit in the last printed decimal.
const HALF_ULP: f64 = 5e-5;

const PERIOD_LIMIT: i64 = 1080;

const BUDGET_FIXTURE: Duration = Duration::from_secs(1);
const BUDGET_SELECTION: Duration = Duration::from_secs(5);
const BUDGET_SEQUENCING: Duration = Duration::from_secs(10);
const BUDGET_ORACLES: Duration = Duration::from_secs(60);
const BUDGET_MILP: Duration = Duration::from_secs(60);
const BUDGET_DOMINANCE: Duration = Duration::from_secs(10);
const BUDGET_PROPERTIES: Duration = Duration::from_secs(60);

const RANDOM_JOB_LISTS: usize = 200;
const MAX_RANDOM_JOBS: usize = 8;
const RANDOM_SELECTIONS: usize = 50;
/// Cells per random selection sub-instance; 2^20 points stays well inside
/// the enumeration guard.
const MAX_SELECTION_CELLS: usize = 20;
const PROPERTY_TRIALS: usize = 1000;

const FAILURES_TABLE: &str = "\
TC1	20	20	15	14	5	3	1	2
TC2	0	0	0	0	0	0	0	0
TC3	0	0	1	0	2	0	1	0
TC4	0	0	0	0	0	0	0	0
TC5	1	0	0	0	1	0	0	0
TC6	1	0	0	0	0	0	0	0
TC7	0	0	0	0	0	0	0	0
TC8	1	0	0	0	0	0	0	1
TC9	0	0	0	0	0	0	0	0
TC10	2	0	1	0	2	0	0	1";

const RUN_TABLE: &str = "\
TC1	200	190	200	190	200	190	200	190
TC2	25	20	25	20	25	20	25	20
TC3	100	150	200	210	100	150	200	210
TC4	55	65	65	65	65	65	55	65
TC5	70	70	60	70	70	70	70	60
TC6	150	140	150	150	145	140	170	150
TC7	125	120	120	110	115	120	115	110
TC8	10	10	10	10	10	10	10	10
TC9	60	40	45	50	60	40	45	50
TC10	400	350	300	320	400	350	300	300";

const ORIGINAL_TABLE: &str = "\
TC1	200	1390	2600	3790	5000	6190	7400	8590
TC2	225	1410	2625	3810	5025	6210	7425	8610
TC3	325	1560	2825	4020	5125	6360	7625	8820
TC4	380	1625	2890	4085	5190	6425	7680	8885
TC5	450	1695	2950	4155	5260	6495	7750	8945
TC6	600	1835	3100	4305	5405	6635	7920	9095
TC7	725	1955	3220	4415	5520	6755	8035	9205
TC8	735	1965	3230	4425	5530	6765	8045	9215
TC9	795	2005	3275	4475	5590	6805	8090	9265
TC10	1195	2355	3575	4795	5990	7155	8390	9565";

/// Optimized effectiveness per period; period 7 follows the precedence
/// rules rather than the printed 41.4216.
const GOLDEN_OPTIMIZED: [&str; 8] = [
    "1.3897", "12.5654", "21.9478", "33.8028", "38.7963", "56.8720", "41.9118", "73.8426",
];
const PRINTED_PERIOD_SEVEN: &str = "41.4216";
/// Periods whose only weighted run is forced first may tie with the baseline.
const TIES_PERMITTED: [u32; 1] = [4];
const GAP_INPUT: (f64, f64) = (5.9415, 1.3897);
const GAP_GOLDEN: f64 = 76.6108;

type Verdict = Result<String, String>;
/// Name, time budget and check.
type Criterion = (&'static str, Duration, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("fixture integrity", BUDGET_FIXTURE, fixture_integrity),
        (
            "selection feasibility and totals",
            BUDGET_SELECTION,
            selection_feasibility,
        ),
        (
            "sequencing golden values",
            BUDGET_SEQUENCING,
            sequencing_goldens,
        ),
        ("oracle equivalence", BUDGET_ORACLES, oracle_equivalence),
        ("ordering-model conformance", BUDGET_MILP, milp_conformance),
        ("dominance and gap", BUDGET_DOMINANCE, dominance_and_gap),
        ("property suite", BUDGET_PROPERTIES, property_suite),
    ];
    let mut failed = 0;
    for (n, (name, budget, check)) in criteria.into_iter().enumerate() {
        let started = Instant::now();
        let verdict = check();
        let elapsed = started.elapsed();
        let verdict = match verdict {
            Ok(detail) if elapsed > budget => Err(format!(
                "{detail}; took {:.3} s, budget {} s",
                elapsed.as_secs_f64(),
                budget.as_secs()
            )),
            other => other,
        };
        let (tag, detail) = match &verdict {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        if verdict.is_err() {
            failed += 1;
        }
        println!(
            "{tag} {} {name} ({:.3} s): {detail}",
            n + 1,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 7 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn parse_table(text: &str) -> Vec<(String, Vec<i64>)> {
    text.lines()
        .map(|line| {
            let mut cells = line.split('\t');
            let label = cells.next().expect("label").to_string();
            (
                label,
                cells.map(|c| c.parse().expect("integer cell")).collect(),
            )
        })
        .collect()
}

fn published_plan(inst: &Instance) -> SelectionPlan {
    SelectionPlan::from_counts(inst, published_selection())
        .expect("published plan fits the fixture")
}

fn fixture_jobs(j: u32) -> JobList {
    expand_jobs(&paper_instance(), &published_selection(), j).expect("fixture expands")
}

fn rounded(value: f64) -> f64 {
    let scale = 10f64.powi(DECIMALS);
    (value * scale).round() / scale
}

fn fixture_integrity() -> Verdict {
    let inst = paper_instance();
    ensure(inst.num_cases() == 10 && inst.num_periods() == 8, || {
        "shape is not 10 x 8".into()
    })?;
    let tables = [
        ("failures", &inst.failures, FAILURES_TABLE),
        ("run_seconds", &inst.run_seconds, RUN_TABLE),
        ("original_finish", &inst.original_finish, ORIGINAL_TABLE),
    ];
    for (name, grid, text) in tables {
        for (i, (label, row)) in parse_table(text).into_iter().enumerate() {
            ensure(inst.test_cases[i].id.to_string() == label, || {
                format!("{name}: row {i} is not {label}")
            })?;
            ensure(grid.row(i) == row.as_slice(), || {
                format!("{name}[{label}] = {:?}, expected {row:?}", grid.row(i))
            })?;
        }
    }
    for (p, spec) in inst.periods.iter().enumerate() {
        ensure(spec.time_limit == PERIOD_LIMIT, || {
            format!("period {} limit {}", spec.index, spec.time_limit)
        })?;
        ensure(spec.start == PERIOD_LIMIT * p as i64, || {
            format!("period {} start {}", spec.index, spec.start)
        })?;
    }
    Ok("240 cells match, limits 1080 s, starts 1080(j-1) s".into())
}

fn selection_feasibility() -> Verdict {
    let inst = paper_instance();
    let plan = solve_selection(&inst).map_err(|e| e.to_string())?;
    let report = check_selection(&inst, &plan.counts).map_err(|e| e.to_string())?;
    ensure(report.is_feasible(), || {
        format!("violations: {:?}", report.violations)
    })?;
    ensure(
        plan.period_totals.iter().all(|&t| t <= PERIOD_LIMIT),
        || format!("totals {:?}", plan.period_totals),
    )?;
    let published =
        selection_objective(&inst, &published_selection()).map_err(|e| e.to_string())?;
    // integer failure counts and integer factors: both objectives are exact
    ensure(plan.objective >= published, || {
        format!(
            "objective {} below published plan {published}",
            plan.objective
        )
    })?;
    let relation = if plan.objective == published {
        "equal to"
    } else {
        "above"
    };
    Ok(format!(
        "objective {} {relation} the published plan's {published}; totals {:?}",
        plan.objective, plan.period_totals
    ))
}

fn sequencing_goldens() -> Verdict {
    let mut values = Vec::new();
    for (p, golden) in GOLDEN_OPTIMIZED.iter().enumerate() {
        let s = solve_sequencing(&fixture_jobs(p as u32 + 1)).map_err(|e| e.to_string())?;
        let shown = fmt4(s.effectiveness);
        ensure(shown == *golden, || {
            format!("period {}: {shown}, expected {golden}", p + 1)
        })?;
        values.push(shown);
    }
    let inst = paper_instance();
    let report = run_pipeline_with_plan(&inst, published_plan(&inst), PlanSource::Published)
        .map_err(|e| e.to_string())?;
    ensure(
        report
            .notes
            .iter()
            .any(|n| n.contains("period 7") && n.contains(PRINTED_PERIOD_SEVEN)),
        || "report lacks the period-7 note".into(),
    )?;
    Ok(format!("{}; period-7 note present", values.join(" ")))
}

fn random_job_lists() -> Vec<JobList> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..RANDOM_JOB_LISTS)
        .map(|_| random_job_list(&mut rng, MAX_RANDOM_JOBS))
        .collect()
}

fn random_sub_instances() -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    let fixture = paper_instance();
    let all_cases: Vec<TestCaseId> = fixture.case_ids().collect();
    let mut out = Vec::with_capacity(RANDOM_SELECTIONS);
    while out.len() < RANDOM_SELECTIONS {
        let k = rng.gen_range(2..=5);
        let mut cases: Vec<TestCaseId> = all_cases.choose_multiple(&mut rng, k).copied().collect();
        cases.sort();
        // classes with two periods leave room for choice under coverage
        let mut periods = Vec::new();
        let classes = rng.gen_range(1..=2);
        for &class in [1u32, 2, 3, 4].choose_multiple(&mut rng, classes) {
            periods.push(class);
            if rng.gen_bool(0.75) {
                periods.push(class + 4);
            }
        }
        periods.sort();
        if k * periods.len() > MAX_SELECTION_CELLS {
            continue;
        }
        let mut sub = fixture.restrict(&cases, &periods).expect("ids exist");
        for p in 0..sub.num_periods() {
            let (mut owed, mut optional) = (0, 0);
            for i in 0..sub.num_cases() {
                let run = sub.run_seconds.get(i, p);
                if sub.is_effective(i, p) {
                    owed += run;
                }
                optional += run;
            }
            sub.periods[p].time_limit = owed + rng.gen_range(optional / 2..=optional);
        }
        if box_points(&sub) <= DEFAULT_ENUMERATION_GUARD {
            out.push(sub);
        }
    }
    out
}

fn oracle_equivalence() -> Verdict {
    for j in 1..=8 {
        let jobs = fixture_jobs(j);
        let dp = solve_sequencing(&jobs).map_err(|e| e.to_string())?;
        let bf =
            brute_force_sequencing(&jobs, DEFAULT_PERMUTATION_GUARD).map_err(|e| e.to_string())?;
        ensure(dp.deviation == bf.deviation && dp.order == bf.order, || {
            format!("fixture period {j}: {:?} vs {:?}", dp.labels, bf.labels)
        })?;
    }
    for (n, jobs) in random_job_lists().iter().enumerate() {
        let dp = solve_sequencing(jobs).map_err(|e| e.to_string())?;
        let bf =
            brute_force_sequencing(jobs, DEFAULT_PERMUTATION_GUARD).map_err(|e| e.to_string())?;
        ensure(dp.deviation == bf.deviation && dp.order == bf.order, || {
            format!(
                "random list {n}: deviation {} vs {}",
                dp.deviation, bf.deviation
            )
        })?;
    }
    let (mut solved, mut infeasible) = (0, 0);
    for (n, sub) in random_sub_instances().iter().enumerate() {
        let bb = solve_selection(sub);
        let bf = brute_force_selection(sub, DEFAULT_ENUMERATION_GUARD);
        ensure(bb == bf, || format!("sub-instance {n}: {bb:?} vs {bf:?}"))?;
        if bb.is_ok() {
            solved += 1;
        } else {
            infeasible += 1;
        }
    }
    Ok(format!(
        "8 fixture periods, {RANDOM_JOB_LISTS} random job lists, {RANDOM_SELECTIONS} sub-instances \
         ({solved} solved, {infeasible} infeasible) agree exactly"
    ))
}

fn milp_conformance() -> Verdict {
    let fixture = (1..=8).map(fixture_jobs);
    let mut checked = 0;
    for (n, jobs) in fixture.chain(random_job_lists()).enumerate() {
        let s = solve_sequencing(&jobs).map_err(|e| e.to_string())?;
        let report = check_milp_constraints(&jobs, &s);
        ensure(
            report.big_m == jobs.total_run_seconds() + jobs.start,
            || format!("list {n}: M = {}", report.big_m),
        )?;
        ensure(report.is_satisfied(), || {
            format!("list {n}: {:?}", report.violations)
        })?;
        checked += 1;
    }
    Ok(format!("{checked} schedules, zero violations"))
}

fn dominance_and_gap() -> Verdict {
    let mut problems = Vec::new();
    let mut rows = Vec::new();
    for j in 1..=8 {
        let jobs = fixture_jobs(j);
        let opt = solve_sequencing(&jobs).map_err(|e| e.to_string())?;
        let base = baseline_sequence(&jobs);
        rows.push(format!(
            "{j}: {} <= {}",
            fmt4(opt.effectiveness),
            fmt4(base.effectiveness)
        ));
        if opt.effectiveness > base.effectiveness {
            problems.push(format!("period {j}: optimized above baseline"));
        } else if opt.effectiveness == base.effectiveness && !TIES_PERMITTED.contains(&j) {
            problems.push(format!(
                "period {j}: not strict, baseline equals optimum {}",
                fmt4(opt.effectiveness)
            ));
        }
    }
    let g = gap(GAP_INPUT.0, GAP_INPUT.1)
        .map_err(|e| e.to_string())?
        .value()
        .ok_or("gap undefined")?;
    if (rounded(g) - GAP_GOLDEN).abs() > HALF_ULP {
        problems.push(format!(
            "gap{GAP_INPUT:?} = {}, expected {GAP_GOLDEN}",
            fmt4(g)
        ));
    }
    if problems.is_empty() {
        Ok(format!("{}; gap {}", rows.join(", "), fmt4(g)))
    } else {
        Err(problems.join("; "))
    }
}

fn property_suite() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 2);
    let per_property = PROPERTY_TRIALS / 5;
    let (mut argmax_feasible, mut monotone_feasible) = (0, 0);
    for trial in 0..per_property {
        unit_invariance(&mut rng).map_err(|e| format!("unit invariance, trial {trial}: {e}"))?;
        argmax_feasible += usize::from(
            argmax_invariance(&mut rng)
                .map_err(|e| format!("argmax invariance, trial {trial}: {e}"))?,
        );
        monotone_feasible += usize::from(
            monotone_in_limit(&mut rng)
                .map_err(|e| format!("limit monotonicity, trial {trial}: {e}"))?,
        );
        partition_tiles(&mut rng).map_err(|e| format!("partition tiling, trial {trial}: {e}"))?;
        serialization_round_trip(&mut rng)
            .map_err(|e| format!("round trip, trial {trial}: {e}"))?;
    }
    Ok(format!(
        "{PROPERTY_TRIALS} trials, zero failures ({argmax_feasible}/{per_property} scaling and \
         {monotone_feasible}/{per_property} limit trials feasible)"
    ))
}

fn unit_invariance(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let jobs = random_job_list(rng, MAX_RANDOM_JOBS);
    let factor = rng.gen_range(2..=60);
    let scaled = rescale_times(&jobs, factor);
    let a = solve_sequencing(&jobs).map_err(|e| e.to_string())?;
    let b = solve_sequencing(&scaled).map_err(|e| e.to_string())?;
    ensure(a.order == b.order, || {
        format!("orders differ at factor {factor}")
    })?;
    // P = 100 dev / norm; compare as exact cross products
    ensure(
        i128::from(a.deviation) * i128::from(b.normalizer())
            == i128::from(b.deviation) * i128::from(a.normalizer()),
        || format!("index changed at factor {factor}"),
    )
}

/// Returns whether the instance was feasible.
fn argmax_invariance(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    let inst = random_instance(rng, 5, 4);
    let factor = rng.gen_range(2..=9);
    let mut scaled = inst.clone();
    scaled.failures = inst.failures.map(|w| w * factor);
    let f = factor as f64;
    let p = &mut scaled.priority_factors;
    (p.p1, p.p2, p.p3, p.p4) = (p.p1 * f, p.p2 * f, p.p3 * f, p.p4 * f);
    match (solve_selection(&inst), solve_selection(&scaled)) {
        (Ok(a), Ok(b)) => {
            ensure(a.counts == b.counts, || {
                format!("plans differ at factor {factor}")
            })?;
            ensure(b.objective == a.objective * f, || {
                format!("objective did not scale by {factor}")
            })?;
            Ok(true)
        }
        (Err(a), Err(b)) => ensure(a == b, || format!("{a} vs {b}")).map(|()| false),
        (a, b) => Err(format!(
            "feasibility changed: {:?} vs {:?}",
            a.is_ok(),
            b.is_ok()
        )),
    }
}

/// Returns whether the unrelaxed instance was feasible.
fn monotone_in_limit(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    let inst = random_instance(rng, 5, 4);
    let mut relaxed = inst.clone();
    let p = rng.gen_range(0..inst.num_periods());
    relaxed.periods[p].time_limit += rng.gen_range(1..=200);
    let Ok(base) = solve_selection(&inst) else {
        return Ok(false);
    };
    let more = solve_selection(&relaxed)
        .map_err(|e| format!("relaxing period {} broke feasibility: {e}", p + 1))?;
    ensure(more.objective >= base.objective, || {
        format!(
            "objective fell from {} to {}",
            base.objective, more.objective
        )
    })?;
    Ok(true)
}

fn partition_tiles(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let inst = random_instance(rng, 8, 4);
    let all: BTreeSet<TestCaseId> = inst.case_ids().collect();
    for (p, spec) in inst.periods.iter().enumerate() {
        let part = inst
            .priority_partition(spec.index)
            .map_err(|e| e.to_string())?;
        let sets = [
            &part.effective,
            &part.preferred,
            &part.secondary,
            &part.remainder,
        ];
        let total: usize = sets.iter().map(|s| s.len()).sum();
        let union: BTreeSet<TestCaseId> = sets.iter().flat_map(|s| s.iter().copied()).collect();
        ensure(total == all.len() && union == all, || {
            format!("period {} does not tile", spec.index)
        })?;
        let effective: BTreeSet<TestCaseId> = inst
            .case_ids()
            .enumerate()
            .filter(|&(i, _)| inst.failures.get(i, p) >= 1)
            .map(|(_, id)| id)
            .collect();
        ensure(part.effective == effective, || {
            format!("period {}: effective set", spec.index)
        })?;
        let sets = &inst.priority_sets[p];
        ensure(
            part.preferred.is_subset(&sets.b) && part.secondary.is_subset(&sets.gamma),
            || format!("period {}: tier outside its set", spec.index),
        )?;
    }
    Ok(())
}

fn serialization_round_trip(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let inst = random_instance(rng, 8, 6);
    let text = instance_to_json(&inst);
    let back = load_instance(&text).map_err(|e| e.to_string())?;
    ensure(back == inst, || "instance changed through JSON".into())?;
    ensure(instance_to_json(&back) == text, || "JSON not stable".into())
}
