//! Text, CSV and JSON renderings of plans, schedules and reports.
//!
//! Printed numbers use four decimals, rounded half away from zero; JSON keeps
//! full precision.

use serde_json::{json, Value};

use crate::io::{csv_writer, finish};
use crate::model::Instance;
use crate::selection::{check_selection, SelectionPlan};
use crate::sequencing::{MilpReport, Schedule};

use super::{EffectivenessReport, Gap};

pub fn fmt4(value: f64) -> String {
    let rounded = (value * 1e4).round() / 1e4;
    format!("{rounded:.4}")
}

fn fmt_gap(gap: Gap) -> String {
    gap.value().map_or_else(|| "undefined".to_string(), fmt4)
}

fn to_csv(rows: &[Vec<String>]) -> String {
    let mut w = csv_writer();
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    finish(w)
}

/// Left-aligned first column, right-aligned others.
fn to_text(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(String::len)
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, cell)| {
                if c == 0 {
                    format!("{cell:<w$}", w = widths[c])
                } else {
                    format!("{cell:>w$}", w = widths[c])
                }
            })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn period_header(inst: &Instance, first: &str) -> Vec<String> {
    let mut header = vec![first.to_string()];
    header.extend(inst.periods.iter().map(|p| format!("Period{}", p.index)));
    header
}

fn selection_rows(inst: &Instance, plan: &SelectionPlan) -> Vec<Vec<String>> {
    let mut rows = vec![period_header(inst, "Test Case")];
    for (i, case) in inst.test_cases.iter().enumerate() {
        let mut row = vec![case.id.to_string()];
        row.extend(plan.counts.row(i).iter().map(ToString::to_string));
        rows.push(row);
    }
    let mut totals = vec!["Total time".to_string()];
    totals.extend(plan.period_totals.iter().map(ToString::to_string));
    rows.push(totals);
    rows.push(vec!["Objective".to_string(), fmt4(plan.objective)]);
    rows
}

pub fn selection_csv(inst: &Instance, plan: &SelectionPlan) -> String {
    to_csv(&selection_rows(inst, plan))
}

pub fn selection_text(inst: &Instance, plan: &SelectionPlan) -> String {
    to_text(&selection_rows(inst, plan))
}

pub fn selection_json(inst: &Instance, plan: &SelectionPlan) -> Value {
    let report = check_selection(inst, &plan.counts).ok();
    json!({
        "test_cases": inst.case_ids().map(|c| c.0).collect::<Vec<_>>(),
        "periods": inst.periods.iter().map(|p| p.index).collect::<Vec<_>>(),
        "counts": plan.counts.to_rows(),
        "period_totals_s": plan.period_totals,
        "objective": plan.objective,
        "feasible": report.as_ref().map(|r| r.is_feasible()),
        "violations": report.map(|r| r.violations),
    })
}

fn schedule_rows(schedule: &Schedule) -> Vec<Vec<String>> {
    let mut rows = vec![vec![
        "order".to_string(),
        "job".to_string(),
        "completion_s".to_string(),
    ]];
    for (n, (label, t)) in schedule.labels.iter().zip(&schedule.completion).enumerate() {
        rows.push(vec![(n + 1).to_string(), label.clone(), t.to_string()]);
    }
    rows.push(vec!["ObjVal".to_string(), fmt4(schedule.effectiveness)]);
    rows
}

pub fn schedule_csv(schedule: &Schedule) -> String {
    to_csv(&schedule_rows(schedule))
}

pub fn schedule_text(schedule: &Schedule) -> String {
    let mut out = format!("Period {}\n", schedule.period);
    out.push_str(&to_text(&schedule_rows(schedule)));
    if schedule.zero_weight {
        out.push_str("note: no weighted job, effectiveness defined as 0\n");
    }
    out
}

pub fn schedule_json(schedule: &Schedule) -> Value {
    serde_json::to_value(schedule).expect("schedule serializes")
}

pub fn milp_text(report: &MilpReport) -> String {
    if report.is_satisfied() {
        return format!(
            "ordering model: all constraints satisfied (M = {})\n",
            report.big_m
        );
    }
    let mut out = format!(
        "ordering model: {} violated constraints (M = {})\n",
        report.violations.len(),
        report.big_m
    );
    for v in &report.violations {
        out.push_str(&format!("  {}: {}\n", v.constraint, v.detail));
    }
    out
}

fn sequencing_rows(report: &EffectivenessReport) -> Vec<Vec<String>> {
    let mut rows = vec![period_header(&report.instance, "order")];
    let longest = report
        .periods
        .iter()
        .map(|r| r.optimized.labels.len())
        .max()
        .unwrap_or(0);
    for n in 0..longest {
        let mut row = vec![(n + 1).to_string()];
        row.extend(report.periods.iter().map(|r| {
            r.optimized
                .labels
                .get(n)
                .cloned()
                .unwrap_or_else(|| "--".to_string())
        }));
        rows.push(row);
    }
    let mut obj = vec!["ObjVal".to_string()];
    obj.extend(
        report
            .periods
            .iter()
            .map(|r| fmt4(r.optimized.effectiveness)),
    );
    rows.push(obj);
    rows
}

fn comparison_rows(report: &EffectivenessReport) -> Vec<Vec<String>> {
    let mut rows = vec![period_header(&report.instance, "ObjVal (%)")];
    let line = |name: &str, f: &dyn Fn(&super::PeriodReport) -> String| {
        let mut row = vec![name.to_string()];
        row.extend(report.periods.iter().map(f));
        row
    };
    rows.push(line("without optimization", &|r| {
        fmt4(r.baseline.effectiveness)
    }));
    rows.push(line("with optimization", &|r| {
        fmt4(r.optimized.effectiveness)
    }));
    rows.push(line("Gap (%)", &|r| fmt_gap(r.gap)));
    if report.periods.iter().all(|r| r.published.is_some()) && !report.periods.is_empty() {
        let published = |r: &super::PeriodReport| r.published.expect("checked");
        rows.push(line("published without optimization", &|r| {
            fmt4(published(r).baseline)
        }));
        rows.push(line("published with optimization", &|r| {
            fmt4(published(r).optimized)
        }));
        rows.push(line("published Gap (%)", &|r| fmt4(published(r).gap)));
    }
    rows
}

pub fn selection_table_csv(report: &EffectivenessReport) -> String {
    selection_csv(&report.instance, &report.plan)
}

pub fn sequencing_table_csv(report: &EffectivenessReport) -> String {
    to_csv(&sequencing_rows(report))
}

pub fn comparison_table_csv(report: &EffectivenessReport) -> String {
    to_csv(&comparison_rows(report))
}

pub fn sequencing_table_text(report: &EffectivenessReport) -> String {
    to_text(&sequencing_rows(report))
}

pub fn comparison_table_text(report: &EffectivenessReport) -> String {
    to_text(&comparison_rows(report))
}

/// The three tables as CSV, separated by blank lines.
pub fn report_csv(report: &EffectivenessReport) -> String {
    [
        selection_table_csv(report),
        sequencing_table_csv(report),
        comparison_table_csv(report),
    ]
    .join("\n")
}

pub fn report_text(report: &EffectivenessReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "Selection ({})\n",
        serde_json::to_value(report.plan_source)
            .expect("enum")
            .as_str()
            .unwrap_or("")
    ));
    out.push_str(&selection_text(&report.instance, &report.plan));
    if let Some(opt) = report.optimum_objective {
        out.push_str(&format!("Optimal objective  {}\n", fmt4(opt)));
    }
    out.push_str(&format!("Time saved  {} s\n\n", report.time_saved));
    out.push_str("Sequencing\n");
    out.push_str(&sequencing_table_text(report));
    out.push_str("\nComparison\n");
    out.push_str(&comparison_table_text(report));
    if !report.notes.is_empty() {
        out.push_str("\nNotes\n");
        for note in &report.notes {
            out.push_str(&format!("- {note}\n"));
        }
    }
    out
}

pub fn report_json(report: &EffectivenessReport) -> Value {
    let mut selection = selection_json(&report.instance, &report.plan);
    selection["source"] = serde_json::to_value(report.plan_source).expect("enum");
    selection["optimum_objective"] = json!(report.optimum_objective);
    json!({
        "selection": selection,
        "periods": report.periods,
        "time_saved_s": report.time_saved,
        "notes": report.notes,
    })
}
