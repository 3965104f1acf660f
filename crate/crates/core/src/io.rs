//! Instance documents (JSON), data matrices as CSV, and selection plans.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::LoadError;
use crate::grid::Grid;
use crate::model::{
    ConditionClass, Instance, PeriodSpec, PriorityFactors, PrioritySets, Seconds, Temperature,
    TestCase, TestCaseId, Voltage,
};
use crate::validate::validate;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    periods: Vec<PeriodDoc>,
    test_cases: Vec<TestCaseDoc>,
    failures: MatrixDoc,
    run_seconds: MatrixDoc,
    original_finish_s: MatrixDoc,
    #[serde(default)]
    precedence: Vec<PrecedenceDoc>,
    #[serde(default)]
    priority_sets: BTreeMap<String, PrioritySetDoc>,
    priority_factors: PriorityFactors,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PeriodDoc {
    index: u32,
    temperature: Temperature,
    voltage: Voltage,
    time_limit_s: Seconds,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    start_s: Option<Seconds>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TestCaseDoc {
    id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

/// Inline `[test_case][period]` rows, or a path to a CSV table.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum MatrixDoc {
    Inline(Vec<Vec<i64>>),
    Csv(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PrecedenceDoc {
    period: PeriodKey,
    before: u32,
    after: u32,
}

#[derive(Serialize, Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(untagged)]
enum PeriodKey {
    Index(u32),
    All(AllPeriods),
}

#[derive(Serialize, Deserialize, Clone, Copy, PartialEq, Eq)]
enum AllPeriods {
    #[serde(rename = "all")]
    All,
}

#[derive(Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct PrioritySetDoc {
    #[serde(rename = "B", default)]
    b: Vec<u32>,
    #[serde(rename = "Gamma", default)]
    gamma: Vec<u32>,
    /// Accepted for compatibility; the remainder tier is always derived.
    #[serde(rename = "Delta", default, skip_serializing)]
    delta: Option<serde_json::Value>,
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> LoadError {
    LoadError::Schema {
        path: path.into(),
        message: message.into(),
    }
}

/// Parses and validates an instance document. CSV matrix paths resolve
/// against the current directory.
pub fn load_instance(text: &str) -> Result<Instance, LoadError> {
    load_instance_in(text, None)
}

/// Reads an instance document from disk; CSV matrix paths resolve against
/// the document's directory.
pub fn load_instance_file(path: &Path) -> Result<Instance, LoadError> {
    let text = read(path)?;
    load_instance_in(&text, path.parent())
}

fn read(path: &Path) -> Result<String, LoadError> {
    std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_instance_in(text: &str, base: Option<&Path>) -> Result<Instance, LoadError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: InstanceDoc = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        schema(path, e.into_inner().to_string())
    })?;
    let inst = build(doc, base)?;
    let diags = validate(&inst);
    if diags.is_empty() {
        Ok(inst)
    } else {
        Err(LoadError::Invalid(diags))
    }
}

fn build(doc: InstanceDoc, base: Option<&Path>) -> Result<Instance, LoadError> {
    let mut start = 0;
    let mut periods = Vec::with_capacity(doc.periods.len());
    for p in &doc.periods {
        let s = p.start_s.unwrap_or(start);
        periods.push(PeriodSpec {
            index: p.index,
            condition: ConditionClass::new(p.temperature, p.voltage),
            time_limit: p.time_limit_s,
            start: s,
        });
        start = s + p.time_limit_s;
    }
    let test_cases: Vec<TestCase> = doc
        .test_cases
        .into_iter()
        .map(|c| TestCase {
            id: TestCaseId(c.id),
            name: c.name,
        })
        .collect();
    let ids: Vec<TestCaseId> = test_cases.iter().map(|c| c.id).collect();
    let indices: Vec<u32> = periods.iter().map(|p: &PeriodSpec| p.index).collect();

    let matrix = |name: &str, m: MatrixDoc| -> Result<Grid<i64>, LoadError> {
        match m {
            MatrixDoc::Inline(rows) => {
                let (n, cols) = (rows.len(), rows.first().map_or(0, Vec::len));
                if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
                    return Err(schema(
                        format!("{name}[{bad}]"),
                        format!("row has {} cells, expected {cols}", rows[bad].len()),
                    ));
                }
                if n != ids.len() || cols != indices.len() {
                    return Err(schema(
                        name,
                        format!(
                            "expected {}x{} cells (test cases x periods), found {n}x{cols}",
                            ids.len(),
                            indices.len()
                        ),
                    ));
                }
                Ok(Grid::from_rows(rows).expect("checked rectangular"))
            }
            MatrixDoc::Csv(file) => {
                let path = base.map_or_else(|| PathBuf::from(&file), |b| b.join(&file));
                let table = read_matrix_csv(&read(&path)?).map_err(|e| match e {
                    LoadError::Schema { path: p, message } => {
                        schema(format!("{name} ({file}) {p}"), message)
                    }
                    other => other,
                })?;
                if table.cases != ids || table.periods != indices {
                    return Err(schema(
                        name,
                        format!("{file}: row ids or period headers do not match the document"),
                    ));
                }
                Ok(table.values)
            }
        }
    };
    let failures = matrix("failures", doc.failures)?;
    let run_seconds = matrix("run_seconds", doc.run_seconds)?;
    let original_finish = matrix("original_finish_s", doc.original_finish_s)?;

    let period_pos = |key: u32, path: String| -> Result<usize, LoadError> {
        indices
            .iter()
            .position(|&j| j == key)
            .ok_or_else(|| schema(path, format!("unknown period {key}")))
    };

    let mut precedence = vec![BTreeSet::new(); periods.len()];
    for (n, entry) in doc.precedence.iter().enumerate() {
        let pair = (TestCaseId(entry.before), TestCaseId(entry.after));
        match entry.period {
            PeriodKey::All(_) => precedence.iter_mut().for_each(|set| {
                set.insert(pair);
            }),
            PeriodKey::Index(j) => {
                let p = period_pos(j, format!("precedence[{n}].period"))?;
                precedence[p].insert(pair);
            }
        }
    }

    let to_set = |v: &[u32]| v.iter().map(|&i| TestCaseId(i)).collect::<BTreeSet<_>>();
    let mut priority_sets = vec![PrioritySets::default(); periods.len()];
    if let Some(all) = doc.priority_sets.get("all") {
        for sets in &mut priority_sets {
            sets.b = to_set(&all.b);
            sets.gamma = to_set(&all.gamma);
        }
    }
    for (key, entry) in &doc.priority_sets {
        if entry.delta.is_some() {
            log::warn!(
                "priority_sets.{key}.Delta is ignored; the remainder tier is always derived \
                 as the period's cases minus effective, B and Gamma cases"
            );
        }
        if key == "all" {
            continue;
        }
        let path = format!("priority_sets.{key}");
        let j: u32 = key
            .parse()
            .map_err(|_| schema(path.clone(), "key must be \"all\" or a period index"))?;
        let p = period_pos(j, path)?;
        priority_sets[p] = PrioritySets {
            b: to_set(&entry.b),
            gamma: to_set(&entry.gamma),
        };
    }

    Ok(Instance {
        periods,
        test_cases,
        failures,
        run_seconds,
        original_finish,
        precedence,
        priority_sets,
        priority_factors: doc.priority_factors,
    })
}

/// Writes `inst` as a JSON instance document. Pairs and priority sets shared
/// by every period are written once under `"all"`.
pub fn instance_to_json(inst: &Instance) -> String {
    let common: BTreeSet<(TestCaseId, TestCaseId)> = match inst.precedence.split_first() {
        Some((first, rest)) => first
            .iter()
            .filter(|pair| rest.iter().all(|s| s.contains(pair)))
            .copied()
            .collect(),
        None => BTreeSet::new(),
    };
    let mut precedence: Vec<PrecedenceDoc> = common
        .iter()
        .map(|&(a, b)| PrecedenceDoc {
            period: PeriodKey::All(AllPeriods::All),
            before: a.0,
            after: b.0,
        })
        .collect();
    for (p, pairs) in inst.precedence.iter().enumerate() {
        for &(a, b) in pairs.difference(&common) {
            precedence.push(PrecedenceDoc {
                period: PeriodKey::Index(inst.periods[p].index),
                before: a.0,
                after: b.0,
            });
        }
    }

    let set_doc = |s: &PrioritySets| PrioritySetDoc {
        b: s.b.iter().map(|i| i.0).collect(),
        gamma: s.gamma.iter().map(|i| i.0).collect(),
        delta: None,
    };
    let mut priority_sets = BTreeMap::new();
    match inst.priority_sets.split_first() {
        Some((first, rest)) if rest.iter().all(|s| s == first) => {
            priority_sets.insert("all".to_string(), set_doc(first));
        }
        _ => {
            for (p, s) in inst.priority_sets.iter().enumerate() {
                priority_sets.insert(inst.periods[p].index.to_string(), set_doc(s));
            }
        }
    }

    let doc = InstanceDoc {
        periods: inst
            .periods
            .iter()
            .map(|p| PeriodDoc {
                index: p.index,
                temperature: p.condition.temperature,
                voltage: p.condition.voltage,
                time_limit_s: p.time_limit,
                start_s: Some(p.start),
            })
            .collect(),
        test_cases: inst
            .test_cases
            .iter()
            .map(|c| TestCaseDoc {
                id: c.id.0,
                name: c.name.clone(),
            })
            .collect(),
        failures: MatrixDoc::Inline(inst.failures.to_rows()),
        run_seconds: MatrixDoc::Inline(inst.run_seconds.to_rows()),
        original_finish_s: MatrixDoc::Inline(inst.original_finish.to_rows()),
        precedence,
        priority_sets,
        priority_factors: inst.priority_factors,
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("instance serializes");
    out.push('\n');
    out
}

/// A CSV data table: header row of periods, first column of test case ids.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixTable {
    pub cases: Vec<TestCaseId>,
    pub periods: Vec<u32>,
    pub values: Grid<i64>,
}

fn parse_label(cell: &str, prefix: &str) -> Option<u32> {
    let cell = cell.trim();
    let stripped = cell
        .get(..prefix.len())
        .filter(|p| p.eq_ignore_ascii_case(prefix))
        .map_or(cell, |_| &cell[prefix.len()..]);
    stripped.trim().parse().ok()
}

/// Parses a table such as `Test Case,Period1,...` / `TC1,20,...`.
pub fn read_matrix_csv(text: &str) -> Result<MatrixTable, LoadError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let header = match records.next() {
        Some(r) => r.map_err(|e| schema("header", e.to_string()))?,
        None => return Err(schema("header", "empty table")),
    };
    let periods = header
        .iter()
        .skip(1)
        .enumerate()
        .map(|(c, cell)| {
            parse_label(cell, "Period").ok_or_else(|| {
                schema(
                    format!("header[{}]", c + 1),
                    format!("bad period label {cell:?}"),
                )
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut cases = Vec::new();
    let mut rows = Vec::new();
    for (n, record) in records.enumerate() {
        let record = record.map_err(|e| schema(format!("row {}", n + 1), e.to_string()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let label = &record[0];
        let id = parse_label(label, "TC").ok_or_else(|| {
            schema(
                format!("row {}", n + 1),
                format!("bad test case label {label:?}"),
            )
        })?;
        if record.len() != periods.len() + 1 {
            return Err(schema(
                format!("row {} ({label})", n + 1),
                format!(
                    "expected {} values, found {}",
                    periods.len(),
                    record.len() - 1
                ),
            ));
        }
        let values = record
            .iter()
            .skip(1)
            .enumerate()
            .map(|(c, v)| {
                v.parse::<i64>().map_err(|_| {
                    schema(
                        format!("row {} ({label}), column {}", n + 1, c + 1),
                        format!("not an integer: {v:?}"),
                    )
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        cases.push(TestCaseId(id));
        rows.push(values);
    }
    let values = if rows.is_empty() {
        Grid::filled(0, periods.len(), 0)
    } else {
        Grid::from_rows(rows).expect("row widths checked")
    };
    Ok(MatrixTable {
        cases,
        periods,
        values,
    })
}

pub fn write_matrix_csv(cases: &[TestCaseId], periods: &[u32], values: &Grid<i64>) -> String {
    let mut w = csv_writer();
    let mut header = vec!["Test Case".to_string()];
    header.extend(periods.iter().map(|j| format!("Period{j}")));
    w.write_record(&header).expect("in-memory write");
    for (i, id) in cases.iter().enumerate() {
        let mut row = vec![id.to_string()];
        row.extend(values.row(i).iter().map(ToString::to_string));
        w.write_record(&row).expect("in-memory write");
    }
    finish(w)
}

pub(crate) fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .flexible(true)
        .from_writer(Vec::new())
}

pub(crate) fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

/// Reads selection counts from a plan file: either the JSON form written by
/// the selection report or the CSV table form (`Total time` and `Objective`
/// rows are ignored).
pub fn read_plan(text: &str, inst: &Instance) -> Result<Grid<u32>, LoadError> {
    let rows: Vec<Vec<i64>> = if text.trim_start().starts_with('{') {
        #[derive(Deserialize)]
        struct PlanDoc {
            counts: Vec<Vec<i64>>,
        }
        let de = &mut serde_json::Deserializer::from_str(text);
        let doc: PlanDoc = serde_path_to_error::deserialize(de)
            .map_err(|e| schema(e.path().to_string(), e.into_inner().to_string()))?;
        doc.counts
    } else {
        let body: String = text
            .lines()
            .filter(|l| {
                let first = l.split(',').next().unwrap_or("").trim();
                !first.eq_ignore_ascii_case("Total time")
                    && !first.eq_ignore_ascii_case("Objective")
            })
            .map(|l| format!("{l}\n"))
            .collect();
        let table = read_matrix_csv(&body)?;
        let ids: Vec<TestCaseId> = inst.case_ids().collect();
        if table.cases != ids {
            return Err(schema("plan", "test case rows do not match the instance"));
        }
        table.values.to_rows()
    };
    let grid = Grid::from_rows(rows).ok_or_else(|| schema("counts", "ragged rows"))?;
    if grid.shape() != (inst.num_cases(), inst.num_periods()) {
        return Err(schema(
            "counts",
            format!(
                "expected {}x{} counts, found {}x{}",
                inst.num_cases(),
                inst.num_periods(),
                grid.rows(),
                grid.cols()
            ),
        ));
    }
    for i in 0..grid.rows() {
        for p in 0..grid.cols() {
            if grid.get(i, p) < 0 {
                return Err(schema(
                    format!("counts[{i}][{p}]"),
                    "counts must be nonnegative",
                ));
            }
        }
    }
    Ok(grid.map(|v| v as u32))
}
