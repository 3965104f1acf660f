use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::model::{Instance, TestCaseId};

/// One violated instance invariant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub field: String,
    pub period: Option<u32>,
    pub test_case: Option<TestCaseId>,
    pub message: String,
}

impl Diagnostic {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            period: None,
            test_case: None,
            message: message.into(),
        }
    }

    fn period(mut self, j: u32) -> Self {
        self.period = Some(j);
        self
    }

    fn case(mut self, id: TestCaseId) -> Self {
        self.test_case = Some(id);
        self
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.field)?;
        if let Some(j) = self.period {
            write!(f, " [period {j}]")?;
        }
        if let Some(id) = self.test_case {
            write!(f, " [{id}]")?;
        }
        write!(f, ": {}", self.message)
    }
}

/// Checks every instance invariant. An empty result means the instance is valid.
pub fn validate(inst: &Instance) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    check_periods(inst, &mut out);
    check_cases(inst, &mut out);
    if !check_shapes(inst, &mut out) {
        return out;
    }
    check_cells(inst, &mut out);
    check_precedence(inst, &mut out);
    check_priority(inst, &mut out);
    out
}

fn check_periods(inst: &Instance, out: &mut Vec<Diagnostic>) {
    if inst.periods.is_empty() {
        out.push(Diagnostic::new(
            "periods",
            "at least one period is required",
        ));
    }
    let mut prev_start = None;
    for (pos, p) in inst.periods.iter().enumerate() {
        let field = format!("periods[{pos}]");
        if p.index != pos as u32 + 1 {
            out.push(
                Diagnostic::new(
                    format!("{field}.index"),
                    format!("expected index {}", pos + 1),
                )
                .period(p.index),
            );
        }
        if p.time_limit <= 0 {
            out.push(
                Diagnostic::new(
                    format!("{field}.time_limit_s"),
                    format!("time limit must be positive, got {}", p.time_limit),
                )
                .period(p.index),
            );
        }
        if p.start < 0 {
            out.push(
                Diagnostic::new(
                    format!("{field}.start_s"),
                    format!("start time must be nonnegative, got {}", p.start),
                )
                .period(p.index),
            );
        }
        if let Some(prev) = prev_start {
            if p.start <= prev {
                out.push(
                    Diagnostic::new(
                        format!("{field}.start_s"),
                        format!("start times must increase, {} follows {prev}", p.start),
                    )
                    .period(p.index),
                );
            }
        }
        prev_start = Some(p.start);
    }
}

fn check_cases(inst: &Instance, out: &mut Vec<Diagnostic>) {
    if inst.test_cases.is_empty() {
        out.push(Diagnostic::new(
            "test_cases",
            "at least one test case is required",
        ));
    }
    let mut prev: Option<TestCaseId> = None;
    for (pos, case) in inst.test_cases.iter().enumerate() {
        if case.id.0 == 0 {
            out.push(
                Diagnostic::new(format!("test_cases[{pos}].id"), "ids are 1-based").case(case.id),
            );
        }
        if let Some(prev) = prev {
            if case.id <= prev {
                out.push(
                    Diagnostic::new(
                        format!("test_cases[{pos}].id"),
                        format!(
                            "ids must be unique and ascending, {} follows {prev}",
                            case.id
                        ),
                    )
                    .case(case.id),
                );
            }
        }
        prev = Some(case.id);
    }
}

fn check_shapes(inst: &Instance, out: &mut Vec<Diagnostic>) -> bool {
    let expected = (inst.num_cases(), inst.num_periods());
    let before = out.len();
    for (name, shape) in [
        ("failures", inst.failures.shape()),
        ("run_seconds", inst.run_seconds.shape()),
        ("original_finish_s", inst.original_finish.shape()),
    ] {
        if shape != expected {
            out.push(Diagnostic::new(
                name,
                format!(
                    "expected {}x{} cells, found {}x{}",
                    expected.0, expected.1, shape.0, shape.1
                ),
            ));
        }
    }
    if inst.precedence.len() != inst.num_periods() {
        out.push(Diagnostic::new(
            "precedence",
            "one precedence set per period is required",
        ));
    }
    if inst.priority_sets.len() != inst.num_periods() {
        out.push(Diagnostic::new(
            "priority_sets",
            "one priority entry per period is required",
        ));
    }
    out.len() == before
}

fn check_cells(inst: &Instance, out: &mut Vec<Diagnostic>) {
    for (i, case) in inst.test_cases.iter().enumerate() {
        for (p, period) in inst.periods.iter().enumerate() {
            let cell = |name: &str| format!("{name}[{i}][{p}]");
            let w = inst.failures.get(i, p);
            if w < 0 {
                out.push(
                    Diagnostic::new(
                        cell("failures"),
                        format!("failure count must be nonnegative, got {w}"),
                    )
                    .period(period.index)
                    .case(case.id),
                );
            }
            let r = inst.run_seconds.get(i, p);
            if r <= 0 {
                out.push(
                    Diagnostic::new(
                        cell("run_seconds"),
                        format!("run time must be positive, got {r}"),
                    )
                    .period(period.index)
                    .case(case.id),
                );
            }
            let t = inst.original_finish.get(i, p);
            if t < 0 {
                out.push(
                    Diagnostic::new(
                        cell("original_finish_s"),
                        format!("original finish must be nonnegative, got {t}"),
                    )
                    .period(period.index)
                    .case(case.id),
                );
            }
        }
    }
    let f = inst.priority_factors;
    for (name, v) in [("p1", f.p1), ("p2", f.p2), ("p3", f.p3), ("p4", f.p4)] {
        if !(v.is_finite() && v >= 0.0) {
            out.push(Diagnostic::new(
                format!("priority_factors.{name}"),
                format!("priority factor must be a nonnegative number, got {v}"),
            ));
        }
    }
}

fn check_precedence(inst: &Instance, out: &mut Vec<Diagnostic>) {
    let known: BTreeSet<TestCaseId> = inst.case_ids().collect();
    for (p, pairs) in inst.precedence.iter().enumerate() {
        let j = inst.periods[p].index;
        let mut clean = Vec::new();
        for &(a, b) in pairs {
            let mut ok = true;
            for id in [a, b] {
                if !known.contains(&id) {
                    out.push(
                        Diagnostic::new(
                            "precedence",
                            format!("pair ({a}, {b}) names unknown {id}"),
                        )
                        .period(j)
                        .case(id),
                    );
                    ok = false;
                }
            }
            if a == b {
                out.push(
                    Diagnostic::new("precedence", format!("self-precedence ({a}, {a})"))
                        .period(j)
                        .case(a),
                );
                ok = false;
            }
            if ok {
                clean.push((a, b));
            }
        }
        if let Some(cycle) = find_cycle(&clean) {
            let path = cycle
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(" -> ");
            out.push(
                Diagnostic::new("precedence", format!("precedence cycle {path}"))
                    .period(j)
                    .case(cycle[0]),
            );
        }
    }
}

/// Returns one cycle as a closed path (first node repeated at the end).
fn find_cycle(pairs: &[(TestCaseId, TestCaseId)]) -> Option<Vec<TestCaseId>> {
    let mut succ: BTreeMap<TestCaseId, Vec<TestCaseId>> = BTreeMap::new();
    for &(a, b) in pairs {
        succ.entry(a).or_default().push(b);
        succ.entry(b).or_default();
    }
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state: BTreeMap<TestCaseId, u8> = succ.keys().map(|&k| (k, 0)).collect();
    let mut stack = Vec::new();

    fn visit(
        node: TestCaseId,
        succ: &BTreeMap<TestCaseId, Vec<TestCaseId>>,
        state: &mut BTreeMap<TestCaseId, u8>,
        stack: &mut Vec<TestCaseId>,
    ) -> Option<Vec<TestCaseId>> {
        state.insert(node, 1);
        stack.push(node);
        for &next in &succ[&node] {
            match state[&next] {
                1 => {
                    let start = stack.iter().position(|&n| n == next).unwrap();
                    let mut cycle = stack[start..].to_vec();
                    cycle.push(next);
                    return Some(cycle);
                }
                0 => {
                    if let Some(c) = visit(next, succ, state, stack) {
                        return Some(c);
                    }
                }
                _ => {}
            }
        }
        stack.pop();
        state.insert(node, 2);
        None
    }

    let nodes: Vec<TestCaseId> = succ.keys().copied().collect();
    for n in nodes {
        if state[&n] == 0 {
            if let Some(c) = visit(n, &succ, &mut state, &mut stack) {
                return Some(c);
            }
        }
    }
    None
}

fn check_priority(inst: &Instance, out: &mut Vec<Diagnostic>) {
    let known: BTreeSet<TestCaseId> = inst.case_ids().collect();
    for (p, sets) in inst.priority_sets.iter().enumerate() {
        let j = inst.periods[p].index;
        for (name, set) in [("B", &sets.b), ("Gamma", &sets.gamma)] {
            for id in set.difference(&known) {
                out.push(
                    Diagnostic::new(format!("priority_sets.{name}"), format!("unknown {id}"))
                        .period(j)
                        .case(*id),
                );
            }
        }
        for id in sets.b.intersection(&sets.gamma) {
            out.push(
                Diagnostic::new("priority_sets", format!("{id} is in both B and Gamma"))
                    .period(j)
                    .case(*id),
            );
        }
    }
}
