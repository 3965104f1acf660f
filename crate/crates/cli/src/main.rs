mod failure;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use altplan_core::evaluation::render;
use altplan_core::selection::DEFAULT_ENUMERATION_GUARD;
use altplan_core::sequencing::DEFAULT_PERMUTATION_GUARD;
use altplan_core::{
    brute_force_selection, brute_force_sequencing, check_milp_constraints, expand_jobs,
    instance_to_json, load_instance_file, paper_instance, published_selection, read_plan,
    run_pipeline_with_plan, selection_objective, solve_selection, solve_sequencing,
    EffectivenessReport, Instance, LoadError, PlanSource, SelectionPlan,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use failure::Failure;

const GUARD_VAR: &str = "ALTPLAN_GUARD";

#[derive(Parser, Debug)]
#[command(
    name = "altplan",
    version,
    about = "Select and sequence accelerated reliability test cases"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the embedded case-study instance as JSON.
    PaperInstance {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check an instance and list every problem found.
    Validate {
        #[command(flatten)]
        input: Input,
    },
    /// Solve the selection model.
    Select {
        #[command(flatten)]
        input: Input,
        /// Use exhaustive enumeration instead of branch and bound.
        #[arg(long)]
        brute_force: bool,
    },
    /// Order the selected runs of one period.
    Sequence {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        plan: PlanArgs,
        #[arg(long)]
        period: u32,
        /// Verify the order against the linear-ordering constraints.
        #[arg(long)]
        check_milp: bool,
        /// Use exhaustive enumeration instead of the dynamic program.
        #[arg(long)]
        brute_force: bool,
    },
    /// Sequence every period, optionally against the unoptimized order.
    Evaluate {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        plan: PlanArgs,
        #[arg(long)]
        baseline: bool,
    },
    /// Run selection and sequencing and write every table.
    Report {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        plan: PlanArgs,
    },
}

#[derive(Args, Debug)]
struct Input {
    /// Use the embedded case-study instance.
    #[arg(
        long,
        conflicts_with = "instance",
        required_unless_present = "instance"
    )]
    paper: bool,
    /// Instance document (JSON).
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PlanArgs {
    /// Selection plan (CSV table or JSON with a "counts" key).
    #[arg(long, conflicts_with = "solve")]
    plan: Option<PathBuf>,
    /// Solve the selection model even for the case-study instance.
    #[arg(long)]
    solve: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            failure.exit_code()
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::PaperInstance { out } => {
            emit(out.as_deref(), &instance_to_json(&paper_instance()))
        }
        Command::Validate { input } => validate(&input),
        Command::Select { input, brute_force } => select(&input, brute_force),
        Command::Sequence {
            input,
            plan,
            period,
            check_milp,
            brute_force,
        } => sequence(&input, &plan, period, check_milp, brute_force),
        Command::Evaluate {
            input,
            plan,
            baseline,
        } => evaluate(&input, &plan, baseline),
        Command::Report { input, plan } => report(&input, &plan),
    }
}

fn load(input: &Input) -> Result<Instance, Failure> {
    match &input.instance {
        Some(path) => Ok(load_instance_file(path)?),
        None => Ok(paper_instance()),
    }
}

/// The case-study instance defaults to its published plan; any other
/// instance is solved.
fn plan_for(inst: &Instance, args: &PlanArgs) -> Result<(SelectionPlan, PlanSource), Failure> {
    if let Some(path) = &args.plan {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
        let counts = read_plan(&text, inst)?;
        let plan = SelectionPlan::from_counts(inst, counts)
            .map_err(|e| Failure::invalid(e.to_string()))?;
        return Ok((plan, PlanSource::Supplied));
    }
    if !args.solve && *inst == paper_instance() {
        let plan = SelectionPlan::from_counts(inst, published_selection())
            .expect("published plan matches the case-study shape");
        return Ok((plan, PlanSource::Published));
    }
    Ok((solve_selection(inst)?, PlanSource::Solved))
}

fn pipeline(inst: &Instance, args: &PlanArgs) -> Result<EffectivenessReport, Failure> {
    let (plan, source) = plan_for(inst, args)?;
    let optimum = (source == PlanSource::Solved).then_some(plan.objective);
    let mut report = run_pipeline_with_plan(inst, plan, source)?;
    report.optimum_objective = optimum;
    Ok(report)
}

fn guard_override() -> Result<Option<u128>, Failure> {
    match std::env::var(GUARD_VAR) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| {
            Failure::invalid(format!(
                "{GUARD_VAR} must be a nonnegative integer, got {v:?}"
            ))
        }),
        Err(_) => Ok(None),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| Failure::invalid(format!("stdout: {e}")))
        }
    }
}

fn pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json value serializes");
    s.push('\n');
    s
}

fn validate(input: &Input) -> Result<(), Failure> {
    let Some(path) = &input.instance else {
        return emit(input.out.as_deref(), &valid_text(input.format));
    };
    match load_instance_file(path) {
        Ok(_) => emit(input.out.as_deref(), &valid_text(input.format)),
        Err(LoadError::Invalid(diagnostics)) => {
            let text = match input.format {
                Format::Json => pretty(&json!({ "valid": false, "diagnostics": diagnostics })),
                _ => diagnostics.iter().map(|d| format!("{d}\n")).collect(),
            };
            emit(input.out.as_deref(), &text)?;
            Err(Failure::invalid(format!(
                "{} problem(s) found in {}",
                diagnostics.len(),
                path.display()
            )))
        }
        Err(e) => Err(e.into()),
    }
}

fn valid_text(format: Format) -> String {
    match format {
        Format::Json => pretty(&json!({ "valid": true, "diagnostics": [] })),
        _ => "valid\n".to_string(),
    }
}

fn select(input: &Input, brute_force: bool) -> Result<(), Failure> {
    let inst = load(input)?;
    let plan = if brute_force {
        let guard = guard_override()?.unwrap_or(DEFAULT_ENUMERATION_GUARD);
        brute_force_selection(&inst, guard)?
    } else {
        solve_selection(&inst)?
    };
    let published = (inst == paper_instance())
        .then(|| selection_objective(&inst, &published_selection()).expect("shape matches"));
    let text = match input.format {
        Format::Text => {
            let mut s = render::selection_text(&inst, &plan);
            if let Some(obj) = published {
                s.push_str(&format!(
                    "Published plan objective  {}\n",
                    render::fmt4(obj)
                ));
            }
            s
        }
        Format::Csv => render::selection_csv(&inst, &plan),
        Format::Json => {
            let mut v = render::selection_json(&inst, &plan);
            if let Some(obj) = published {
                v["published_objective"] = json!(obj);
            }
            pretty(&v)
        }
    };
    emit(input.out.as_deref(), &text)
}

fn sequence(
    input: &Input,
    plan_args: &PlanArgs,
    period: u32,
    check_milp: bool,
    brute_force: bool,
) -> Result<(), Failure> {
    let inst = load(input)?;
    if inst.period_pos(period).is_err() {
        return Err(Failure::invalid(format!(
            "period {period} is outside 1..={}",
            inst.num_periods()
        )));
    }
    let (plan, _) = plan_for(&inst, plan_args)?;
    let jobs = expand_jobs(&inst, &plan.counts, period)?;
    let schedule = if brute_force {
        let guard = match guard_override()? {
            Some(g) => usize::try_from(g).unwrap_or(usize::MAX),
            None => DEFAULT_PERMUTATION_GUARD,
        };
        brute_force_sequencing(&jobs, guard)?
    } else {
        solve_sequencing(&jobs)?
    };
    let milp = check_milp.then(|| check_milp_constraints(&jobs, &schedule));
    let text = match input.format {
        Format::Text => {
            let mut s = render::schedule_text(&schedule);
            if let Some(report) = &milp {
                s.push_str(&render::milp_text(report));
            }
            s
        }
        Format::Csv => render::schedule_csv(&schedule),
        Format::Json => {
            let mut v = json!({ "schedule": render::schedule_json(&schedule) });
            if let Some(report) = &milp {
                v["milp"] = serde_json::to_value(report).expect("report serializes");
            }
            pretty(&v)
        }
    };
    emit(input.out.as_deref(), &text)
}

fn evaluate(input: &Input, plan_args: &PlanArgs, baseline: bool) -> Result<(), Failure> {
    let inst = load(input)?;
    let report = pipeline(&inst, plan_args)?;
    let text = match (input.format, baseline) {
        (Format::Text, true) => render::comparison_table_text(&report),
        (Format::Text, false) => render::sequencing_table_text(&report),
        (Format::Csv, true) => render::comparison_table_csv(&report),
        (Format::Csv, false) => render::sequencing_table_csv(&report),
        (Format::Json, _) => {
            let periods: Vec<_> = report
                .periods
                .iter()
                .map(|r| {
                    let mut v = json!({ "period": r.period, "optimized": r.optimized });
                    if baseline {
                        v["baseline"] = json!(r.baseline);
                        v["gap"] = json!(r.gap);
                    }
                    v
                })
                .collect();
            pretty(&json!({ "periods": periods }))
        }
    };
    emit(input.out.as_deref(), &text)
}

fn report(input: &Input, plan_args: &PlanArgs) -> Result<(), Failure> {
    let inst = load(input)?;
    let report = pipeline(&inst, plan_args)?;
    if input.format == Format::Csv {
        if let Some(dir) = input.out.as_deref().filter(|p| p.is_dir()) {
            let tables = [
                ("selection.csv", render::selection_table_csv(&report)),
                ("sequencing.csv", render::sequencing_table_csv(&report)),
                ("comparison.csv", render::comparison_table_csv(&report)),
            ];
            for (name, table) in tables {
                emit(Some(&dir.join(name)), &table)?;
            }
            return Ok(());
        }
    }
    let text = match input.format {
        Format::Text => render::report_text(&report),
        Format::Csv => render::report_csv(&report),
        Format::Json => pretty(&render::report_json(&report)),
    };
    emit(input.out.as_deref(), &text)
}
