use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};

use plansched::gantt::{render_gantt, GanttFormat};
use plansched::io::{self, ScheduleFile};
use plansched::validate::ValidationOptions;
use plansched::{
    build_schedule, exact_max_weight, generate_scenario, validate_schedule_with, DeadlineRule,
    EngineConfig, GroupScope, IdleMetric, Instance, OracleOptions, PriorityOrder, SearchGrid,
};

const EXIT_INFEASIBLE: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "plansched",
    version,
    about = "Schedule prioritized plans of tasks on unary resources"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a schedule for an instance file.
    Schedule {
        instance: PathBuf,
        /// Write the schedule here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a Gantt chart.
        #[arg(long)]
        gantt: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = GanttArg::Text)]
        gantt_format: GanttArg,
        #[arg(long, value_enum, default_value_t = IdleArg::ResourcePred)]
        idle_metric: IdleArg,
        /// Discard plans whose predecessor plan was discarded.
        #[arg(long)]
        strict_plan_precedence: bool,
        #[arg(long, value_enum, default_value_t = OrderArg::Desc)]
        priority_order: OrderArg,
        #[arg(long, value_enum, default_value_t = DeadlineArg::Completion)]
        deadline_rule: DeadlineArg,
        #[arg(long, value_enum, default_value_t = GroupArg::Priority)]
        group_scope: GroupArg,
        /// Include the final event list in the output.
        #[arg(long)]
        events: bool,
    },
    /// Check a schedule file against an instance file.
    Validate {
        instance: PathBuf,
        schedule: PathBuf,
        #[arg(long, value_enum, default_value_t = DeadlineArg::Completion)]
        deadline_rule: DeadlineArg,
    },
    /// Time the engine on the built-in benchmark scenarios.
    Bench {
        /// Scenario number 1 to 8, or `all`.
        #[arg(long, default_value = "all", value_parser = parse_scenarios)]
        scenario: Scenarios,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
        repeat: u32,
    },
    /// Compute the exact optimum of a small instance.
    Oracle {
        instance: PathBuf,
        #[arg(long)]
        node_limit: Option<u64>,
        /// Seconds.
        #[arg(long)]
        time_limit: Option<f64>,
        #[arg(long, value_enum, default_value_t = GridArg::Events)]
        grid: GridArg,
        #[arg(long, value_enum, default_value_t = DeadlineArg::Completion)]
        deadline_rule: DeadlineArg,
        #[arg(long)]
        strict_plan_precedence: bool,
        /// Write the witness schedule here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a benchmark scenario as an instance file.
    Scenario {
        #[arg(value_parser = clap::value_parser!(u32).range(1..=8))]
        number: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GanttArg {
    Text,
    Svg,
}

#[derive(Clone, Copy, ValueEnum)]
enum IdleArg {
    ResourcePred,
    PrevEvent,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    Desc,
    Asc,
}

#[derive(Clone, Copy, ValueEnum)]
enum DeadlineArg {
    Completion,
    Start,
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupArg {
    Priority,
    Frontier,
}

#[derive(Clone, Copy, ValueEnum)]
enum GridArg {
    Events,
    Full,
}

impl From<DeadlineArg> for DeadlineRule {
    fn from(arg: DeadlineArg) -> Self {
        match arg {
            DeadlineArg::Completion => DeadlineRule::Completion,
            DeadlineArg::Start => DeadlineRule::Start,
        }
    }
}

#[derive(Clone, Debug)]
struct Scenarios(Vec<u32>);

fn parse_scenarios(text: &str) -> Result<Scenarios, String> {
    if text.eq_ignore_ascii_case("all") {
        return Ok(Scenarios((1..=8).collect()));
    }
    match text.parse::<u32>() {
        Ok(n @ 1..=8) => Ok(Scenarios(vec![n])),
        _ => Err(format!("expected 1 to 8 or `all`, got `{text}`")),
    }
}

/// A failure that ends the run with a message and an exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.to_string(),
        }
    }
}

fn load(path: &Path) -> Result<Instance, Failure> {
    io::parse_instance(path).map_err(|e| with_path(path, e))
}

fn with_path(path: &Path, err: io::IoError) -> Failure {
    match err {
        io::IoError::Io { .. } => Failure::usage(err),
        other => Failure::usage(format!("{}: {other}", path.display())),
    }
}

fn emit(text: &str, path: Option<&Path>) -> Result<(), Failure> {
    match path {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::usage(format!("{}: {e}", path.display()))),
        None => {
            print_stdout(text);
            Ok(())
        }
    }
}

/// Writes to stdout, ignoring a reader that went away early.
fn print_stdout(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("plansched: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Schedule {
            instance,
            out,
            gantt,
            gantt_format,
            idle_metric,
            strict_plan_precedence,
            priority_order,
            deadline_rule,
            group_scope,
            events,
        } => {
            let inst = load(&instance)?;
            let config = EngineConfig {
                idle_metric: match idle_metric {
                    IdleArg::ResourcePred => IdleMetric::ResourcePred,
                    IdleArg::PrevEvent => IdleMetric::PrevEvent,
                },
                deadline_rule: deadline_rule.into(),
                strict_plan_precedence,
                priority_order: match priority_order {
                    OrderArg::Desc => PriorityOrder::Desc,
                    OrderArg::Asc => PriorityOrder::Asc,
                },
                group_scope: match group_scope {
                    GroupArg::Priority => GroupScope::Priority,
                    GroupArg::Frontier => GroupScope::Frontier,
                },
            };
            let outcome = build_schedule(&inst, config);
            let file =
                ScheduleFile::new(&inst, &outcome.schedule, events.then_some(&outcome.events))
                    .map_err(Failure::usage)?;
            emit(&io::schedule_to_string(&file), out.as_deref())?;
            if let Some(path) = gantt {
                let format = match gantt_format {
                    GanttArg::Text => GanttFormat::Text,
                    GanttArg::Svg => GanttFormat::Svg,
                };
                emit(&render_gantt(&outcome.schedule, &inst, format), Some(&path))?;
            }
            Ok(())
        }
        Command::Validate {
            instance,
            schedule,
            deadline_rule,
        } => {
            let inst = load(&instance)?;
            let file = io::parse_schedule(&schedule).map_err(|e| with_path(&schedule, e))?;
            let options = ValidationOptions {
                deadline_rule: deadline_rule.into(),
            };
            let report = validate_schedule_with(&inst, &file.to_schedule(), options)
                .map_err(Failure::usage)?;
            print_stdout(&format!(
                "{}\n",
                serde_json::to_string_pretty(&report).expect("report serializes")
            ));
            if file.objective != report.objective {
                eprintln!(
                    "plansched: schedule file states objective {} but placements give {}",
                    file.objective, report.objective
                );
            }
            if report.feasible {
                Ok(())
            } else {
                Err(Failure {
                    code: EXIT_INFEASIBLE,
                    message: format!("infeasible: {} violation(s)", report.violations.len()),
                })
            }
        }
        Command::Bench { scenario, repeat } => {
            let rows = std::thread::scope(|scope| {
                let handles: Vec<_> = scenario
                    .0
                    .iter()
                    .map(|&n| scope.spawn(move || bench_row(n, repeat)))
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("bench worker panicked"))
                    .collect::<Vec<_>>()
            });
            print_stdout(&format!(
                "{:<10} {:>4} {:>6} {:>4} {:>8} {:>10}\n",
                "scenario", "K", "sum_n", "P_s", "sum_n_Ps", "mean_ms"
            ));
            for row in rows {
                print_stdout(&format!("{}\n", row?));
            }
            Ok(())
        }
        Command::Oracle {
            instance,
            node_limit,
            time_limit,
            grid,
            deadline_rule,
            strict_plan_precedence,
            out,
        } => {
            let inst = load(&instance)?;
            let time_limit = match time_limit {
                Some(secs) => Some(
                    Duration::try_from_secs_f64(secs)
                        .map_err(|_| Failure::usage(format!("invalid time limit `{secs}`")))?,
                ),
                None => None,
            };
            let options = OracleOptions {
                node_limit,
                time_limit,
                grid: match grid {
                    GridArg::Events => SearchGrid::EventAligned,
                    GridArg::Full => SearchGrid::Full,
                },
                deadline_rule: deadline_rule.into(),
                strict_plan_precedence,
            };
            let result = exact_max_weight(&inst, options);
            print_stdout(&format!(
                "optimum {}\nexplored {}\nlimit_hit {}\n",
                result.optimum, result.explored, result.time_limit_hit
            ));
            if let Some(path) = out {
                let file =
                    ScheduleFile::new(&inst, &result.witness, None).map_err(Failure::usage)?;
                emit(&io::schedule_to_string(&file), Some(&path))?;
            }
            Ok(())
        }
        Command::Scenario { number, out } => {
            let inst = generate_scenario(number).map_err(Failure::usage)?;
            emit(&io::instance_to_string(&inst), out.as_deref())
        }
    }
}

fn bench_row(n: u32, repeat: u32) -> Result<String, Failure> {
    let inst = generate_scenario(n).map_err(Failure::usage)?;
    let mut total = Duration::ZERO;
    let mut last = None;
    for _ in 0..repeat {
        let started = Instant::now();
        let outcome = build_schedule(&inst, EngineConfig::default());
        total += started.elapsed();
        last = Some(outcome);
    }
    let outcome = last.expect("repeat is at least 1");
    let placed: usize = outcome
        .scheduled()
        .iter()
        .filter_map(|&id| inst.plan(id))
        .map(|p| p.task_count())
        .sum();
    let mean_ms = total.as_secs_f64() * 1000.0 / f64::from(repeat);
    Ok(format!(
        "{:<10} {:>4} {:>6} {:>4} {:>8} {:>10.3}",
        n,
        inst.plan_count(),
        inst.task_count(),
        outcome.scheduled().len(),
        placed,
        mean_ms
    ))
}
