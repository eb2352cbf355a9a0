//! Independent feasibility checker and objective evaluator.
//!
//! Works from start times and the instance alone; it never consults the
//! event list or any engine routine.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::DeadlineRule;
use crate::model::{Instance, PlanId, ResourceId, Schedule, TaskId, Time};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ViolationKind {
    TemporalWindow,
    GlobalWindow,
    IntraPlanPrecedence,
    TimeLag,
    ResourceOverlap,
    PlanOrdering,
    PartialPlan,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tasks: Vec<TaskId>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub plans: Vec<PlanId>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub feasible: bool,
    pub violations: Vec<Violation>,
    /// Informational findings that do not affect feasibility, such as a
    /// successor plan running before its predecessor plan.
    pub warnings: Vec<Violation>,
    pub objective: i64,
}

impl ValidationReport {
    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidateError {
    #[error("schedule references {0}, which is not part of the instance")]
    UnknownTask(TaskId),
    #[error("schedule references plan {0}, which is not part of the instance")]
    UnknownPlan(PlanId),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ValidationOptions {
    pub deadline_rule: DeadlineRule,
}

/// Σ α over plans whose every task has a start time.
pub fn objective(instance: &Instance, schedule: &Schedule) -> i64 {
    instance
        .plans()
        .iter()
        .filter(|p| p.tasks().iter().all(|t| schedule.start(t.id()).is_some()))
        .map(|p| p.priority())
        .sum()
}

pub fn validate_schedule(
    instance: &Instance,
    schedule: &Schedule,
) -> Result<ValidationReport, ValidateError> {
    validate_schedule_with(instance, schedule, ValidationOptions::default())
}

pub fn validate_schedule_with(
    instance: &Instance,
    schedule: &Schedule,
    options: ValidationOptions,
) -> Result<ValidationReport, ValidateError> {
    for &id in schedule.starts().keys() {
        if instance.task(id).is_none() {
            return Err(ValidateError::UnknownTask(id));
        }
    }
    for &id in schedule.scheduled().iter().chain(schedule.discarded()) {
        if instance.plan(id).is_none() {
            return Err(ValidateError::UnknownPlan(id));
        }
    }

    let mut violations = Vec::new();
    let mut warnings = Vec::new();
    let window = instance.window();

    // Per-task timing.
    for (&id, &start) in schedule.starts() {
        let task = instance.task(id).expect("checked above");
        let end = start + task.processing_time();
        let late = match options.deadline_rule {
            DeadlineRule::Completion => end > task.due(),
            DeadlineRule::Start => start > task.due(),
        };
        if start < task.release() || late {
            violations.push(Violation {
                kind: ViolationKind::TemporalWindow,
                tasks: vec![id],
                plans: vec![],
                detail: format!(
                    "{id} runs [{start},{end}) outside its window [{}, {}]",
                    task.release(),
                    task.due()
                ),
            });
        }
        if start < window.start() || end > window.end() {
            violations.push(Violation {
                kind: ViolationKind::GlobalWindow,
                tasks: vec![id],
                plans: vec![],
                detail: format!(
                    "{id} runs [{start},{end}) outside the global window [{}, {}]",
                    window.start(),
                    window.end()
                ),
            });
        }
        for pred in task.predecessors() {
            let pred_id = TaskId {
                plan: id.plan,
                index: pred.index,
            };
            let Some(pred_start) = schedule.start(pred_id) else {
                // Reported as a partial plan below.
                continue;
            };
            let pred_end = pred_start
                + instance
                    .task(pred_id)
                    .expect("predecessors are validated by the model")
                    .processing_time();
            if start < pred_end {
                violations.push(Violation {
                    kind: ViolationKind::IntraPlanPrecedence,
                    tasks: vec![pred_id, id],
                    plans: vec![],
                    detail: format!(
                        "{id} starts at {start} before {pred_id} completes at {pred_end}"
                    ),
                });
            } else if start < pred_end + pred.lag {
                violations.push(Violation {
                    kind: ViolationKind::TimeLag,
                    tasks: vec![pred_id, id],
                    plans: vec![],
                    detail: format!(
                        "{id} starts at {start}, less than lag {} after {pred_id} completes at {pred_end}",
                        pred.lag
                    ),
                });
            }
        }
    }

    // Unary resources: sweep each resource's intervals in start order.
    let mut by_resource: BTreeMap<ResourceId, Vec<(Time, Time, TaskId)>> = BTreeMap::new();
    for (&id, &start) in schedule.starts() {
        let task = instance.task(id).expect("checked above");
        for &r in task.resources() {
            by_resource
                .entry(r)
                .or_default()
                .push((start, start + task.processing_time(), id));
        }
    }
    for (resource, mut intervals) in by_resource {
        intervals.sort();
        let mut reach: Option<(Time, TaskId)> = None;
        for (start, end, id) in intervals {
            if let Some((until, holder)) = reach {
                if start < until {
                    violations.push(Violation {
                        kind: ViolationKind::ResourceOverlap,
                        tasks: vec![holder, id],
                        plans: vec![],
                        detail: format!(
                            "{holder} and {id} both use {resource} around [{start},{})",
                            until.min(end)
                        ),
                    });
                }
            }
            if reach.is_none_or(|(until, _)| end > until) {
                reach = Some((end, id));
            }
        }
    }

    // All-or-nothing plans, consistent with the declared plan sets.
    for plan in instance.plans() {
        let placed = plan
            .tasks()
            .iter()
            .filter(|t| schedule.start(t.id()).is_some())
            .count();
        let id = plan.id();
        let listed = schedule.scheduled().contains(&id);
        let dropped = schedule.discarded().contains(&id);
        let problem = if placed != 0 && placed != plan.task_count() {
            Some(format!(
                "{id} has {placed} of {} tasks placed",
                plan.task_count()
            ))
        } else if listed && dropped {
            Some(format!("{id} is listed as both scheduled and discarded"))
        } else if listed && placed == 0 {
            Some(format!(
                "{id} is listed as scheduled but has no tasks placed"
            ))
        } else if dropped && placed != 0 {
            Some(format!("{id} is listed as discarded but has tasks placed"))
        } else {
            None
        };
        if let Some(detail) = problem {
            violations.push(Violation {
                kind: ViolationKind::PartialPlan,
                tasks: vec![],
                plans: vec![id],
                detail,
            });
        }
    }

    // Plan precedence only directs insertion order; inversions are reported
    // but do not make the schedule infeasible.
    let span = |plan: PlanId| -> Option<(Time, Time)> {
        let p = instance.plan(plan)?;
        let mut first = None::<Time>;
        let mut last = None::<Time>;
        for t in p.tasks() {
            let s = schedule.start(t.id())?;
            first = Some(first.map_or(s, |f| f.min(s)));
            let e = s + t.processing_time();
            last = Some(last.map_or(e, |l| l.max(e)));
        }
        first.zip(last)
    };
    for &(from, to) in instance.plan_edges() {
        if let (Some((_, from_end)), Some((to_start, _))) = (span(from), span(to)) {
            if to_start < from_end {
                warnings.push(Violation {
                    kind: ViolationKind::PlanOrdering,
                    tasks: vec![],
                    plans: vec![from, to],
                    detail: format!(
                        "{to} starts at {to_start} before its predecessor {from} ends at {from_end}"
                    ),
                });
            }
        }
    }

    let objective = objective(instance, schedule);

    Ok(ValidationReport {
        feasible: violations.is_empty(),
        violations,
        warnings,
        objective,
    })
}
