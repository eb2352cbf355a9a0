//! Checks shared by the property and acceptance suites.

#![allow(dead_code)]

use plansched::engine::WorkingState;
use plansched::io::{self, ScheduleFile};
use plansched::validate::{objective, ValidationOptions};
use plansched::{
    build_schedule, sort_plans, topological_sort, validate_schedule_with, BuildOutcome,
    DeadlineRule, Engine, EngineConfig, GroupScope, IdleMetric, Instance, PriorityOrder,
};

/// Every combination of engine switches.
pub fn configs() -> Vec<EngineConfig> {
    let mut all = Vec::new();
    for idle_metric in [IdleMetric::ResourcePred, IdleMetric::PrevEvent] {
        for deadline_rule in [DeadlineRule::Completion, DeadlineRule::Start] {
            for strict_plan_precedence in [false, true] {
                for priority_order in [PriorityOrder::Desc, PriorityOrder::Asc] {
                    for group_scope in [GroupScope::Priority, GroupScope::Frontier] {
                        all.push(EngineConfig {
                            idle_metric,
                            deadline_rule,
                            strict_plan_precedence,
                            priority_order,
                            group_scope,
                        });
                    }
                }
            }
        }
    }
    all
}

pub fn check_feasible(
    inst: &Instance,
    out: &BuildOutcome,
    rule: DeadlineRule,
) -> Result<(), String> {
    let options = ValidationOptions {
        deadline_rule: rule,
    };
    let report = validate_schedule_with(inst, &out.schedule, options).map_err(|e| e.to_string())?;
    if !report.feasible {
        return Err(format!("infeasible: {:?}", report.violations));
    }
    let mut decided: Vec<_> = out
        .scheduled()
        .iter()
        .chain(out.discarded())
        .copied()
        .collect();
    decided.sort();
    let all: Vec<_> = inst.plans().iter().map(|p| p.id()).collect();
    let mut all_sorted = all.clone();
    all_sorted.sort();
    if decided != all_sorted
        || out
            .scheduled()
            .intersection(out.discarded())
            .next()
            .is_some()
    {
        return Err("scheduled and discarded do not partition the plans".into());
    }
    Ok(())
}

/// Every failed plan insertion leaves the state exactly as it was.
pub fn check_rollback(
    inst: &Instance,
    config: EngineConfig,
    out: &BuildOutcome,
) -> Result<(), String> {
    let engine = Engine::new(inst, config);
    let mut state = engine.initial_state();
    for id in sort_plans(inst, config.priority_order) {
        let plan = inst.plan(id).unwrap();
        let before = state.clone();
        if !engine.schedule_plan(plan, &mut state) && state != before {
            return Err(format!("failed insertion of {id} changed the state"));
        }
    }
    let mut finished = WorkingState {
        schedule: out.schedule.clone(),
        events: out.events.clone(),
    };
    for plan in inst.plans() {
        if out.scheduled().contains(&plan.id()) {
            continue;
        }
        let before = finished.clone();
        if engine.schedule_plan(plan, &mut finished) {
            finished = before;
        } else if finished != before {
            return Err(format!(
                "failed insertion of {} changed the final state",
                plan.id()
            ));
        }
    }
    Ok(())
}

/// Event count bound and per-interval unary usage against task intervals.
pub fn check_events(inst: &Instance, out: &BuildOutcome) -> Result<(), String> {
    let placed = out.schedule.starts().len();
    if out.events.len() > 2 * placed + 2 {
        return Err(format!("{} events for {placed} tasks", out.events.len()));
    }
    let times: Vec<_> = out.events.times().collect();
    for (i, &t) in times.iter().enumerate() {
        let next = times.get(i + 1).copied().unwrap_or(inst.window().end());
        let event = out.events.get(t).unwrap();
        for res in inst.resource_ids() {
            let covering = out
                .schedule
                .starts()
                .iter()
                .filter(|(id, &s)| {
                    let task = inst.task(**id).unwrap();
                    task.resources().contains(&res) && s <= t && task.completion_time(s) > t
                })
                .count();
            if covering > 1 {
                return Err(format!("{covering} tasks on {res} at {t}"));
            }
            let expected = if next > t { covering as u8 } else { 0 };
            if next > t && event.usage(res) != expected {
                return Err(format!(
                    "usage of {res} at {t} is {} but {covering} task(s) cover it",
                    event.usage(res)
                ));
            }
        }
    }
    Ok(())
}

pub fn check_sort(inst: &Instance) -> Result<(), String> {
    let (_, partition) = topological_sort(inst);
    for order in [PriorityOrder::Desc, PriorityOrder::Asc] {
        let sorted = sort_plans(inst, order);
        if sorted.len() != inst.plan_count() {
            return Err("sort lost plans".into());
        }
        let pos = |id| sorted.iter().position(|&p| p == id).unwrap();
        for &(a, b) in inst.plan_edges() {
            if pos(a) >= pos(b) {
                return Err(format!("{a} sorted after its successor {b}"));
            }
            if partition.frontier_of(a) >= partition.frontier_of(b) {
                return Err(format!("frontier of {a} not below {b}"));
            }
        }
        for pair in sorted.windows(2) {
            let (fa, fb) = (
                partition.frontier_of(pair[0]),
                partition.frontier_of(pair[1]),
            );
            if fa > fb {
                return Err("frontiers out of order".into());
            }
            if fa == fb {
                let (pa, pb) = (
                    inst.plan(pair[0]).unwrap().priority(),
                    inst.plan(pair[1]).unwrap().priority(),
                );
                let ok = match order {
                    PriorityOrder::Desc => pa >= pb,
                    PriorityOrder::Asc => pa <= pb,
                };
                if !ok {
                    return Err(format!("priorities {pa}, {pb} out of order in a frontier"));
                }
            }
        }
    }
    Ok(())
}

pub fn check_trace(inst: &Instance, out: &BuildOutcome) -> Result<(), String> {
    if out.objective_trace.windows(2).any(|w| w[0] > w[1]) {
        return Err(format!("objective decreased: {:?}", out.objective_trace));
    }
    let last = out.objective_trace.last().copied().unwrap_or(0);
    if last != objective(inst, &out.schedule) {
        return Err("trace does not end at the objective".into());
    }
    Ok(())
}

pub fn check_round_trip(inst: &Instance, out: &BuildOutcome) -> Result<(), String> {
    let text = io::instance_to_string(inst);
    let back = io::instance_from_str(&text).map_err(|e| e.to_string())?;
    if &back != inst {
        return Err("instance round trip differs".into());
    }
    let file =
        ScheduleFile::new(inst, &out.schedule, Some(&out.events)).map_err(|e| e.to_string())?;
    let parsed =
        io::schedule_from_str(&io::schedule_to_string(&file)).map_err(|e| e.to_string())?;
    if parsed != file || parsed.to_schedule() != out.schedule {
        return Err("schedule round trip differs".into());
    }
    Ok(())
}

/// Runs every check for one instance under every engine configuration.
pub fn check_all(inst: &Instance) -> Result<(), String> {
    check_sort(inst)?;
    for config in configs() {
        let out = build_schedule(inst, config);
        let tag = |e: String| format!("{config:?}: {e}");
        check_feasible(inst, &out, config.deadline_rule).map_err(tag)?;
        check_rollback(inst, config, &out).map_err(tag)?;
        check_events(inst, &out).map_err(tag)?;
        check_trace(inst, &out).map_err(tag)?;
    }
    let out = build_schedule(inst, EngineConfig::default());
    check_round_trip(inst, &out)
}
