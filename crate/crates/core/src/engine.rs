//! The insertion heuristic.
//!
//! Plans are taken in [`sort_plans`] order and inserted one at a time into a
//! working schedule backed by an [`EventList`]. Each task goes to the first
//! event-aligned instant at or after its earliest start where all of its
//! resources are free for the whole processing time. A plan that cannot be
//! fully placed is rolled back and discarded. Plans sharing a priority are
//! inserted as a group, greedily by least idle time, and never ahead of
//! their predecessor plans.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::events::EventList;
use crate::model::{Instance, Plan, PlanId, Schedule, Task, TaskId, Time, TimeWindow};
use crate::ordering::{sort_plans, topological_sort, FrontierPartition, PriorityOrder};

/// How a due date constrains a placement.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeadlineRule {
    /// The task must complete by its due date: `s + p <= d`.
    #[default]
    Completion,
    /// Only the start must lie in `[r, d]`; completion is bounded by the
    /// window alone.
    Start,
}

/// Idle-time measure used to order plans of equal priority.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdleMetric {
    /// Gap between each task's start and the latest completion of any task
    /// that finished earlier on one of its resources (window start if none).
    #[default]
    ResourcePred,
    /// Gap between each task's start event and the event preceding it.
    PrevEvent,
}

/// Which equal-priority plans are inserted together as one group.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupScope {
    /// Every pending plan with the head's priority, pulled forward as soon
    /// as all of its predecessor plans are decided or in the same group.
    #[default]
    Priority,
    /// Only the run of equal-priority plans in the head's frontier.
    Frontier,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub idle_metric: IdleMetric,
    pub deadline_rule: DeadlineRule,
    /// Discard a plan outright when one of its predecessor plans was
    /// discarded.
    pub strict_plan_precedence: bool,
    pub priority_order: PriorityOrder,
    pub group_scope: GroupScope,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("{task} cannot be placed before its predecessor {predecessor}")]
    PredecessorUnscheduled { task: TaskId, predecessor: TaskId },
}

/// Temporal feasibility of starting `task` at `t`.
pub fn check_constraints(t: Time, task: &Task, window: TimeWindow, rule: DeadlineRule) -> bool {
    let end = task.completion_time(t);
    let in_release_window = task.release() <= t && t <= task.due();
    let meets_due = match rule {
        DeadlineRule::Completion => end <= task.due(),
        DeadlineRule::Start => true,
    };
    in_release_window && meets_due && window.contains(t) && window.contains(end)
}

/// `max(W_s, r, max_j (C_j + lag_j))` over the task's predecessors.
pub fn earliest_start(
    task: &Task,
    plan: &Plan,
    schedule: &Schedule,
    window: TimeWindow,
) -> Result<Time, EngineError> {
    let mut est = window.start().max(task.release());
    for pred in task.predecessors() {
        let pred_id = TaskId {
            plan: task.id().plan,
            index: pred.index,
        };
        let completion = plan
            .task(pred.index)
            .zip(schedule.start(pred_id))
            .map(|(t, s)| t.completion_time(s))
            .ok_or(EngineError::PredecessorUnscheduled {
                task: task.id(),
                predecessor: pred_id,
            })?;
        est = est.max(completion + pred.lag);
    }
    Ok(est)
}

/// Working schedule plus its event list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorkingState {
    pub schedule: Schedule,
    pub events: EventList,
}

impl WorkingState {
    pub fn new(window: TimeWindow) -> Self {
        Self {
            schedule: Schedule::new(),
            events: EventList::new(window.start()),
        }
    }
}

/// Scan position while searching an insertion point: `start` is the
/// candidate start event, `scan` the event being checked and `remaining`
/// the processing time not yet covered by checked intervals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InsertionCursor {
    pub start: Time,
    pub scan: Time,
    pub remaining: Time,
}

impl InsertionCursor {
    fn new(start: Time, processing_time: Time) -> Self {
        Self {
            start,
            scan: start,
            remaining: processing_time,
        }
    }
}

/// Result of a full build.
#[derive(Clone, Debug)]
pub struct BuildOutcome {
    pub schedule: Schedule,
    pub events: EventList,
    /// Objective after each iteration of the main loop.
    pub objective_trace: Vec<i64>,
}

impl BuildOutcome {
    pub fn scheduled(&self) -> &std::collections::BTreeSet<PlanId> {
        self.schedule.scheduled()
    }

    pub fn discarded(&self) -> &std::collections::BTreeSet<PlanId> {
        self.schedule.discarded()
    }
}

pub struct Engine<'a> {
    instance: &'a Instance,
    config: EngineConfig,
}

impl<'a> Engine<'a> {
    pub fn new(instance: &'a Instance, config: EngineConfig) -> Self {
        Self { instance, config }
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn initial_state(&self) -> WorkingState {
        WorkingState::new(self.instance.window())
    }

    fn plan(&self, id: PlanId) -> &'a Plan {
        self.instance
            .plan(id)
            .expect("plan id comes from the instance")
    }

    /// Finds the earliest feasible insertion point for `task` and records it.
    ///
    /// On failure every task of the owning plan is removed again, leaving
    /// `state` as it was before the plan was attempted.
    pub fn schedule_task(&self, task: &Task, state: &mut WorkingState) -> bool {
        let plan = self.plan(task.id().plan);
        match self.find_start(task, plan, state) {
            Some(start) => {
                state.schedule.set_start(task.id(), start);
                state.events.insert_task(task, start);
                true
            }
            None => {
                self.rollback(plan, state);
                false
            }
        }
    }

    fn find_start(&self, task: &Task, plan: &Plan, state: &WorkingState) -> Option<Time> {
        let window = self.instance.window();
        let rule = self.config.deadline_rule;
        let est = earliest_start(task, plan, &state.schedule, window).ok()?;
        let events = &state.events;
        let mut cursor = InsertionCursor::new(est, task.processing_time());

        while cursor.remaining > 0 {
            // Temporal feasibility only gets worse as the start moves right.
            if !check_constraints(cursor.start, task, window, rule) {
                return None;
            }
            let free = events
                .covering(cursor.scan)
                .is_none_or(|e| e.busy().is_disjoint(task.resources()));
            let next = events.next_after(cursor.scan).map(|e| e.time());
            match (free, next) {
                (true, Some(g)) => {
                    cursor.remaining = (cursor.remaining - (g - cursor.scan)).max(0);
                    cursor.scan = g;
                }
                // Nothing is scheduled past the last event.
                (true, None) => cursor.remaining = 0,
                (false, Some(g)) => cursor = InsertionCursor::new(g, task.processing_time()),
                (false, None) => return None,
            }
        }
        check_constraints(cursor.start, task, window, rule).then_some(cursor.start)
    }

    fn rollback(&self, plan: &Plan, state: &mut WorkingState) {
        for task in plan.tasks() {
            if let Some(start) = state.schedule.start(task.id()) {
                state.events.remove_task(task, start);
            }
        }
        state.schedule.clear_plan(plan.id());
    }

    /// Places every task of `plan` in order, stopping at the first failure.
    pub fn schedule_plan(&self, plan: &Plan, state: &mut WorkingState) -> bool {
        plan.tasks()
            .iter()
            .all(|task| self.schedule_task(task, state))
    }

    /// Sum of idle gaps in front of the tasks of an already placed plan.
    pub fn idle_time_sum(&self, plan: &Plan, state: &WorkingState) -> Time {
        let window_start = self.instance.window().start();
        plan.tasks()
            .iter()
            .filter_map(|task| state.schedule.start(task.id()).map(|s| (task, s)))
            .map(|(task, start)| match self.config.idle_metric {
                IdleMetric::ResourcePred => {
                    let anchor = state
                        .schedule
                        .starts()
                        .iter()
                        .filter(|(&other, _)| other != task.id())
                        .filter_map(|(&other, &s)| {
                            let other = self.instance.task(other)?;
                            let done = other.completion_time(s);
                            (done <= start && !other.resources().is_disjoint(task.resources()))
                                .then_some(done)
                        })
                        .fold(window_start, Time::max);
                    start - anchor
                }
                IdleMetric::PrevEvent => state
                    .events
                    .prev_before(start)
                    .map_or(0, |e| start - e.time()),
            })
            .sum()
    }

    /// Inserts a group of equal-priority plans, each round committing the
    /// feasible plan with the smallest idle-time sum. Ties go to the plan
    /// examined last. A plan is only tried once none of its predecessor
    /// plans is still pending in the group. Returns the plans that could
    /// not be placed.
    pub fn schedule_plan_set(&self, plans: &[PlanId], state: &mut WorkingState) -> Vec<PlanId> {
        let mut pending: Vec<PlanId> = plans.to_vec();
        let mut unscheduled = Vec::new();
        while !pending.is_empty() {
            let (ready, waiting): (Vec<PlanId>, Vec<PlanId>) = pending.iter().partition(|&&id| {
                self.instance
                    .predecessors(id)
                    .all(|p| !pending.contains(&p))
            });
            let mut best: Option<(PlanId, Time, WorkingState)> = None;
            let mut feasible = waiting;
            for id in ready {
                if self.blocked(id, &state.schedule, &unscheduled) {
                    unscheduled.push(id);
                    continue;
                }
                let plan = self.plan(id);
                let mut trial = state.clone();
                if self.schedule_plan(plan, &mut trial) {
                    let idle = self.idle_time_sum(plan, &trial);
                    if best.as_ref().is_none_or(|(_, min, _)| idle <= *min) {
                        best = Some((id, idle, trial));
                    }
                    feasible.push(id);
                } else {
                    unscheduled.push(id);
                }
            }
            pending = feasible;
            if let Some((id, _, trial)) = best {
                *state = trial;
                pending.retain(|&p| p != id);
            }
        }
        unscheduled
    }

    fn blocked(&self, plan: PlanId, schedule: &Schedule, failed: &[PlanId]) -> bool {
        self.config.strict_plan_precedence
            && self
                .instance
                .predecessors(plan)
                .any(|p| schedule.discarded().contains(&p) || failed.contains(&p))
    }

    /// Removes from `queue` the plans inserted together with `head`.
    fn take_group(
        &self,
        head: PlanId,
        queue: &mut VecDeque<PlanId>,
        partition: &FrontierPartition,
    ) -> Vec<PlanId> {
        let priority = self.plan(head).priority();
        let mut group = vec![head];
        match self.config.group_scope {
            GroupScope::Frontier => {
                let frontier = partition.frontier_of(head);
                while let Some(&next) = queue.front() {
                    if self.plan(next).priority() != priority
                        || partition.frontier_of(next) != frontier
                    {
                        break;
                    }
                    group.extend(queue.pop_front());
                }
            }
            GroupScope::Priority => loop {
                let joinable = queue.iter().position(|&next| {
                    self.plan(next).priority() == priority
                        && self
                            .instance
                            .predecessors(next)
                            .all(|p| group.contains(&p) || !queue.contains(&p))
                });
                match joinable {
                    Some(i) => group.extend(queue.remove(i)),
                    None => break,
                }
            },
        }
        group
    }

    fn objective(&self, schedule: &Schedule) -> i64 {
        schedule
            .scheduled()
            .iter()
            .map(|&id| self.plan(id).priority())
            .sum()
    }

    /// Runs the heuristic over the whole instance.
    pub fn build(&self) -> BuildOutcome {
        let order = sort_plans(self.instance, self.config.priority_order);
        let (_, partition) = topological_sort(self.instance);
        let mut queue: VecDeque<PlanId> = order.into();
        let mut state = self.initial_state();
        let mut trace = Vec::new();

        while let Some(head) = queue.pop_front() {
            let group = self.take_group(head, &mut queue, &partition);
            if let [single] = group[..] {
                if !self.blocked(single, &state.schedule, &[])
                    && self.schedule_plan(self.plan(single), &mut state)
                {
                    state.schedule.mark_scheduled(single);
                } else {
                    state.schedule.mark_discarded(single);
                }
            } else {
                let unscheduled = self.schedule_plan_set(&group, &mut state);
                for id in group {
                    if unscheduled.contains(&id) {
                        state.schedule.mark_discarded(id);
                    } else {
                        state.schedule.mark_scheduled(id);
                    }
                }
            }
            trace.push(self.objective(&state.schedule));
        }

        BuildOutcome {
            schedule: state.schedule,
            events: state.events,
            objective_trace: trace,
        }
    }
}

/// Builds a schedule for `instance` with the given configuration.
pub fn build_schedule(instance: &Instance, config: EngineConfig) -> BuildOutcome {
    Engine::new(instance, config).build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::ResourceId;

    fn tid(k: u32, i: u32) -> TaskId {
        TaskId::new(k, i)
    }

    fn place_plans(engine: &Engine, ids: &[u32], state: &mut WorkingState) {
        for &k in ids {
            let plan = engine.plan(PlanId(k));
            assert!(engine.schedule_plan(plan, state), "plan {k} should fit");
            state.schedule.mark_scheduled(PlanId(k));
        }
    }

    #[test]
    fn check_constraints_on_example_one_task() {
        let inst = fixtures::example1();
        let task = inst.task(tid(1, 1)).unwrap();
        let w = inst.window();
        assert!(check_constraints(2, task, w, DeadlineRule::Completion));
        assert!(!check_constraints(5, task, w, DeadlineRule::Completion));
        assert!(!check_constraints(1, task, w, DeadlineRule::Completion));
        // Start-only reading accepts a start inside [r, d] that overruns d.
        assert!(check_constraints(5, task, w, DeadlineRule::Start));
    }

    #[test]
    fn earliest_start_examples() {
        let inst = fixtures::example2();
        let plan4 = inst.plan(PlanId(4)).unwrap();
        let mut s = Schedule::new();
        s.set_start(tid(4, 1), 2);
        let j42 = plan4.task(2).unwrap();
        assert_eq!(earliest_start(j42, plan4, &s, inst.window()), Ok(6));

        let inst1 = fixtures::example1();
        let plan2 = inst1.plan(PlanId(2)).unwrap();
        let mut s = Schedule::new();
        s.set_start(tid(2, 1), 3);
        assert_eq!(
            earliest_start(plan2.task(2).unwrap(), plan2, &s, inst1.window()),
            Ok(5)
        );

        // No predecessors and r < W_s clamps to the window.
        let j31 = inst.task(tid(3, 1)).unwrap();
        let plan3 = inst.plan(PlanId(3)).unwrap();
        assert_eq!(
            earliest_start(j31, plan3, &Schedule::new(), inst.window()),
            Ok(2)
        );
    }

    #[test]
    fn earliest_start_requires_placed_predecessors() {
        let inst = fixtures::example2();
        let plan4 = inst.plan(PlanId(4)).unwrap();
        assert_eq!(
            earliest_start(
                plan4.task(2).unwrap(),
                plan4,
                &Schedule::new(),
                inst.window()
            ),
            Err(EngineError::PredecessorUnscheduled {
                task: tid(4, 2),
                predecessor: tid(4, 1)
            })
        );
    }

    fn example2_engine(inst: &Instance) -> Engine<'_> {
        Engine::new(
            inst,
            EngineConfig {
                deadline_rule: DeadlineRule::Start,
                ..EngineConfig::default()
            },
        )
    }

    #[test]
    fn inserting_plan3_matches_table_four() {
        let inst = fixtures::example2();
        let engine = example2_engine(&inst);
        let mut state = engine.initial_state();
        place_plans(&engine, &[1, 2], &mut state);
        let j31 = inst.task(tid(3, 1)).unwrap();
        assert!(engine.schedule_task(j31, &mut state));
        assert_eq!(state.schedule.start(tid(3, 1)), Some(2));
        let times: Vec<Time> = state.events.times().collect();
        assert_eq!(times, vec![2, 4, 5, 6, 7, 9]);
        let b3: Vec<u8> = state
            .events
            .iter()
            .map(|e| e.usage(ResourceId(3)))
            .collect();
        assert_eq!(b3, vec![1, 1, 0, 0, 1, 0]);
    }

    #[test]
    fn inserting_j52_opens_event_at_ten() {
        let inst = fixtures::example2();
        let engine = example2_engine(&inst);
        let mut state = engine.initial_state();
        place_plans(&engine, &[1, 2, 3, 4], &mut state);
        let plan5 = inst.plan(PlanId(5)).unwrap();
        assert!(engine.schedule_task(plan5.task(1).unwrap(), &mut state));
        assert_eq!(state.schedule.start(tid(5, 1)), Some(6));
        assert!(state.events.get(10).is_none());
        assert!(engine.schedule_task(plan5.task(2).unwrap(), &mut state));
        assert_eq!(state.schedule.start(tid(5, 2)), Some(9));
        assert!(state
            .events
            .get(10)
            .unwrap()
            .completing()
            .contains(&tid(5, 2)));
    }

    #[test]
    fn task_outside_window_fails_without_state_change() {
        let inst = fixtures::late_task();
        let engine = Engine::new(&inst, EngineConfig::default());
        let mut state = engine.initial_state();
        let before = state.clone();
        let task = inst.task(tid(1, 1)).unwrap();
        assert!(!engine.schedule_task(task, &mut state));
        assert_eq!(state, before);
    }

    #[test]
    fn schedule_plan_example_one() {
        let inst = fixtures::example1();
        let engine = Engine::new(&inst, EngineConfig::default());
        let mut state = engine.initial_state();
        place_plans(&engine, &[1, 2], &mut state);
        assert_eq!(state.schedule.start(tid(1, 1)), Some(2));
        assert_eq!(state.schedule.start(tid(2, 1)), Some(3));
        assert_eq!(state.schedule.start(tid(2, 2)), Some(5));
    }

    #[test]
    fn schedule_plan_example_two_plan4() {
        let inst = fixtures::example2();
        let engine = example2_engine(&inst);
        let mut state = engine.initial_state();
        place_plans(&engine, &[1, 2, 3, 4], &mut state);
        assert_eq!(state.schedule.start(tid(4, 1)), Some(2));
        assert_eq!(state.schedule.start(tid(4, 2)), Some(6));
    }

    #[test]
    fn failed_plan_rolls_back_partial_placement() {
        let inst = fixtures::example2();
        // Under the completion rule J^1_2 (d = 8) cannot finish in time.
        let engine = Engine::new(&inst, EngineConfig::default());
        let mut state = engine.initial_state();
        let before = state.clone();
        assert!(!engine.schedule_plan(inst.plan(PlanId(1)).unwrap(), &mut state));
        assert_eq!(state, before);
    }

    #[test]
    fn idle_time_examples() {
        let inst = fixtures::idle_time();
        let engine = Engine::new(&inst, EngineConfig::default());
        let mut base = engine.initial_state();
        place_plans(&engine, &[1, 2], &mut base);

        let mut with3 = base.clone();
        let p3 = inst.plan(PlanId(3)).unwrap();
        assert!(engine.schedule_plan(p3, &mut with3));
        assert_eq!(with3.schedule.start(tid(3, 1)), Some(4));
        assert_eq!(engine.idle_time_sum(p3, &with3), 2);

        let mut with4 = base.clone();
        let p4 = inst.plan(PlanId(4)).unwrap();
        assert!(engine.schedule_plan(p4, &mut with4));
        assert_eq!(with4.schedule.start(tid(4, 1)), Some(3));
        assert_eq!(with4.schedule.start(tid(4, 2)), Some(4));
        assert_eq!(engine.idle_time_sum(p4, &with4), 1);
    }

    #[test]
    fn idle_time_previous_event_metric() {
        let inst = fixtures::idle_time();
        let engine = Engine::new(
            &inst,
            EngineConfig {
                idle_metric: IdleMetric::PrevEvent,
                ..EngineConfig::default()
            },
        );
        let mut base = engine.initial_state();
        place_plans(&engine, &[1, 2], &mut base);
        let mut with4 = base.clone();
        let p4 = inst.plan(PlanId(4)).unwrap();
        assert!(engine.schedule_plan(p4, &mut with4));
        // J^4_1 at 3 after event 2, J^4_2 at 4 after the new event 3.
        assert_eq!(engine.idle_time_sum(p4, &with4), 2);
    }

    #[test]
    fn plan_set_commits_plan4_before_plan3() {
        let inst = fixtures::idle_time();
        let engine = Engine::new(&inst, EngineConfig::default());
        let mut state = engine.initial_state();
        place_plans(&engine, &[1, 2], &mut state);
        let mut trace = state.clone();
        let u = engine.schedule_plan_set(&[PlanId(3), PlanId(4)], &mut state);
        assert!(u.is_empty());
        // Committing Pi_4 alone first reproduces the same schedule.
        assert!(engine.schedule_plan(inst.plan(PlanId(4)).unwrap(), &mut trace));
        assert!(engine.schedule_plan(inst.plan(PlanId(3)).unwrap(), &mut trace));
        assert_eq!(trace, state);
    }

    #[test]
    fn plan_set_with_infeasible_plan() {
        let inst = fixtures::late_task();
        let engine = Engine::new(&inst, EngineConfig::default());
        let mut state = engine.initial_state();
        let before = state.clone();
        let u = engine.schedule_plan_set(&[PlanId(1)], &mut state);
        assert_eq!(u, vec![PlanId(1)]);
        assert_eq!(state, before);
    }

    #[test]
    fn build_on_empty_instance() {
        let inst = Instance::new(vec![], [], [], TimeWindow::new(0, 10).unwrap()).unwrap();
        let out = build_schedule(&inst, EngineConfig::default());
        assert!(out.schedule.is_empty());
        assert!(out.scheduled().is_empty() && out.discarded().is_empty());
        assert_eq!(out.events.len(), 1);
    }

    #[test]
    fn strict_precedence_discards_successors() {
        let inst = fixtures::blocked_chain();
        let lenient = build_schedule(&inst, EngineConfig::default());
        assert!(lenient.scheduled().contains(&PlanId(2)));
        let strict = build_schedule(
            &inst,
            EngineConfig {
                strict_plan_precedence: true,
                ..EngineConfig::default()
            },
        );
        assert!(strict.discarded().contains(&PlanId(1)));
        assert!(strict.discarded().contains(&PlanId(2)));
    }

    #[test]
    fn priority_scope_pulls_successor_into_group() {
        let inst = fixtures::cross_frontier(true);
        let out = build_schedule(&inst, EngineConfig::default());
        assert_eq!(
            out.scheduled().iter().map(|p| p.0).collect::<Vec<_>>(),
            [1, 3]
        );

        let frontier = EngineConfig {
            group_scope: GroupScope::Frontier,
            ..EngineConfig::default()
        };
        let out = build_schedule(&inst, frontier);
        assert_eq!(
            out.scheduled().iter().map(|p| p.0).collect::<Vec<_>>(),
            [1, 2]
        );
    }

    #[test]
    fn strict_mode_applies_inside_a_group() {
        let inst = fixtures::cross_frontier(false);
        let strict = EngineConfig {
            strict_plan_precedence: true,
            ..EngineConfig::default()
        };
        let out = build_schedule(&inst, strict);
        assert_eq!(out.scheduled().iter().map(|p| p.0).collect::<Vec<_>>(), [2]);

        let out = build_schedule(&inst, EngineConfig::default());
        assert_eq!(out.scheduled().iter().map(|p| p.0).collect::<Vec<_>>(), [3]);
    }
}
