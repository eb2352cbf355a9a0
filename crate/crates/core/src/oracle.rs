//! Exact maximization of Σ α over fully scheduled plans, for small
//! instances.
//!
//! The outer search walks the plans in topological order and branches on
//! including or excluding each one, pruned by the weight still available.
//! Every inclusion is checked by an inner search that assigns a start time
//! to each task of the selected plans.
//!
//! In the default event-aligned mode the inner search branches on which
//! ready task is placed next and puts it at the earliest instant where its
//! resources are free. Any feasible schedule can be left-shifted into one
//! produced this way without moving a task later, so no optimum is lost.
//! The full-grid mode instead tries every integer start in
//! `[est, latest]` for each task, which is slow but assumption-free.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::time::{Duration, Instant};

use crate::engine::DeadlineRule;
use crate::model::{Instance, Plan, PlanId, ResourceId, Schedule, Task, TaskId, Time};
use crate::ordering::topological_sort;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SearchGrid {
    #[default]
    EventAligned,
    Full,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct OracleOptions {
    pub node_limit: Option<u64>,
    pub time_limit: Option<Duration>,
    pub grid: SearchGrid,
    pub deadline_rule: DeadlineRule,
    /// A plan may only be selected when all of its predecessor plans are.
    pub strict_plan_precedence: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub optimum: i64,
    pub witness: Schedule,
    pub explored: u64,
    /// Set when a node or time limit stopped the search early; `optimum`
    /// is then only the best value found so far.
    pub time_limit_hit: bool,
}

impl OracleResult {
    /// The time-indexed decision `y_{task,t}`: whether `task` starts at `t`.
    pub fn starts_at(&self, task: TaskId, t: Time) -> bool {
        self.witness.start(task) == Some(t)
    }
}

struct Budget {
    explored: u64,
    node_limit: Option<u64>,
    deadline: Option<Instant>,
    exhausted: bool,
}

impl Budget {
    fn tick(&mut self) -> bool {
        self.explored += 1;
        if self.node_limit.is_some_and(|n| self.explored > n)
            || (self.explored.is_multiple_of(1024)
                && self.deadline.is_some_and(|d| Instant::now() >= d))
        {
            self.exhausted = true;
        }
        !self.exhausted
    }
}

struct Search<'a> {
    instance: &'a Instance,
    options: OracleOptions,
    order: Vec<&'a Plan>,
    /// Σ max(α, 0) over `order[i..]`.
    suffix_weight: Vec<i64>,
    budget: Budget,
    best: i64,
    best_witness: BTreeMap<TaskId, Time>,
}

/// Computes the best achievable Σ α for `instance`.
pub fn exact_max_weight(instance: &Instance, options: OracleOptions) -> OracleResult {
    let (topo, _) = topological_sort(instance);
    let order: Vec<&Plan> = topo
        .iter()
        .map(|&id| instance.plan(id).expect("known plan"))
        .collect();
    let mut suffix_weight = vec![0; order.len() + 1];
    for i in (0..order.len()).rev() {
        suffix_weight[i] = suffix_weight[i + 1] + order[i].priority().max(0);
    }
    let mut search = Search {
        instance,
        options,
        order,
        suffix_weight,
        budget: Budget {
            explored: 0,
            node_limit: options.node_limit,
            deadline: options.time_limit.map(|d| Instant::now() + d),
            exhausted: false,
        },
        best: 0,
        best_witness: BTreeMap::new(),
    };
    let mut selected = Vec::new();
    search.select(0, 0, &mut selected, &BTreeMap::new());

    let mut witness = Schedule::new();
    for (&task, &start) in &search.best_witness {
        witness.set_start(task, start);
    }
    let placed: BTreeSet<PlanId> = search.best_witness.keys().map(|t| t.plan).collect();
    for plan in instance.plans() {
        if placed.contains(&plan.id()) {
            witness.mark_scheduled(plan.id());
        } else {
            witness.mark_discarded(plan.id());
        }
    }
    OracleResult {
        optimum: search.best,
        witness,
        explored: search.budget.explored,
        time_limit_hit: search.budget.exhausted,
    }
}

impl<'a> Search<'a> {
    fn select(
        &mut self,
        depth: usize,
        weight: i64,
        selected: &mut Vec<&'a Plan>,
        current: &BTreeMap<TaskId, Time>,
    ) {
        if !self.budget.tick() {
            return;
        }
        if weight > self.best {
            self.best = weight;
            self.best_witness = current.clone();
        }
        if depth == self.order.len() || weight + self.suffix_weight[depth] <= self.best {
            return;
        }
        let plan = self.order[depth];

        let allowed = !self.options.strict_plan_precedence
            || self
                .instance
                .predecessors(plan.id())
                .all(|p| selected.iter().any(|s| s.id() == p));
        if allowed && plan.priority() > 0 {
            selected.push(plan);
            if let Some(starts) = self.feasible(selected) {
                self.select(depth + 1, weight + plan.priority(), selected, &starts);
            }
            selected.pop();
        }
        self.select(depth + 1, weight, selected, current);
    }

    /// A feasible assignment for every task of `plans`, if one exists.
    fn feasible(&mut self, plans: &[&'a Plan]) -> Option<BTreeMap<TaskId, Time>> {
        let tasks: Vec<&Task> = plans.iter().flat_map(|p| p.tasks()).collect();
        let mut placement = Placement::default();
        match self.options.grid {
            SearchGrid::EventAligned => {
                let mut seen = HashSet::new();
                self.list_search(&tasks, &mut placement, &mut seen)
            }
            SearchGrid::Full => self.grid_search(&tasks, 0, &mut placement),
        }
        .then_some(placement.starts)
    }

    fn earliest(&self, task: &Task, placement: &Placement) -> Option<Time> {
        let mut est = self.instance.window().start().max(task.release());
        for pred in task.predecessors() {
            let id = TaskId {
                plan: task.id().plan,
                index: pred.index,
            };
            let start = *placement.starts.get(&id)?;
            let p = self.instance.task(id).expect("known").processing_time();
            est = est.max(start + p + pred.lag);
        }
        Some(est)
    }

    fn latest(&self, task: &Task) -> Time {
        let window_bound = self.instance.window().end() - task.processing_time();
        let due_bound = match self.options.deadline_rule {
            DeadlineRule::Completion => task.due() - task.processing_time(),
            DeadlineRule::Start => task.due(),
        };
        window_bound.min(due_bound)
    }

    fn list_search(
        &mut self,
        tasks: &[&Task],
        placement: &mut Placement,
        seen: &mut HashSet<Vec<(TaskId, Time)>>,
    ) -> bool {
        if placement.starts.len() == tasks.len() {
            return true;
        }
        if !self.budget.tick() {
            return false;
        }
        let key: Vec<(TaskId, Time)> = placement.starts.iter().map(|(&k, &v)| (k, v)).collect();
        if !seen.insert(key) {
            return false;
        }
        for &task in tasks {
            if placement.starts.contains_key(&task.id()) {
                continue;
            }
            let Some(est) = self.earliest(task, placement) else {
                continue;
            };
            let Some(start) = placement.earliest_free(task, est) else {
                continue;
            };
            // More placements only push the earliest free slot later.
            if start > self.latest(task) {
                return false;
            }
            placement.place(task, start);
            if self.list_search(tasks, placement, seen) {
                return true;
            }
            placement.unplace(task, start);
            if self.budget.exhausted {
                return false;
            }
        }
        false
    }

    fn grid_search(&mut self, tasks: &[&Task], next: usize, placement: &mut Placement) -> bool {
        let Some(&task) = tasks.get(next) else {
            return true;
        };
        let Some(est) = self.earliest(task, placement) else {
            return false;
        };
        for start in est..=self.latest(task) {
            if !self.budget.tick() {
                return false;
            }
            if !placement.is_free(task, start) {
                continue;
            }
            placement.place(task, start);
            if self.grid_search(tasks, next + 1, placement) {
                return true;
            }
            placement.unplace(task, start);
        }
        false
    }
}

/// Start times plus per-resource busy intervals of a partial assignment.
#[derive(Default)]
struct Placement {
    starts: BTreeMap<TaskId, Time>,
    busy: BTreeMap<ResourceId, Vec<(Time, Time)>>,
}

impl Placement {
    fn is_free(&self, task: &Task, start: Time) -> bool {
        let end = start + task.processing_time();
        task.resources().iter().all(|r| {
            self.busy
                .get(r)
                .is_none_or(|iv| iv.iter().all(|&(s, e)| e <= start || end <= s))
        })
    }

    /// Earliest `t >= est` where the task's resources are free for its whole
    /// duration. Free stretches begin at `est` or at a busy interval's end.
    fn earliest_free(&self, task: &Task, est: Time) -> Option<Time> {
        let mut candidates: Vec<Time> = task
            .resources()
            .iter()
            .filter_map(|r| self.busy.get(r))
            .flatten()
            .map(|&(_, e)| e)
            .filter(|&e| e > est)
            .collect();
        candidates.push(est);
        candidates.sort_unstable();
        candidates.into_iter().find(|&t| self.is_free(task, t))
    }

    fn place(&mut self, task: &Task, start: Time) {
        self.starts.insert(task.id(), start);
        for &r in task.resources() {
            self.busy
                .entry(r)
                .or_default()
                .push((start, start + task.processing_time()));
        }
    }

    fn unplace(&mut self, task: &Task, start: Time) {
        self.starts.remove(&task.id());
        let interval = (start, start + task.processing_time());
        for r in task.resources() {
            if let Some(iv) = self.busy.get_mut(r) {
                if let Some(pos) = iv.iter().rposition(|&x| x == interval) {
                    iv.remove(pos);
                }
            }
        }
    }
}
