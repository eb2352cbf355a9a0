//! Domain types: plans, tasks, resources, instances and schedules.
//!
//! Everything that reaches the engine goes through [`Instance::new`], which
//! rejects cyclic precedence graphs, unknown resources and inconsistent
//! timing data. Times are integer ticks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A discrete time instant.
pub type Time = i64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PlanId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ResourceId(pub u32);

/// Identifies task `index` of plan `plan` (`J^plan_index`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TaskId {
    pub plan: PlanId,
    pub index: u32,
}

impl TaskId {
    pub fn new(plan: u32, index: u32) -> Self {
        Self {
            plan: PlanId(plan),
            index,
        }
    }
}

impl fmt::Display for PlanId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pi_{}", self.0)
    }
}

impl fmt::Display for ResourceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rho_{}", self.0)
    }
}

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "J^{}_{}", self.plan.0, self.index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("plan precedence graph contains a cycle through {0}")]
    CyclicPlanDag(PlanId),
    #[error("task precedence graph of {0} contains a cycle")]
    CyclicTaskGraph(PlanId),
    #[error("{task} references undeclared resource {resource}")]
    UnknownResource { task: TaskId, resource: ResourceId },
    #[error("bad time window: {0}")]
    BadWindow(String),
    #[error("{task} has predecessor index {predecessor} which is not part of the plan")]
    UnknownPredecessor { task: TaskId, predecessor: u32 },
    #[error("{task} was handed to plan {plan}")]
    ForeignTask { plan: PlanId, task: TaskId },
    #[error("precedence edge references unknown plan {0}")]
    UnknownPlan(PlanId),
    #[error("duplicate plan id {0}")]
    DuplicatePlan(PlanId),
    #[error("duplicate task {0}")]
    DuplicateTask(TaskId),
    #[error("duplicate resource id {0}")]
    DuplicateResource(ResourceId),
    #[error("plan {0} has no tasks")]
    EmptyPlan(PlanId),
    #[error("{0} has an empty resource set")]
    EmptyResourceSet(TaskId),
    #[error(
        "resource {resource} has availability {availability}; only unary resources are supported"
    )]
    UnsupportedAvailability {
        resource: ResourceId,
        availability: u32,
    },
}

/// A closed interval of time instants `[start, end]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeWindow {
    start: Time,
    end: Time,
}

impl TimeWindow {
    pub fn new(start: Time, end: Time) -> Result<Self, ModelError> {
        if start > end {
            return Err(ModelError::BadWindow(format!(
                "window start {start} is after its end {end}"
            )));
        }
        Ok(Self { start, end })
    }

    pub fn start(&self) -> Time {
        self.start
    }

    pub fn end(&self) -> Time {
        self.end
    }

    pub fn contains(&self, t: Time) -> bool {
        self.start <= t && t <= self.end
    }

    pub fn len(&self) -> Time {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

/// Precedence edge stored on the successor: the predecessor's task index
/// and the minimum gap between its completion and our start.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Predecessor {
    pub index: u32,
    pub lag: Time,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Task {
    id: TaskId,
    processing_time: Time,
    release: Time,
    due: Time,
    resources: BTreeSet<ResourceId>,
    predecessors: Vec<Predecessor>,
}

impl Task {
    pub fn new(
        id: TaskId,
        processing_time: Time,
        release: Time,
        due: Time,
        resources: impl IntoIterator<Item = ResourceId>,
        predecessors: Vec<Predecessor>,
    ) -> Result<Self, ModelError> {
        if processing_time < 1 {
            return Err(ModelError::BadWindow(format!(
                "{id} has processing time {processing_time} < 1"
            )));
        }
        if release > due {
            return Err(ModelError::BadWindow(format!(
                "{id} has release {release} after due date {due}"
            )));
        }
        if let Some(p) = predecessors.iter().find(|p| p.lag < 0) {
            return Err(ModelError::BadWindow(format!(
                "{id} has negative lag {} from task {}",
                p.lag, p.index
            )));
        }
        let resources: BTreeSet<_> = resources.into_iter().collect();
        if resources.is_empty() {
            return Err(ModelError::EmptyResourceSet(id));
        }
        Ok(Self {
            id,
            processing_time,
            release,
            due,
            resources,
            predecessors,
        })
    }

    pub fn id(&self) -> TaskId {
        self.id
    }

    pub fn processing_time(&self) -> Time {
        self.processing_time
    }

    pub fn release(&self) -> Time {
        self.release
    }

    pub fn due(&self) -> Time {
        self.due
    }

    pub fn resources(&self) -> &BTreeSet<ResourceId> {
        &self.resources
    }

    pub fn predecessors(&self) -> &[Predecessor] {
        &self.predecessors
    }

    /// `C = s + p`.
    pub fn completion_time(&self, start: Time) -> Time {
        start + self.processing_time
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plan {
    id: PlanId,
    priority: i64,
    tasks: Vec<Task>,
}

impl Plan {
    /// Builds a plan, reordering its tasks so that every predecessor comes
    /// before its successors. The relative input order is kept wherever the
    /// precedence graph allows it.
    pub fn new(id: PlanId, priority: i64, tasks: Vec<Task>) -> Result<Self, ModelError> {
        if tasks.is_empty() {
            return Err(ModelError::EmptyPlan(id));
        }
        let mut position = BTreeMap::new();
        for (pos, task) in tasks.iter().enumerate() {
            if task.id.plan != id {
                return Err(ModelError::ForeignTask {
                    plan: id,
                    task: task.id,
                });
            }
            if position.insert(task.id.index, pos).is_some() {
                return Err(ModelError::DuplicateTask(task.id));
            }
        }
        for task in &tasks {
            for pred in &task.predecessors {
                if pred.index == task.id.index {
                    return Err(ModelError::CyclicTaskGraph(id));
                }
                if !position.contains_key(&pred.index) {
                    return Err(ModelError::UnknownPredecessor {
                        task: task.id,
                        predecessor: pred.index,
                    });
                }
            }
        }

        // Kahn's algorithm, always releasing the lowest input position first.
        let n = tasks.len();
        let mut indegree = vec![0usize; n];
        let mut successors = vec![Vec::new(); n];
        for (pos, task) in tasks.iter().enumerate() {
            for pred in &task.predecessors {
                let from = position[&pred.index];
                successors[from].push(pos);
                indegree[pos] += 1;
            }
        }
        let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(pos) = ready.pop_first() {
            order.push(pos);
            for &succ in &successors[pos] {
                indegree[succ] -= 1;
                if indegree[succ] == 0 {
                    ready.insert(succ);
                }
            }
        }
        if order.len() != n {
            return Err(ModelError::CyclicTaskGraph(id));
        }

        let mut slots: Vec<Option<Task>> = tasks.into_iter().map(Some).collect();
        let tasks = order
            .into_iter()
            .map(|pos| slots[pos].take().expect("each position visited once"))
            .collect();
        Ok(Self {
            id,
            priority,
            tasks,
        })
    }

    pub fn id(&self) -> PlanId {
        self.id
    }

    pub fn priority(&self) -> i64 {
        self.priority
    }

    /// Tasks in a precedence-consistent order.
    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn task_count(&self) -> usize {
        self.tasks.len()
    }

    pub fn task(&self, index: u32) -> Option<&Task> {
        self.tasks.iter().find(|t| t.id.index == index)
    }

    /// Union of the resource sets of all tasks.
    pub fn resources(&self) -> BTreeSet<ResourceId> {
        self.tasks
            .iter()
            .flat_map(|t| t.resources.iter().copied())
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resource {
    pub id: ResourceId,
    pub availability: u32,
}

impl Resource {
    pub fn unary(id: u32) -> Self {
        Self {
            id: ResourceId(id),
            availability: 1,
        }
    }
}

/// A complete scheduling problem. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    plans: Vec<Plan>,
    plan_index: BTreeMap<PlanId, usize>,
    plan_edges: BTreeSet<(PlanId, PlanId)>,
    resources: BTreeMap<ResourceId, Resource>,
    window: TimeWindow,
}

impl Instance {
    pub fn new(
        plans: Vec<Plan>,
        plan_edges: impl IntoIterator<Item = (PlanId, PlanId)>,
        resources: impl IntoIterator<Item = Resource>,
        window: TimeWindow,
    ) -> Result<Self, ModelError> {
        let mut resource_map = BTreeMap::new();
        for res in resources {
            if res.availability != 1 {
                return Err(ModelError::UnsupportedAvailability {
                    resource: res.id,
                    availability: res.availability,
                });
            }
            if resource_map.insert(res.id, res).is_some() {
                return Err(ModelError::DuplicateResource(res.id));
            }
        }

        let mut plan_index = BTreeMap::new();
        for (pos, plan) in plans.iter().enumerate() {
            if plan_index.insert(plan.id, pos).is_some() {
                return Err(ModelError::DuplicatePlan(plan.id));
            }
            for task in &plan.tasks {
                if let Some(&resource) = task
                    .resources
                    .iter()
                    .find(|r| !resource_map.contains_key(r))
                {
                    return Err(ModelError::UnknownResource {
                        task: task.id,
                        resource,
                    });
                }
            }
        }

        let plan_edges: BTreeSet<_> = plan_edges.into_iter().collect();
        for &(from, to) in &plan_edges {
            for id in [from, to] {
                if !plan_index.contains_key(&id) {
                    return Err(ModelError::UnknownPlan(id));
                }
            }
            if from == to {
                return Err(ModelError::CyclicPlanDag(from));
            }
        }

        let instance = Self {
            plans,
            plan_index,
            plan_edges,
            resources: resource_map,
            window,
        };
        instance.check_plan_dag()?;
        Ok(instance)
    }

    fn check_plan_dag(&self) -> Result<(), ModelError> {
        let mut indegree: BTreeMap<PlanId, usize> = self.plans.iter().map(|p| (p.id, 0)).collect();
        for (_, to) in &self.plan_edges {
            *indegree.get_mut(to).expect("edge endpoints validated") += 1;
        }
        let mut ready: Vec<PlanId> = indegree
            .iter()
            .filter(|(_, &d)| d == 0)
            .map(|(&id, _)| id)
            .collect();
        let mut seen = 0;
        while let Some(id) = ready.pop() {
            seen += 1;
            for succ in self.successors(id) {
                let d = indegree.get_mut(&succ).expect("edge endpoints validated");
                *d -= 1;
                if *d == 0 {
                    ready.push(succ);
                }
            }
        }
        if seen != self.plans.len() {
            let culprit = indegree
                .iter()
                .find(|(_, &d)| d > 0)
                .map(|(&id, _)| id)
                .expect("a cycle leaves some plan with positive in-degree");
            return Err(ModelError::CyclicPlanDag(culprit));
        }
        Ok(())
    }

    /// Plans in input order.
    pub fn plans(&self) -> &[Plan] {
        &self.plans
    }

    pub fn plan(&self, id: PlanId) -> Option<&Plan> {
        self.plan_index.get(&id).map(|&pos| &self.plans[pos])
    }

    pub fn task(&self, id: TaskId) -> Option<&Task> {
        self.plan(id.plan).and_then(|p| p.task(id.index))
    }

    pub fn plan_edges(&self) -> &BTreeSet<(PlanId, PlanId)> {
        &self.plan_edges
    }

    pub fn successors(&self, id: PlanId) -> impl Iterator<Item = PlanId> + '_ {
        self.plan_edges
            .range((id, PlanId(0))..=(id, PlanId(u32::MAX)))
            .map(|&(_, to)| to)
    }

    pub fn predecessors(&self, id: PlanId) -> impl Iterator<Item = PlanId> + '_ {
        self.plan_edges
            .iter()
            .filter(move |&&(_, to)| to == id)
            .map(|&(from, _)| from)
    }

    pub fn resources(&self) -> impl Iterator<Item = &Resource> {
        self.resources.values()
    }

    pub fn resource_ids(&self) -> impl Iterator<Item = ResourceId> + '_ {
        self.resources.keys().copied()
    }

    pub fn window(&self) -> TimeWindow {
        self.window
    }

    pub fn plan_count(&self) -> usize {
        self.plans.len()
    }

    pub fn task_count(&self) -> usize {
        self.plans.iter().map(Plan::task_count).sum()
    }

    pub fn tasks(&self) -> impl Iterator<Item = &Task> {
        self.plans.iter().flat_map(|p| p.tasks.iter())
    }
}

/// Start times of placed tasks plus the scheduled/discarded plan sets.
///
/// Completion times are never stored; they are derived from the instance.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Schedule {
    starts: BTreeMap<TaskId, Time>,
    scheduled: BTreeSet<PlanId>,
    discarded: BTreeSet<PlanId>,
}

impl Schedule {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn start(&self, task: TaskId) -> Option<Time> {
        self.starts.get(&task).copied()
    }

    pub fn set_start(&mut self, task: TaskId, start: Time) {
        self.starts.insert(task, start);
    }

    pub fn starts(&self) -> &BTreeMap<TaskId, Time> {
        &self.starts
    }

    /// Drops every start time belonging to `plan`.
    pub fn clear_plan(&mut self, plan: PlanId) {
        self.starts.retain(|id, _| id.plan != plan);
    }

    pub fn starts_of(&self, plan: PlanId) -> impl Iterator<Item = (TaskId, Time)> + '_ {
        self.starts
            .range(
                TaskId { plan, index: 0 }..=TaskId {
                    plan,
                    index: u32::MAX,
                },
            )
            .map(|(&id, &s)| (id, s))
    }

    pub fn scheduled(&self) -> &BTreeSet<PlanId> {
        &self.scheduled
    }

    pub fn discarded(&self) -> &BTreeSet<PlanId> {
        &self.discarded
    }

    pub fn mark_scheduled(&mut self, plan: PlanId) {
        self.discarded.remove(&plan);
        self.scheduled.insert(plan);
    }

    /// Marks `plan` as discarded and drops any starts it still had.
    pub fn mark_discarded(&mut self, plan: PlanId) {
        self.clear_plan(plan);
        self.scheduled.remove(&plan);
        self.discarded.insert(plan);
    }

    pub fn is_empty(&self) -> bool {
        self.starts.is_empty()
    }

    /// `C = s + p` for a placed task, or `None` when unplaced or unknown.
    pub fn completion(&self, instance: &Instance, task: TaskId) -> Option<Time> {
        let start = self.start(task)?;
        instance.task(task).map(|t| t.completion_time(start))
    }
}
