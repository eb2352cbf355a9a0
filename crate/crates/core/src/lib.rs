//! Scheduling of prioritized plans of tasks on unary resources.
//!
//! A plan is scheduled all-or-nothing inside a global time window. The
//! [`engine`] builds a feasible schedule with an event-list insertion
//! heuristic, [`validate`] checks any schedule independently, and
//! [`oracle`] computes exact optima on small instances.

pub mod engine;
pub mod events;
pub mod fixtures;
pub mod gantt;
pub mod io;
pub mod model;
pub mod oracle;
pub mod ordering;
pub mod random;
pub mod scenario;
pub mod validate;

pub use engine::{
    build_schedule, BuildOutcome, DeadlineRule, Engine, EngineConfig, GroupScope, IdleMetric,
};
pub use events::{Event, EventList};
pub use model::{
    Instance, ModelError, Plan, PlanId, Predecessor, Resource, ResourceId, Schedule, Task, TaskId,
    Time, TimeWindow,
};
pub use ordering::{sort_plans, topological_sort, FrontierPartition, PriorityOrder};

pub use oracle::{exact_max_weight, OracleOptions, OracleResult, SearchGrid};
pub use scenario::{generate_scenario, ScenarioError};
pub use validate::{validate_schedule, validate_schedule_with, ValidationReport, ViolationKind};
