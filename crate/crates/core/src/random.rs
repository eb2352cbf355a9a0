//! Seeded random instances for property tests and oracle comparisons.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::model::{
    Instance, Plan, PlanId, Predecessor, Resource, ResourceId, Task, TaskId, Time, TimeWindow,
};

/// Environment variable that overrides the default seed.
pub const SEED_VAR: &str = "PLANSCHED_SEED";

/// Shape of generated instances. Counts are upper bounds; each instance
/// draws its own sizes from `1..=max`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomParams {
    pub max_plans: usize,
    pub max_tasks: usize,
    /// Global window is `[0, horizon]`.
    pub horizon: Time,
    pub max_processing: Time,
    /// Size of the shared resource pool. Ignored when resources are
    /// disjoint.
    pub resources: u32,
    /// Give every task its own resource.
    pub disjoint_resources: bool,
    /// Chance of each forward edge between plans.
    pub plan_edge_chance: f64,
    /// Chance that a task depends on an earlier task of its plan.
    pub task_edge_chance: f64,
    pub max_lag: Time,
    pub max_priority: i64,
}

impl Default for RandomParams {
    fn default() -> Self {
        Self {
            max_plans: 4,
            max_tasks: 2,
            horizon: 20,
            max_processing: 5,
            resources: 3,
            disjoint_resources: false,
            plan_edge_chance: 0.2,
            task_edge_chance: 0.5,
            max_lag: 2,
            max_priority: 5,
        }
    }
}

/// Seed from `PLANSCHED_SEED` if it is set and parses, else `default`.
pub fn seed_from_env(default: u64) -> u64 {
    std::env::var(SEED_VAR)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(default)
}

pub fn rng_from_seed(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Draws one valid instance.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, params: &RandomParams) -> Instance {
    let horizon = params.horizon.max(1);
    let plan_count = rng.random_range(1..=params.max_plans.max(1));
    let mut next_resource = 1u32;
    let mut used = std::collections::BTreeSet::new();

    let plans: Vec<Plan> = (1..=plan_count as u32)
        .map(|k| {
            let task_count = rng.random_range(1..=params.max_tasks.max(1)) as u32;
            let tasks = (1..=task_count)
                .map(|i| {
                    let p = rng.random_range(1..=params.max_processing.max(1));
                    let r = rng.random_range(0..horizon);
                    let d = rng.random_range(r..=horizon + 2);
                    let resources: Vec<u32> = if params.disjoint_resources {
                        next_resource += 1;
                        vec![next_resource - 1]
                    } else {
                        let pool = params.resources.max(1);
                        let first = rng.random_range(1..=pool);
                        let mut res = vec![first];
                        if pool > 1 && rng.random_bool(0.2) {
                            res.push(rng.random_range(1..=pool));
                        }
                        res
                    };
                    used.extend(resources.iter().copied());
                    let predecessors = if i > 1 && rng.random_bool(params.task_edge_chance) {
                        vec![Predecessor {
                            index: rng.random_range(1..i),
                            lag: rng.random_range(0..=params.max_lag.max(0)),
                        }]
                    } else {
                        Vec::new()
                    };
                    Task::new(
                        TaskId::new(k, i),
                        p,
                        r,
                        d,
                        resources.into_iter().map(ResourceId),
                        predecessors,
                    )
                    .expect("generated task is valid")
                })
                .collect();
            let priority = rng.random_range(1..=params.max_priority.max(1));
            Plan::new(PlanId(k), priority, tasks).expect("generated plan is valid")
        })
        .collect();

    let mut edges = Vec::new();
    for a in 1..=plan_count as u32 {
        for b in a + 1..=plan_count as u32 {
            if rng.random_bool(params.plan_edge_chance) {
                edges.push((PlanId(a), PlanId(b)));
            }
        }
    }

    Instance::new(
        plans,
        edges,
        used.into_iter().map(Resource::unary),
        TimeWindow::new(0, horizon).expect("horizon is positive"),
    )
    .expect("generated instance is valid")
}
