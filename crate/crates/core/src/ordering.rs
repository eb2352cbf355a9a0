//! Plan ordering: frontier decomposition of the plan precedence DAG, then
//! priority order inside each frontier.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{Instance, PlanId};

/// Which end of the priority scale is scheduled first.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriorityOrder {
    /// Larger priority values first.
    #[default]
    Desc,
    Asc,
}

/// Plans grouped by their longest edge-distance from a root of the DAG.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrontierPartition {
    frontiers: Vec<Vec<PlanId>>,
    frontier_of: BTreeMap<PlanId, usize>,
}

impl FrontierPartition {
    pub fn frontiers(&self) -> &[Vec<PlanId>] {
        &self.frontiers
    }

    /// Zero-based frontier index of `plan`.
    pub fn frontier_of(&self, plan: PlanId) -> Option<usize> {
        self.frontier_of.get(&plan).copied()
    }

    pub fn len(&self) -> usize {
        self.frontiers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frontiers.is_empty()
    }
}

/// Topological order of the plans together with their frontiers.
///
/// The order lists frontier 0 first, then frontier 1 and so on; inside a
/// frontier plans keep their input order.
pub fn topological_sort(instance: &Instance) -> (Vec<PlanId>, FrontierPartition) {
    let mut indegree: BTreeMap<PlanId, usize> =
        instance.plans().iter().map(|p| (p.id(), 0)).collect();
    for &(_, to) in instance.plan_edges() {
        *indegree.get_mut(&to).expect("validated edge") += 1;
    }

    // Kahn's algorithm while relaxing longest distances.
    let mut depth: BTreeMap<PlanId, usize> = BTreeMap::new();
    let mut queue: std::collections::VecDeque<PlanId> = instance
        .plans()
        .iter()
        .map(|p| p.id())
        .filter(|id| indegree[id] == 0)
        .collect();
    for &id in &queue {
        depth.insert(id, 0);
    }
    while let Some(id) = queue.pop_front() {
        let d = depth[&id];
        for succ in instance.successors(id) {
            let entry = depth.entry(succ).or_insert(0);
            *entry = (*entry).max(d + 1);
            let deg = indegree.get_mut(&succ).expect("validated edge");
            *deg -= 1;
            if *deg == 0 {
                queue.push_back(succ);
            }
        }
    }

    let count = depth.values().map(|&d| d + 1).max().unwrap_or(0);
    let mut frontiers = vec![Vec::new(); count];
    for plan in instance.plans() {
        let d = depth[&plan.id()];
        frontiers[d].push(plan.id());
    }
    let order = frontiers.iter().flatten().copied().collect();
    (
        order,
        FrontierPartition {
            frontiers,
            frontier_of: depth,
        },
    )
}

/// Plans in scheduling order: frontier by frontier, and inside a frontier by
/// priority. Equal priorities keep input order.
pub fn sort_plans(instance: &Instance, order: PriorityOrder) -> Vec<PlanId> {
    let (_, partition) = topological_sort(instance);
    let priority = |id: &PlanId| instance.plan(*id).expect("known plan").priority();
    let mut sorted = Vec::with_capacity(instance.plan_count());
    for frontier in partition.frontiers() {
        let mut group = frontier.clone();
        match order {
            PriorityOrder::Desc => group.sort_by_key(|id| std::cmp::Reverse(priority(id))),
            PriorityOrder::Asc => group.sort_by_key(priority),
        }
        sorted.extend(group);
    }
    sorted
}
