//! Small hand-made instances used across tests and documentation.
//!
//! The worked examples carry no global window or priorities of their own;
//! the windows chosen here are `[0, 10]`, `[2, 11]` and `[2, 10]`, and
//! priorities are assigned so that plans are tried in index order.

use crate::model::{
    Instance, Plan, PlanId, Predecessor, Resource, ResourceId, Task, TaskId, Time, TimeWindow,
};

/// `(index, r, d, p, resources, predecessors as (index, lag))`
type Row<'a> = (u32, Time, Time, Time, &'a [u32], &'a [(u32, Time)]);

fn plan(id: u32, priority: i64, rows: &[Row]) -> Plan {
    let tasks = rows
        .iter()
        .map(|&(index, r, d, p, res, preds)| {
            Task::new(
                TaskId::new(id, index),
                p,
                r,
                d,
                res.iter().copied().map(ResourceId),
                preds
                    .iter()
                    .map(|&(index, lag)| Predecessor { index, lag })
                    .collect(),
            )
            .expect("fixture task is valid")
        })
        .collect();
    Plan::new(PlanId(id), priority, tasks).expect("fixture plan is valid")
}

fn build(
    plans: Vec<Plan>,
    edges: &[(u32, u32)],
    resources: &[u32],
    window: (Time, Time),
) -> Instance {
    Instance::new(
        plans,
        edges.iter().map(|&(a, b)| (PlanId(a), PlanId(b))),
        resources.iter().copied().map(Resource::unary),
        TimeWindow::new(window.0, window.1).expect("fixture window is valid"),
    )
    .expect("fixture instance is valid")
}

/// Two plans, three tasks; `J^2_1 -> J^2_2`.
pub fn example1() -> Instance {
    build(
        vec![
            plan(1, 2, &[(1, 2, 7, 3, &[1], &[])]),
            plan(
                2,
                1,
                &[(1, 3, 8, 2, &[2], &[]), (2, 4, 9, 2, &[1], &[(1, 0)])],
            ),
        ],
        &[],
        &[1, 2],
        (0, 10),
    )
}

/// Five plans inserted in index order on three resources.
pub fn example2() -> Instance {
    build(
        vec![
            plan(
                1,
                5,
                &[(1, 1, 7, 4, &[1], &[]), (2, 5, 8, 2, &[3], &[(1, 1)])],
            ),
            plan(
                2,
                4,
                &[(1, 4, 7, 2, &[2], &[]), (2, 5, 9, 3, &[1], &[(1, 0)])],
            ),
            plan(3, 3, &[(1, 1, 8, 3, &[3], &[])]),
            plan(
                4,
                2,
                &[(1, 2, 7, 2, &[2], &[]), (2, 3, 7, 1, &[3], &[(1, 2)])],
            ),
            plan(
                5,
                1,
                &[(1, 5, 10, 3, &[2], &[]), (2, 5, 11, 1, &[1, 3], &[(1, 0)])],
            ),
        ],
        &[],
        &[1, 2, 3],
        (2, 11),
    )
}

/// Two committed plans followed by `Pi_3` and `Pi_4` sharing a priority.
pub fn idle_time() -> Instance {
    build(
        vec![
            plan(1, 3, &[(1, 2, 7, 3, &[1], &[])]),
            plan(2, 2, &[(1, 2, 6, 2, &[2], &[]), (2, 4, 10, 3, &[1], &[])]),
            plan(3, 1, &[(1, 4, 7, 2, &[3], &[])]),
            plan(
                4,
                1,
                &[(1, 3, 6, 1, &[4], &[]), (2, 2, 7, 3, &[2], &[(1, 0)])],
            ),
        ],
        &[],
        &[1, 2, 3, 4],
        (2, 10),
    )
}

/// One task whose release/due window lies after the global window.
pub fn late_task() -> Instance {
    build(
        vec![plan(1, 1, &[(1, 12, 15, 2, &[1], &[])])],
        &[],
        &[1],
        (0, 10),
    )
}

/// `Pi_1 -> Pi_2` where `Pi_1` can never fit.
pub fn blocked_chain() -> Instance {
    build(
        vec![
            plan(1, 2, &[(1, 0, 1, 3, &[1], &[])]),
            plan(2, 1, &[(1, 0, 10, 2, &[1], &[])]),
        ],
        &[(1, 2)],
        &[1],
        (0, 10),
    )
}

/// `Pi_1 -> Pi_3`, both of priority 2, with the lower-priority `Pi_2`
/// competing with `Pi_3` for the only slot on resource 1.
pub fn cross_frontier(first_fits: bool) -> Instance {
    let due = if first_fits { 4 } else { 0 };
    build(
        vec![
            plan(1, 2, &[(1, 0, due, 1, &[2], &[])]),
            plan(2, 1, &[(1, 0, 4, 3, &[1], &[])]),
            plan(3, 2, &[(1, 0, 4, 3, &[1], &[])]),
        ],
        &[(1, 3)],
        &[1, 2],
        (0, 4),
    )
}
