//! A 32-plan aerial mission benchmark and its eight variants.
//!
//! Each benchmark row gives one `[r, d]` window per plan; every task of the
//! plan gets that window. Task `i` of a plan runs on the `i`-th resource of
//! the plan's resource list.

use thiserror::Error;

use crate::model::{
    Instance, ModelError, Plan, PlanId, Predecessor, Resource, ResourceId, Task, TaskId, Time,
    TimeWindow,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("scenario {0} does not exist; choose 1 to 8")]
    BadScenario(u32),
    #[error(transparent)]
    Model(#[from] ModelError),
}

struct Row {
    id: u32,
    priority: i64,
    resources: &'static [u32],
    window: (Time, Time),
    processing: &'static [Time],
    /// Intra-plan edge `(i, j)`: `J_i` precedes `J_j`, lag 0.
    task_edge: Option<(u32, u32)>,
    /// Plan this row must follow.
    after: Option<u32>,
}

const QUAD: &[u32] = &[5, 9, 10, 11];
const QUAD6: &[u32] = &[6, 9, 10, 11];
const TRIPLE: &[u32] = &[1, 2, 10];
const PAIR34: &[u32] = &[3, 4];
const PAIR14: &[u32] = &[14, 10];
const P20: &[Time] = &[20, 20, 20, 20];
const P5: &[Time] = &[5, 5, 5];
const P2: &[Time] = &[2, 2];

const fn row(
    id: u32,
    priority: i64,
    resources: &'static [u32],
    window: (Time, Time),
    processing: &'static [Time],
    task_edge: Option<(u32, u32)>,
    after: Option<u32>,
) -> Row {
    Row {
        id,
        priority,
        resources,
        window,
        processing,
        task_edge,
        after,
    }
}

#[rustfmt::skip]
const BENCHMARK: [Row; 32] = [
    row(1, 3, &[1, 2], (0, 180), &[3, 3], Some((1, 2)), None),
    row(2, 3, PAIR34, (0, 180), &[4, 4], None, None),
    row(3, 3, &[5], (0, 180), &[3], None, None),
    row(4, 3, &[6], (0, 180), &[3], None, None),
    row(5, 3, &[7], (0, 180), &[1], None, None),
    row(6, 3, &[8], (0, 180), &[1], None, None),
    row(7, 1, QUAD, (80, 160), P20, Some((3, 4)), None),
    row(8, 1, QUAD, (40, 120), P20, Some((3, 4)), None),
    row(9, 1, QUAD, (40, 120), P20, Some((3, 4)), None),
    row(10, 5, TRIPLE, (50, 80), P5, Some((1, 2)), None),
    row(11, 5, QUAD, (80, 120), P20, Some((3, 4)), Some(10)),
    row(12, 1, QUAD, (0, 80), P20, Some((3, 4)), None),
    row(13, 5, TRIPLE, (0, 40), P5, Some((1, 2)), None),
    row(14, 5, QUAD, (40, 80), P20, Some((3, 4)), Some(13)),
    row(15, 6, TRIPLE, (0, 20), P5, Some((1, 2)), None),
    row(16, 6, QUAD, (20, 80), P20, Some((3, 4)), Some(15)),
    row(17, 8, PAIR34, (60, 120), P2, Some((1, 2)), None),
    row(18, 8, PAIR34, (60, 120), P2, Some((1, 2)), None),
    row(19, 8, PAIR34, (60, 120), P2, Some((1, 2)), None),
    row(20, 6, TRIPLE, (0, 20), P5, Some((1, 2)), None),
    row(21, 6, QUAD6, (20, 60), P20, Some((3, 4)), Some(20)),
    row(22, 6, PAIR14, (30, 70), P2, None, None),
    row(23, 1, QUAD6, (40, 90), P20, Some((3, 4)), None),
    row(24, 1, QUAD6, (80, 150), P20, Some((3, 4)), None),
    row(25, 1, QUAD6, (80, 130), P20, Some((3, 4)), None),
    row(26, 1, QUAD6, (130, 160), P20, Some((3, 4)), None),
    row(27, 4, PAIR14, (0, 180), P2, None, None),
    row(28, 6, TRIPLE, (80, 120), P5, Some((1, 2)), None),
    row(29, 6, PAIR34, (120, 140), P2, Some((1, 2)), Some(28)),
    row(30, 6, PAIR14, (120, 140), P2, None, None),
    row(31, 1, QUAD6, (150, 190), P20, Some((3, 4)), None),
    row(32, 4, PAIR34, (120, 140), P2, Some((1, 2)), None),
];

/// Editable copy of one benchmark row.
#[derive(Clone, Debug)]
struct PlanSpec {
    id: u32,
    priority: i64,
    resources: Vec<u32>,
    window: (Time, Time),
    processing: Vec<Time>,
    task_edge: Option<(u32, u32)>,
}

impl PlanSpec {
    fn to_plan(&self) -> Result<Plan, ModelError> {
        let tasks = self
            .processing
            .iter()
            .zip(&self.resources)
            .enumerate()
            .map(|(i, (&p, &res))| {
                let index = i as u32 + 1;
                let preds = match self.task_edge {
                    Some((from, to)) if to == index => vec![Predecessor {
                        index: from,
                        lag: 0,
                    }],
                    _ => vec![],
                };
                Task::new(
                    TaskId::new(self.id, index),
                    p,
                    self.window.0,
                    self.window.1,
                    [ResourceId(res)],
                    preds,
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        Plan::new(PlanId(self.id), self.priority, tasks)
    }
}

fn base() -> (Vec<PlanSpec>, Vec<(u32, u32)>) {
    let specs = BENCHMARK
        .iter()
        .map(|r| PlanSpec {
            id: r.id,
            priority: r.priority,
            resources: r.resources.to_vec(),
            window: r.window,
            processing: r.processing.to_vec(),
            task_edge: r.task_edge,
        })
        .collect();
    let edges = BENCHMARK
        .iter()
        .filter_map(|r| r.after.map(|a| (a, r.id)))
        .collect();
    (specs, edges)
}

/// Appends a copy of every plan accepted by `pick`, numbered after the
/// existing plans. Edges whose endpoints are both copied are copied too.
fn duplicate(
    specs: &mut Vec<PlanSpec>,
    edges: &mut Vec<(u32, u32)>,
    pick: impl Fn(&PlanSpec) -> bool,
) {
    let first = specs.iter().map(|s| s.id).max().unwrap_or(0) + 1;
    let mut copies = Vec::new();
    let mut renamed = std::collections::BTreeMap::new();
    for (id, spec) in (first..).zip(specs.iter().filter(|s| pick(s))) {
        renamed.insert(spec.id, id);
        copies.push(PlanSpec { id, ..spec.clone() });
    }
    let copied_edges: Vec<_> = edges
        .iter()
        .filter_map(|(a, b)| Some((*renamed.get(a)?, *renamed.get(b)?)))
        .collect();
    specs.extend(copies);
    edges.extend(copied_edges);
}

fn assemble(
    specs: &[PlanSpec],
    edges: &[(u32, u32)],
    window: (Time, Time),
) -> Result<Instance, ModelError> {
    let plans = specs
        .iter()
        .map(PlanSpec::to_plan)
        .collect::<Result<Vec<_>, _>>()?;
    let mut resources: Vec<u32> = specs
        .iter()
        .flat_map(|s| s.resources.iter().copied())
        .collect();
    resources.sort_unstable();
    resources.dedup();
    Instance::new(
        plans,
        edges.iter().map(|&(a, b)| (PlanId(a), PlanId(b))),
        resources.into_iter().map(Resource::unary),
        TimeWindow::new(window.0, window.1)?,
    )
}

/// Builds benchmark scenario `n`:
///
/// 1. the benchmark as listed, window `[0, 180]`;
/// 2. every plan window set to `[0, 180]` and `Pi_i -> Pi_j` for all `i < j`;
/// 3. release of plan `k` pushed back by `(k - 1) mod 7`, capped at its
///    due date, to spread task boundaries over more distinct instants;
/// 4. copies of the first ten plans of priority 6 or 8;
/// 5. copies of every plan of priority 1 or 3;
/// 6. window `[0, 90]`;
/// 7. window `[0, 270]`;
/// 8. a copy of every plan.
pub fn generate_scenario(n: u32) -> Result<Instance, ScenarioError> {
    let (mut specs, mut edges) = base();
    let mut window = (0, 180);
    match n {
        1 => {}
        2 => {
            for s in &mut specs {
                s.window = (0, 180);
            }
            edges = specs
                .iter()
                .flat_map(|a| {
                    specs
                        .iter()
                        .filter(move |b| a.id < b.id)
                        .map(move |b| (a.id, b.id))
                })
                .collect();
        }
        3 => {
            for s in &mut specs {
                let shifted = s.window.0 + Time::from((s.id - 1) % 7);
                s.window.0 = shifted.min(s.window.1);
            }
        }
        4 => {
            let mut taken = 0;
            let first_ten: Vec<u32> = specs
                .iter()
                .filter(|s| s.priority == 6 || s.priority == 8)
                .take_while(|_| {
                    taken += 1;
                    taken <= 10
                })
                .map(|s| s.id)
                .collect();
            duplicate(&mut specs, &mut edges, |s| first_ten.contains(&s.id));
        }
        5 => duplicate(&mut specs, &mut edges, |s| {
            s.priority == 1 || s.priority == 3
        }),
        6 => window = (0, 90),
        7 => window = (0, 270),
        8 => duplicate(&mut specs, &mut edges, |_| true),
        other => return Err(ScenarioError::BadScenario(other)),
    }
    Ok(assemble(&specs, &edges, window)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cardinalities_match_benchmark_table() {
        let expected = [
            (1, 32, 91),
            (2, 32, 91),
            (3, 32, 91),
            (4, 42, 118),
            (5, 47, 135),
            (6, 32, 91),
            (7, 32, 91),
            (8, 64, 182),
        ];
        for (n, plans, tasks) in expected {
            let inst = generate_scenario(n).unwrap();
            assert_eq!(
                (inst.plan_count(), inst.task_count()),
                (plans, tasks),
                "scenario {n}"
            );
        }
    }

    #[test]
    fn out_of_range_scenario_is_rejected() {
        assert_eq!(
            generate_scenario(0).unwrap_err(),
            ScenarioError::BadScenario(0)
        );
        assert_eq!(
            generate_scenario(9).unwrap_err(),
            ScenarioError::BadScenario(9)
        );
    }

    #[test]
    fn scenario_one_shape() {
        let inst = generate_scenario(1).unwrap();
        assert_eq!(inst.window(), TimeWindow::new(0, 180).unwrap());
        assert_eq!(inst.plan_edges().len(), 5);
        let p7 = inst.plan(PlanId(7)).unwrap();
        assert_eq!(
            p7.task(4).unwrap().predecessors(),
            &[Predecessor { index: 3, lag: 0 }]
        );
        assert_eq!(
            p7.task(2).unwrap().resources().iter().next(),
            Some(&ResourceId(9))
        );
        assert_eq!(inst.plan(PlanId(31)).unwrap().tasks()[0].due(), 190);
    }

    #[test]
    fn duplicates_copy_internal_edges() {
        let inst = generate_scenario(8).unwrap();
        assert_eq!(inst.plan_edges().len(), 10);
        let inst = generate_scenario(4).unwrap();
        // 15->16, 20->21, 28->29 and their copies.
        assert_eq!(inst.plan_edges().len(), 5 + 3);
    }

    #[test]
    fn chain_scenario_orders_everything() {
        let inst = generate_scenario(2).unwrap();
        assert_eq!(inst.plan_edges().len(), 32 * 31 / 2);
        assert!(inst.tasks().all(|t| t.release() == 0 && t.due() == 180));
    }
}
