//! JSON formats for instances and schedules.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::events::EventList;
use crate::model::{
    Instance, ModelError, Plan, PlanId, Predecessor, Resource, ResourceId, Schedule, Task, TaskId,
    Time, TimeWindow,
};
use crate::validate::objective;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("parse error at `{path}` (line {line}, column {column}): {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{}: {source}", file.display())]
    Io {
        file: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowEntry {
    pub start: Time,
    pub end: Time,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskEntry {
    pub index: u32,
    pub p: Time,
    pub r: Time,
    pub d: Time,
    pub resources: Vec<u32>,
    #[serde(default)]
    pub predecessors: Vec<Predecessor>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanEntry {
    pub id: u32,
    pub priority: i64,
    #[serde(default)]
    pub precedes: Vec<u32>,
    pub tasks: Vec<TaskEntry>,
}

/// On-disk form of an [`Instance`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub window: WindowEntry,
    pub resources: Vec<Resource>,
    pub plans: Vec<PlanEntry>,
}

impl InstanceFile {
    pub fn from_instance(instance: &Instance) -> Self {
        let plans = instance
            .plans()
            .iter()
            .map(|plan| PlanEntry {
                id: plan.id().0,
                priority: plan.priority(),
                precedes: instance.successors(plan.id()).map(|s| s.0).collect(),
                tasks: plan
                    .tasks()
                    .iter()
                    .map(|t| TaskEntry {
                        index: t.id().index,
                        p: t.processing_time(),
                        r: t.release(),
                        d: t.due(),
                        resources: t.resources().iter().map(|r| r.0).collect(),
                        predecessors: t.predecessors().to_vec(),
                    })
                    .collect(),
            })
            .collect();
        Self {
            window: WindowEntry {
                start: instance.window().start(),
                end: instance.window().end(),
            },
            resources: instance.resources().copied().collect(),
            plans,
        }
    }

    pub fn to_instance(&self) -> Result<Instance, ModelError> {
        let plans = self
            .plans
            .iter()
            .map(|entry| {
                let tasks = entry
                    .tasks
                    .iter()
                    .map(|t| {
                        Task::new(
                            TaskId::new(entry.id, t.index),
                            t.p,
                            t.r,
                            t.d,
                            t.resources.iter().copied().map(ResourceId),
                            t.predecessors.clone(),
                        )
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Plan::new(PlanId(entry.id), entry.priority, tasks)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let edges = self
            .plans
            .iter()
            .flat_map(|p| p.precedes.iter().map(move |&s| (PlanId(p.id), PlanId(s))));
        Instance::new(
            plans,
            edges,
            self.resources.iter().copied(),
            TimeWindow::new(self.window.start, self.window.end)?,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StartEntry {
    pub plan: u32,
    pub task: u32,
    pub start: Time,
    pub completion: Time,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventEntry {
    pub t: Time,
    pub starting: Vec<TaskId>,
    pub completing: Vec<TaskId>,
    /// Occupancy of every resource over `[t, next event)`.
    pub usage: BTreeMap<u32, u8>,
}

/// On-disk form of a [`Schedule`], with derived fields for readers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleFile {
    pub starts: Vec<StartEntry>,
    pub scheduled: Vec<u32>,
    pub discarded: Vec<u32>,
    pub objective: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub events: Option<Vec<EventEntry>>,
}

impl ScheduleFile {
    /// Fails with [`ModelError::UnknownPlan`] if the schedule names a task
    /// the instance does not have.
    pub fn new(
        instance: &Instance,
        schedule: &Schedule,
        events: Option<&EventList>,
    ) -> Result<Self, ModelError> {
        let starts = schedule
            .starts()
            .iter()
            .map(|(&id, &start)| {
                let task = instance.task(id).ok_or(ModelError::UnknownPlan(id.plan))?;
                Ok(StartEntry {
                    plan: id.plan.0,
                    task: id.index,
                    start,
                    completion: task.completion_time(start),
                })
            })
            .collect::<Result<Vec<_>, ModelError>>()?;
        let events = events.map(|list| {
            list.iter()
                .map(|e| EventEntry {
                    t: e.time(),
                    starting: e.starting().iter().copied().collect(),
                    completing: e.completing().iter().copied().collect(),
                    usage: instance.resource_ids().map(|r| (r.0, e.usage(r))).collect(),
                })
                .collect()
        });
        Ok(Self {
            starts,
            scheduled: schedule.scheduled().iter().map(|p| p.0).collect(),
            discarded: schedule.discarded().iter().map(|p| p.0).collect(),
            objective: objective(instance, schedule),
            events,
        })
    }

    pub fn to_schedule(&self) -> Schedule {
        let mut schedule = Schedule::new();
        for id in &self.scheduled {
            schedule.mark_scheduled(PlanId(*id));
        }
        for id in &self.discarded {
            schedule.mark_discarded(PlanId(*id));
        }
        for s in &self.starts {
            schedule.set_start(TaskId::new(s.plan, s.task), s.start);
        }
        schedule
    }
}

fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, IoError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|err| {
        let path = err.path().to_string();
        let inner = err.into_inner();
        IoError::Parse {
            path,
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })
}

fn read(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Io {
        file: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|source| IoError::Io {
        file: path.to_path_buf(),
        source,
    })
}

pub fn instance_from_str(text: &str) -> Result<Instance, IoError> {
    let file: InstanceFile = from_json(text)?;
    Ok(file.to_instance()?)
}

pub fn instance_to_string(instance: &Instance) -> String {
    let mut text = serde_json::to_string_pretty(&InstanceFile::from_instance(instance))
        .expect("instance serializes");
    text.push('\n');
    text
}

pub fn parse_instance(path: impl AsRef<Path>) -> Result<Instance, IoError> {
    instance_from_str(&read(path.as_ref())?)
}

pub fn write_instance(instance: &Instance, path: impl AsRef<Path>) -> Result<(), IoError> {
    write(path.as_ref(), &instance_to_string(instance))
}

pub fn schedule_from_str(text: &str) -> Result<ScheduleFile, IoError> {
    from_json(text)
}

pub fn schedule_to_string(file: &ScheduleFile) -> String {
    let mut text = serde_json::to_string_pretty(file).expect("schedule serializes");
    text.push('\n');
    text
}

pub fn parse_schedule(path: impl AsRef<Path>) -> Result<ScheduleFile, IoError> {
    schedule_from_str(&read(path.as_ref())?)
}

pub fn emit_schedule(file: &ScheduleFile, path: impl AsRef<Path>) -> Result<(), IoError> {
    write(path.as_ref(), &schedule_to_string(file))
}
