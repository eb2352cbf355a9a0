//! Time-ordered event list backing the insertion heuristic.
//!
//! An event at time `t` records the tasks starting and completing exactly at
//! `t` and which resources are busy during `[t, next event)`. A fresh list
//! holds a single empty event at the window start; every other event is kept
//! only while some task starts or completes there.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Bound;

use serde::{Deserialize, Serialize};

use crate::model::{ResourceId, Task, TaskId, Time};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    time: Time,
    starting: BTreeSet<TaskId>,
    completing: BTreeSet<TaskId>,
    busy: BTreeSet<ResourceId>,
}

impl Event {
    fn empty(time: Time, busy: BTreeSet<ResourceId>) -> Self {
        Self {
            time,
            starting: BTreeSet::new(),
            completing: BTreeSet::new(),
            busy,
        }
    }

    pub fn time(&self) -> Time {
        self.time
    }

    pub fn starting(&self) -> &BTreeSet<TaskId> {
        &self.starting
    }

    pub fn completing(&self) -> &BTreeSet<TaskId> {
        &self.completing
    }

    /// Resources with usage 1 during `[time, next event)`.
    pub fn busy(&self) -> &BTreeSet<ResourceId> {
        &self.busy
    }

    /// `b_rho(e)`, either 0 or 1.
    pub fn usage(&self, resource: ResourceId) -> u8 {
        u8::from(self.busy.contains(&resource))
    }

    fn is_idle_marker(&self) -> bool {
        self.starting.is_empty() && self.completing.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventList {
    origin: Time,
    events: BTreeMap<Time, Event>,
}

impl EventList {
    /// A list holding only the sentinel event at `origin`.
    pub fn new(origin: Time) -> Self {
        let mut events = BTreeMap::new();
        events.insert(origin, Event::empty(origin, BTreeSet::new()));
        Self { origin, events }
    }

    pub fn origin(&self) -> Time {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Event> {
        self.events.values()
    }

    pub fn times(&self) -> impl Iterator<Item = Time> + '_ {
        self.events.keys().copied()
    }

    pub fn get(&self, t: Time) -> Option<&Event> {
        self.events.get(&t)
    }

    /// The event whose interval covers `t`: the last one at or before `t`.
    pub fn covering(&self, t: Time) -> Option<&Event> {
        self.events.range(..=t).next_back().map(|(_, e)| e)
    }

    /// First event strictly after `t`.
    pub fn next_after(&self, t: Time) -> Option<&Event> {
        self.events
            .range((Bound::Excluded(t), Bound::Unbounded))
            .next()
            .map(|(_, e)| e)
    }

    /// Last event strictly before `t`.
    pub fn prev_before(&self, t: Time) -> Option<&Event> {
        self.events.range(..t).next_back().map(|(_, e)| e)
    }

    /// Returns the event at `t`, creating it when absent. A created event
    /// inherits the usage of the event covering `t`, since splitting an
    /// interval does not change what occupies it.
    pub fn get_or_insert(&mut self, t: Time) -> &mut Event {
        if !self.events.contains_key(&t) {
            let busy = self.covering(t).map(|e| e.busy.clone()).unwrap_or_default();
            self.events.insert(t, Event::empty(t, busy));
        }
        self.events.get_mut(&t).expect("just ensured present")
    }

    /// True when none of `resources` is used anywhere in `[start, end)`.
    pub fn is_free(&self, resources: &BTreeSet<ResourceId>, start: Time, end: Time) -> bool {
        let clash = |e: &Event| !e.busy.is_disjoint(resources);
        if self.covering(start).is_some_and(clash) {
            return false;
        }
        !self
            .events
            .range((Bound::Excluded(start), Bound::Excluded(end)))
            .any(|(_, e)| clash(e))
    }

    /// Records `task` as running over `[start, start + p)`.
    ///
    /// The caller is responsible for having checked [`EventList::is_free`].
    pub fn insert_task(&mut self, task: &Task, start: Time) {
        let end = task.completion_time(start);
        self.get_or_insert(start).starting.insert(task.id());
        // The completion event inherits the usage in force before this task
        // is marked, so it must be created before the bits are set.
        self.get_or_insert(end).completing.insert(task.id());
        for (_, event) in self.events.range_mut(start..end) {
            event.busy.extend(task.resources().iter().copied());
        }
    }

    /// Removes a placed task: clears its usage bits, takes it out of its
    /// start and completion events, and drops events left without tasks.
    pub fn remove_task(&mut self, task: &Task, start: Time) {
        let end = task.completion_time(start);
        for (_, event) in self.events.range_mut(start..end) {
            for r in task.resources() {
                event.busy.remove(r);
            }
        }
        for t in [start, end] {
            if let Some(event) = self.events.get_mut(&t) {
                event.starting.remove(&task.id());
                event.completing.remove(&task.id());
                if t != self.origin && event.is_idle_marker() {
                    self.events.remove(&t);
                }
            }
        }
    }

    /// Events whose time lies in `[start, end)`.
    pub fn range(&self, start: Time, end: Time) -> impl Iterator<Item = &Event> {
        self.events.range(start..end).map(|(_, e)| e)
    }
}
