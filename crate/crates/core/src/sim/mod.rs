//! Deterministic discrete-event kernel: integer-nanosecond clock, named nets,
//! a stable event queue and per-net change traces.

mod pulses;

pub use pulses::{measure_pulses, Pulse};

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;

use thiserror::Error;

/// Nanoseconds since reset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SimTime(pub u64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);

    pub const fn from_ns(ns: u64) -> Self {
        SimTime(ns)
    }

    pub const fn from_us(us: u64) -> Self {
        SimTime(us * 1_000)
    }

    pub const fn from_ms(ms: u64) -> Self {
        SimTime(ms * 1_000_000)
    }

    pub const fn ns(self) -> u64 {
        self.0
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 * 1e-9
    }

    pub fn as_ms_f64(self) -> f64 {
        self.0 as f64 * 1e-6
    }
}

impl std::ops::Add for SimTime {
    type Output = SimTime;
    fn add(self, rhs: SimTime) -> SimTime {
        SimTime(self.0 + rhs.0)
    }
}

impl std::ops::Sub for SimTime {
    type Output = SimTime;
    fn sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0 - rhs.0)
    }
}

impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}ns", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Logic {
    Low,
    High,
}

impl Logic {
    pub fn from_bool(high: bool) -> Self {
        if high {
            Logic::High
        } else {
            Logic::Low
        }
    }

    pub fn is_high(self) -> bool {
        self == Logic::High
    }
}

/// Value carried by a net. Analog values are sample-and-hold between events.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Level {
    Digital(Logic),
    Analog(f64),
}

impl Level {
    pub fn kind(&self) -> NetKind {
        match self {
            Level::Digital(_) => NetKind::Digital,
            Level::Analog(_) => NetKind::Analog,
        }
    }

    pub fn as_logic(&self) -> Option<Logic> {
        match *self {
            Level::Digital(l) => Some(l),
            Level::Analog(_) => None,
        }
    }

    pub fn as_analog(&self) -> Option<f64> {
        match *self {
            Level::Analog(v) => Some(v),
            Level::Digital(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetKind {
    Digital,
    Analog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NetId(pub usize);

#[derive(Debug, Clone)]
pub struct Net {
    pub name: String,
    pub kind: NetKind,
    pub level: Level,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub at: SimTime,
    pub net: NetId,
    pub new_level: Level,
}

/// Change points of one net. The first entry is the reset level at tick 0.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace {
    points: Vec<(SimTime, Level)>,
}

impl Trace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_points(points: Vec<(SimTime, Level)>) -> Self {
        Trace { points }
    }

    pub fn points(&self) -> &[(SimTime, Level)] {
        &self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Level in effect at `t` (last change point at or before `t`).
    pub fn level_at(&self, t: SimTime) -> Option<Level> {
        let idx = self.points.partition_point(|(at, _)| *at <= t);
        idx.checked_sub(1).map(|i| self.points[i].1)
    }

    /// Records a change. Same-tick updates overwrite the previous point, and
    /// points that would not change the level are dropped.
    pub fn record(&mut self, at: SimTime, level: Level) {
        match self.points.last_mut() {
            Some((last_at, last_level)) if *last_at == at => {
                *last_level = level;
                let n = self.points.len();
                if n >= 2 && self.points[n - 2].1 == level {
                    self.points.pop();
                }
            }
            Some((_, last_level)) if *last_level == level => {}
            _ => self.points.push((at, level)),
        }
    }
}

/// All traces of one simulation, in net-creation order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TraceSet {
    pub nets: Vec<(String, NetKind, Trace)>,
}

impl TraceSet {
    pub fn get(&self, name: &str) -> Option<&Trace> {
        self.nets
            .iter()
            .find(|(n, _, _)| n == name)
            .map(|(_, _, t)| t)
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SimError {
    #[error("event at {at} is in the past (clock is at {now})")]
    PastEvent { at: SimTime, now: SimTime },
    #[error("horizon {horizon} is before the clock ({now})")]
    HorizonInPast { horizon: SimTime, now: SimTime },
    #[error("net `{0}` already exists")]
    DuplicateNet(String),
    #[error("unknown net `{0}`")]
    UnknownNet(String),
    #[error("level kind does not match net `{0}`")]
    KindMismatch(String),
}

#[derive(Debug)]
struct Queued {
    at: SimTime,
    seq: u64,
    event: Event,
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        (self.at, self.seq) == (other.at, other.seq)
    }
}

impl Eq for Queued {}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Queued {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.at, self.seq).cmp(&(other.at, other.seq))
    }
}

/// Single-threaded event loop. Owns all nets, the pending queue and traces.
#[derive(Debug, Default)]
pub struct Simulator {
    now: SimTime,
    nets: Vec<Net>,
    by_name: HashMap<String, NetId>,
    traces: Vec<Trace>,
    queue: BinaryHeap<Reverse<Queued>>,
    seq: u64,
}

impl Simulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    /// Adds a net; its reset level becomes the first trace point at tick 0.
    pub fn add_net(&mut self, name: &str, reset: Level) -> Result<NetId, SimError> {
        if self.by_name.contains_key(name) {
            return Err(SimError::DuplicateNet(name.to_string()));
        }
        let id = NetId(self.nets.len());
        self.nets.push(Net {
            name: name.to_string(),
            kind: reset.kind(),
            level: reset,
        });
        self.by_name.insert(name.to_string(), id);
        let mut trace = Trace::new();
        trace.record(SimTime::ZERO, reset);
        self.traces.push(trace);
        Ok(id)
    }

    pub fn net_id(&self, name: &str) -> Result<NetId, SimError> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| SimError::UnknownNet(name.to_string()))
    }

    pub fn net(&self, id: NetId) -> &Net {
        &self.nets[id.0]
    }

    pub fn level(&self, id: NetId) -> Level {
        self.nets[id.0].level
    }

    pub fn trace(&self, id: NetId) -> &Trace {
        &self.traces[id.0]
    }

    pub fn next_event_time(&self) -> Option<SimTime> {
        self.queue.peek().map(|Reverse(q)| q.at)
    }

    pub fn schedule(&mut self, event: Event) -> Result<(), SimError> {
        if event.at < self.now {
            return Err(SimError::PastEvent {
                at: event.at,
                now: self.now,
            });
        }
        let net = self
            .nets
            .get(event.net.0)
            .ok_or_else(|| SimError::UnknownNet(format!("#{}", event.net.0)))?;
        if net.kind != event.new_level.kind() {
            return Err(SimError::KindMismatch(net.name.clone()));
        }
        self.queue.push(Reverse(Queued {
            at: event.at,
            seq: self.seq,
            event,
        }));
        self.seq += 1;
        Ok(())
    }

    /// Delivers every event with `at <= horizon` and leaves the clock at `horizon`.
    pub fn run_until(&mut self, horizon: SimTime) -> Result<&[Trace], SimError> {
        self.run_until_with(horizon, |_, _| Ok(()))?;
        Ok(&self.traces)
    }

    /// Like [`Simulator::run_until`], calling `on_event` after each delivery.
    /// The handler may schedule further events at or after the delivered time.
    pub fn run_until_with<F>(&mut self, horizon: SimTime, mut on_event: F) -> Result<(), SimError>
    where
        F: FnMut(&Event, &mut Simulator) -> Result<(), SimError>,
    {
        if horizon < self.now {
            return Err(SimError::HorizonInPast {
                horizon,
                now: self.now,
            });
        }
        while let Some(Reverse(q)) = self.queue.peek() {
            if q.at > horizon {
                break;
            }
            let Reverse(Queued { event, .. }) = self.queue.pop().expect("peeked");
            self.now = event.at;
            self.nets[event.net.0].level = event.new_level;
            self.traces[event.net.0].record(event.at, event.new_level);
            on_event(&event, self)?;
        }
        self.now = horizon;
        Ok(())
    }

    pub fn trace_set(&self) -> TraceSet {
        TraceSet {
            nets: self
                .nets
                .iter()
                .zip(&self.traces)
                .map(|(n, t)| (n.name.clone(), n.kind, t.clone()))
                .collect(),
        }
    }
}
