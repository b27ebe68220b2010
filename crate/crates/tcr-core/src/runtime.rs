//! Discrete-time simulation of full-information protocols under explicit
//! non-deterministic schedules, plus exhaustive run enumeration at a bounded
//! horizon.
//!
//! At every tick each agent absorbs the deliveries and external inputs it
//! observes, merges every received state into its own, and then sends its
//! full state on every outgoing channel. An agent's state is therefore the
//! set of non-deterministic events (external inputs and early deliveries) it
//! knows of, each paired with its occurrence time; two agents are in the
//! same epistemic situation exactly when these sets (and, under a shared
//! clock, the times) coincide.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::context::{validate_context, Bound, Context};
use crate::{Agent, InputId, Time};

/// Identity of a message: full-information protocols send exactly one
/// message per channel per tick, so this triple is unique within a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct MsgId {
    pub sender: Agent,
    pub send_time: Time,
    pub recipient: Agent,
}

/// The two kinds of non-deterministic events.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum NdEventKind {
    /// An external input occurred.
    Input(InputId),
    /// A message was delivered strictly before its channel bound (every
    /// delivery on an unbounded channel counts).
    EarlyDelivery(MsgId),
}

/// A known fact: an ND event paired with its occurrence time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fact {
    pub time: Time,
    pub kind: NdEventKind,
}

/// An ND event as reported to callers: fact plus its immediate observer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct NdEvent {
    pub time: Time,
    pub kind: NdEventKind,
    pub observer: Agent,
}

impl NdEvent {
    pub fn fact(&self) -> Fact {
        Fact {
            time: self.time,
            kind: self.kind,
        }
    }
}

/// Full-information state: the set of known facts.
pub type AgentState = BTreeSet<Fact>;

/// A delivered message and its arrival time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Delivery {
    pub msg: MsgId,
    pub at: Time,
    pub early: bool,
}

/// An explicit resolution of all non-determinism: when each external input
/// occurs (if at all) and per-message delivery delays.
///
/// Messages without an explicit delay resolve to their channel bound; on
/// unbounded channels, and whenever the resolved arrival falls beyond the
/// simulation horizon, the message stays pending.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NdSchedule {
    pub input_times: Vec<Option<Time>>,
    pub delays: BTreeMap<MsgId, Time>,
}

impl NdSchedule {
    pub fn silent(input_count: usize) -> Self {
        NdSchedule {
            input_times: vec![None; input_count],
            delays: BTreeMap::new(),
        }
    }

    pub fn with_input(mut self, input: InputId, at: Time) -> Self {
        self.input_times[input] = Some(at);
        self
    }

    pub fn with_delay(
        mut self,
        sender: Agent,
        send_time: Time,
        recipient: Agent,
        delay: Time,
    ) -> Self {
        self.delays.insert(
            MsgId {
                sender,
                send_time,
                recipient,
            },
            delay,
        );
        self
    }
}

/// Decides, from an agent's own state and the shared clock, whether to
/// respond. Must be deterministic in its arguments.
pub trait ResponseRule {
    fn should_respond(&self, agent: Agent, time: Time, state: &AgentState) -> bool;
}

/// The passive rule: no agent ever responds.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeverRespond;

impl ResponseRule for NeverRespond {
    fn should_respond(&self, _agent: Agent, _time: Time, _state: &AgentState) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimError {
    InvalidContext,
    /// A scheduled delay is 0 or exceeds its channel bound.
    ScheduleViolation {
        msg: MsgId,
        delay: Time,
    },
    /// A schedule references a channel the context does not declare.
    UnknownChannel {
        msg: MsgId,
    },
    InputCountMismatch,
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::InvalidContext => write!(f, "context failed validation"),
            SimError::ScheduleViolation { msg, delay } => write!(
                f,
                "delay {delay} violates the bound of {}->{} at t={}",
                msg.sender, msg.recipient, msg.send_time
            ),
            SimError::UnknownChannel { msg } => {
                write!(
                    f,
                    "schedule references undeclared channel {}->{}",
                    msg.sender, msg.recipient
                )
            }
            SimError::InputCountMismatch => write!(f, "schedule input count differs from context"),
        }
    }
}

/// A complete simulated timeline: resolved inputs, deliveries, pending
/// messages, the per-agent state history and response times.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Run {
    pub horizon: Time,
    pub input_times: Vec<Option<Time>>,
    pub deliveries: Vec<Delivery>,
    pub pending: Vec<MsgId>,
    states: Vec<Vec<AgentState>>,
    pub responses: Vec<Option<Time>>,
}

impl Run {
    pub fn state(&self, agent: Agent, t: Time) -> &AgentState {
        &self.states[agent][t as usize]
    }

    pub fn agent_count(&self) -> usize {
        self.states.len()
    }

    /// Occurrence time of an input, if it occurred within the horizon.
    pub fn input_time(&self, input: InputId) -> Option<Time> {
        self.input_times[input]
    }

    pub fn is_triggered_by(&self, input: InputId) -> bool {
        self.input_times[input].is_some()
    }

    /// Reconstruct the schedule that produced this timeline: resolved input
    /// times plus an explicit delay for every in-horizon delivery (pending
    /// messages resolve beyond the horizon under the default policy).
    pub fn schedule(&self) -> NdSchedule {
        let delays = self
            .deliveries
            .iter()
            .map(|d| (d.msg, d.at - d.msg.send_time))
            .collect();
        NdSchedule {
            input_times: self.input_times.clone(),
            delays,
        }
    }
}

/// All ND events of a run (inputs and early deliveries), sorted by time.
pub fn nd_events(ctx: &Context, run: &Run) -> Vec<NdEvent> {
    let mut out = Vec::new();
    for (input, &at) in run.input_times.iter().enumerate() {
        if let Some(t) = at {
            out.push(NdEvent {
                time: t,
                kind: NdEventKind::Input(input),
                observer: ctx.inputs[input].observer,
            });
        }
    }
    for d in &run.deliveries {
        if d.early {
            out.push(NdEvent {
                time: d.at,
                kind: NdEventKind::EarlyDelivery(d.msg),
                observer: d.msg.recipient,
            });
        }
    }
    out.sort_unstable();
    out
}

/// Run one schedule to completion. Deterministic: identical arguments yield
/// identical runs.
pub fn simulate(
    ctx: &Context,
    rule: &dyn ResponseRule,
    sched: &NdSchedule,
    horizon: Time,
) -> Result<Run, SimError> {
    if !validate_context(ctx).is_empty() {
        return Err(SimError::InvalidContext);
    }
    if sched.input_times.len() != ctx.inputs.len() {
        return Err(SimError::InputCountMismatch);
    }
    for (&msg, &delay) in &sched.delays {
        let bound = ctx
            .channel_bound(msg.sender, msg.recipient)
            .ok_or(SimError::UnknownChannel { msg })?;
        let ok = match bound {
            Bound::Finite(b) => delay >= 1 && delay <= b,
            Bound::Infinite => delay >= 1,
        };
        if !ok {
            return Err(SimError::ScheduleViolation { msg, delay });
        }
    }

    let n = ctx.agent_count;
    let mut states: Vec<Vec<AgentState>> = vec![Vec::with_capacity(horizon as usize + 1); n];
    let mut arrivals: BTreeMap<Time, Vec<MsgId>> = BTreeMap::new();
    let mut deliveries = Vec::new();
    let mut pending = Vec::new();
    let mut responses: Vec<Option<Time>> = vec![None; n];
    let input_times: Vec<Option<Time>> = sched
        .input_times
        .iter()
        .map(|&t| t.filter(|&at| at <= horizon))
        .collect();

    for t in 0..=horizon {
        let mut current: Vec<AgentState> = (0..n)
            .map(|a| {
                if t == 0 {
                    AgentState::new()
                } else {
                    states[a][t as usize - 1].clone()
                }
            })
            .collect();
        // Deliveries scheduled for this tick: merge the sender's state as of
        // the send time, and record early arrivals as ND facts.
        if let Some(msgs) = arrivals.remove(&t) {
            for msg in msgs {
                let content = states[msg.sender][msg.send_time as usize].clone();
                current[msg.recipient].extend(content);
                let early = match ctx.channel_bound(msg.sender, msg.recipient) {
                    Some(Bound::Finite(b)) => t < msg.send_time + b,
                    Some(Bound::Infinite) => true,
                    None => unreachable!("delivery on undeclared channel"),
                };
                if early {
                    current[msg.recipient].insert(Fact {
                        time: t,
                        kind: NdEventKind::EarlyDelivery(msg),
                    });
                }
                deliveries.push(Delivery { msg, at: t, early });
            }
        }
        for (input, &at) in input_times.iter().enumerate() {
            if at == Some(t) {
                current[ctx.inputs[input].observer].insert(Fact {
                    time: t,
                    kind: NdEventKind::Input(input),
                });
            }
        }
        for (a, state) in current.into_iter().enumerate() {
            states[a].push(state);
        }
        for a in 0..n {
            if responses[a].is_none() && rule.should_respond(a, t, &states[a][t as usize]) {
                responses[a] = Some(t);
            }
        }
        // Full-information sends: one message per outgoing channel per tick.
        for ch in &ctx.channels {
            let msg = MsgId {
                sender: ch.from,
                send_time: t,
                recipient: ch.to,
            };
            let arrival = match sched.delays.get(&msg) {
                Some(&d) => Some(t + d),
                None => match ch.bound {
                    Bound::Finite(b) => Some(t + b),
                    Bound::Infinite => None,
                },
            };
            match arrival {
                Some(at) if at <= horizon => arrivals.entry(at).or_default().push(msg),
                _ => pending.push(msg),
            }
        }
    }
    deliveries.sort_unstable();
    pending.sort_unstable();
    Ok(Run {
        horizon,
        input_times,
        deliveries,
        pending,
        states,
        responses,
    })
}

/// Bounds for exhaustive enumeration.
#[derive(Debug, Clone, Copy)]
pub struct EnumerationConfig {
    pub horizon: Time,
    /// Latest time at which an external input may occur; defaults to the
    /// horizon. Narrowing it keeps every consequence of an input inside the
    /// simulated window.
    pub input_window: Option<Time>,
    /// Abort once more schedules than this have been enumerated.
    pub max_runs: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EnumerationError {
    CapExceeded { reached: usize },
    Sim(SimError),
}

impl fmt::Display for EnumerationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnumerationError::CapExceeded { reached } => {
                write!(f, "enumeration cap exceeded after {reached} schedules")
            }
            EnumerationError::Sim(e) => write!(f, "{e}"),
        }
    }
}

/// Every run over schedules in which each input occurs at a time within the
/// input window or never, and each message takes every legal delay that
/// resolves within the horizon (staying pending otherwise). Deduplicated by
/// full timeline equality.
pub fn enumerate_runs(
    ctx: &Context,
    rule: &dyn ResponseRule,
    cfg: &EnumerationConfig,
) -> Result<BTreeSet<Run>, EnumerationError> {
    let window = cfg.input_window.unwrap_or(cfg.horizon).min(cfg.horizon);
    // Per-input occurrence options: never, or each time in the window.
    let input_options: Vec<Vec<Option<Time>>> = (0..ctx.inputs.len())
        .map(|_| {
            let mut opts = vec![None];
            opts.extend((0..=window).map(Some));
            opts
        })
        .collect();
    // Per-message delay options: every in-horizon delay, plus pending when
    // the bound (or the lack of one) allows resolution beyond the horizon.
    let mut messages: Vec<(MsgId, Vec<Option<Time>>)> = Vec::new();
    for s in 0..=cfg.horizon {
        for ch in &ctx.channels {
            let msg = MsgId {
                sender: ch.from,
                send_time: s,
                recipient: ch.to,
            };
            let latest_in_horizon = cfg.horizon - s;
            let mut opts: Vec<Option<Time>> = Vec::new();
            match ch.bound {
                Bound::Finite(b) => {
                    for d in 1..=b.min(latest_in_horizon) {
                        opts.push(Some(d));
                    }
                    if s + b > cfg.horizon {
                        opts.push(None);
                    }
                }
                Bound::Infinite => {
                    for d in 1..=latest_in_horizon {
                        opts.push(Some(d));
                    }
                    opts.push(None);
                }
            }
            messages.push((msg, opts));
        }
    }

    let mut runs = BTreeSet::new();
    let mut inputs_odometer = vec![0usize; input_options.len()];
    let mut count = 0usize;
    loop {
        let mut delays_odometer = vec![0usize; messages.len()];
        loop {
            count += 1;
            if count > cfg.max_runs {
                return Err(EnumerationError::CapExceeded { reached: count });
            }
            let mut sched = NdSchedule::silent(ctx.inputs.len());
            for (input, &k) in inputs_odometer.iter().enumerate() {
                sched.input_times[input] = input_options[input][k];
            }
            for ((msg, opts), &k) in messages.iter().zip(&delays_odometer) {
                if let Some(d) = opts[k] {
                    sched.delays.insert(*msg, d);
                }
            }
            runs.insert(simulate(ctx, rule, &sched, cfg.horizon).map_err(EnumerationError::Sim)?);
            if !advance(&mut delays_odometer, |i| messages[i].1.len()) {
                break;
            }
        }
        if !advance(&mut inputs_odometer, |i| input_options[i].len()) {
            break;
        }
    }
    Ok(runs)
}

/// Mixed-radix increment; false once every combination has been visited.
fn advance(odometer: &mut [usize], radix: impl Fn(usize) -> usize) -> bool {
    for i in (0..odometer.len()).rev() {
        odometer[i] += 1;
        if odometer[i] < radix(i) {
            return true;
        }
        odometer[i] = 0;
    }
    false
}
