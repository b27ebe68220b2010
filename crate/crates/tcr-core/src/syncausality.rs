//! The two partial orders on agent-time nodes and detection of syncausal
//! structures (brooms, centipedes, centibrooms) in runs.
//!
//! Syncausality is the synchronous happened-before relation: the transitive
//! closure of locality, actual message deliveries and delivery-guarantee
//! edges. The bound-guarantee relation keeps only locality and guarantees,
//! and is therefore run-independent: `(i,t) ⇢ (j,t')` holds exactly when
//! `t' >= t + dist(i,j)` over the finite-bound channel distances.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::constraints::ImplementationSpec;
use crate::context::{comm_distance, Bound, CommDistance, Context};
use crate::delta::{ExtendedDelta, Finite, PosInf};
use crate::runtime::{nd_events, NdEvent, NdEventKind, Run};
use crate::{Agent, InputId, Time};

/// A point of the agent-time grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct NodeRef {
    pub agent: Agent,
    pub time: Time,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SyncausalError {
    EventNotInRun,
    TriggerAbsent,
    InvalidPath,
    GroupOverlap,
    UnknownAgent(Agent),
}

impl fmt::Display for SyncausalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SyncausalError::EventNotInRun => write!(f, "event does not occur in the run"),
            SyncausalError::TriggerAbsent => write!(f, "trigger does not occur in the run"),
            SyncausalError::InvalidPath => {
                write!(f, "path is not consecutive in the constraint graph")
            }
            SyncausalError::GroupOverlap => {
                write!(f, "groups must be pairwise disjoint and non-empty")
            }
            SyncausalError::UnknownAgent(a) => write!(f, "unknown agent {a}"),
        }
    }
}

/// Result of a structure search that can be cut short by the horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome<T> {
    Found(T),
    /// Disproved within the horizon.
    Absent,
    /// An end node fell outside `[0, horizon]`, so the question cannot be
    /// decided within this run.
    HorizonClipped,
}

impl<T> SearchOutcome<T> {
    pub fn found(self) -> Option<T> {
        match self {
            SearchOutcome::Found(v) => Some(v),
            _ => None,
        }
    }
}

/// Earliest time each agent is syncausally influenced by a given event,
/// within the run's horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EarliestInfluence {
    per_agent: Vec<Option<Time>>,
}

impl EarliestInfluence {
    /// `+inf` when the agent is not influenced within the horizon.
    pub fn get(&self, agent: Agent) -> ExtendedDelta {
        match self.per_agent[agent] {
            Some(t) => ExtendedDelta::from_time(t),
            None => PosInf,
        }
    }

    pub fn influences(&self, node: NodeRef) -> bool {
        matches!(self.per_agent[node.agent], Some(t) if t <= node.time)
    }
}

/// The syncausal edge families of one run (or of a reconstructed causal
/// cone): delivery-guarantee channels and actual deliveries, capped at a
/// ceiling time. Locality is implicit.
#[derive(Debug, Clone)]
pub(crate) struct SyncausalEdges {
    agent_count: usize,
    /// Finite-bound channels `(from, to, bound)`.
    guarantees: Vec<(Agent, Agent, Time)>,
    /// Actual deliveries `(sender, send_time, recipient, deliver_time, early)`.
    deliveries: Vec<(Agent, Time, Agent, Time, bool)>,
    ceiling: Time,
}

impl SyncausalEdges {
    pub(crate) fn from_run(ctx: &Context, run: &Run) -> Self {
        let guarantees = finite_channels(ctx);
        let deliveries = run
            .deliveries
            .iter()
            .map(|d| {
                (
                    d.msg.sender,
                    d.msg.send_time,
                    d.msg.recipient,
                    d.at,
                    d.early,
                )
            })
            .collect();
        SyncausalEdges {
            agent_count: ctx.agent_count,
            guarantees,
            deliveries,
            ceiling: run.horizon,
        }
    }

    /// The cone an agent can reconstruct from its own facts at `ceiling`:
    /// the early deliveries it knows of, plus the always-present guarantee
    /// edges (at-bound deliveries coincide with those).
    pub(crate) fn from_facts<'a>(
        ctx: &Context,
        facts: impl Iterator<Item = &'a crate::runtime::Fact>,
        ceiling: Time,
    ) -> Self {
        let guarantees = finite_channels(ctx);
        let deliveries = facts
            .filter_map(|f| match f.kind {
                NdEventKind::EarlyDelivery(m) => {
                    Some((m.sender, m.send_time, m.recipient, f.time, true))
                }
                NdEventKind::Input(_) => None,
            })
            .collect();
        SyncausalEdges {
            agent_count: ctx.agent_count,
            guarantees,
            deliveries,
            ceiling,
        }
    }

    /// Earliest syncausal reach of every agent from a start node, by
    /// relaxation over locality, guarantee and delivery edges.
    pub(crate) fn earliest_from(&self, start: NodeRef) -> Vec<Option<Time>> {
        let mut earliest: Vec<Option<Time>> = vec![None; self.agent_count];
        if start.time <= self.ceiling {
            earliest[start.agent] = Some(start.time);
        }
        let mut changed = earliest[start.agent].is_some();
        while changed {
            changed = false;
            for &(u, v, b) in &self.guarantees {
                if let Some(tu) = earliest[u] {
                    let cand = tu + b;
                    if cand <= self.ceiling && earliest[v].is_none_or(|tv| cand < tv) {
                        earliest[v] = Some(cand);
                        changed = true;
                    }
                }
            }
            for &(u, s, v, d, _) in &self.deliveries {
                if let Some(tu) = earliest[u] {
                    if tu <= s && d <= self.ceiling && earliest[v].is_none_or(|tv| d < tv) {
                        earliest[v] = Some(d);
                        changed = true;
                    }
                }
            }
        }
        earliest
    }
}

fn finite_channels(ctx: &Context) -> Vec<(Agent, Agent, Time)> {
    ctx.channels
        .iter()
        .filter_map(|ch| match ch.bound {
            Bound::Finite(b) => Some((ch.from, ch.to, b)),
            Bound::Infinite => None,
        })
        .collect()
}

/// Events of a run (or cone) with their precomputed earliest-influence
/// vectors; answers event-to-event and event-to-node syncausality queries.
#[derive(Debug, Clone)]
pub(crate) struct EventGraph {
    pub events: Vec<NdEvent>,
    ei: Vec<Vec<Option<Time>>>,
}

impl EventGraph {
    pub(crate) fn new(edges: &SyncausalEdges, events: Vec<NdEvent>) -> Self {
        let ei = events
            .iter()
            .map(|e| {
                edges.earliest_from(NodeRef {
                    agent: e.observer,
                    time: e.time,
                })
            })
            .collect();
        EventGraph { events, ei }
    }

    pub(crate) fn index_of(&self, event: &NdEvent) -> Option<usize> {
        self.events.iter().position(|e| e == event)
    }

    /// `e ⇝ (j,t)` within the horizon.
    pub(crate) fn reaches_node(&self, e: usize, node: NodeRef) -> bool {
        matches!(self.ei[e][node.agent], Some(t) if t <= node.time)
    }

    /// Event-to-event syncausality: `e ⇝ e'` iff they are equal, or `e'` is
    /// a delivery of a message sent from a node syncausally after `e`.
    pub(crate) fn event_leq(&self, e: usize, e2: usize) -> bool {
        if e == e2 {
            return true;
        }
        match self.events[e2].kind {
            NdEventKind::EarlyDelivery(m) => self.reaches_node(
                e,
                NodeRef {
                    agent: m.sender,
                    time: m.send_time,
                },
            ),
            NdEventKind::Input(_) => false,
        }
    }

    pub(crate) fn earliest_influence(&self, e: usize) -> EarliestInfluence {
        EarliestInfluence {
            per_agent: self.ei[e].clone(),
        }
    }
}

/// Precomputed syncausal view of one run.
pub struct SyncausalAnalysis<'a> {
    ctx: &'a Context,
    run: &'a Run,
    dist: CommDistance,
    graph: EventGraph,
}

impl<'a> SyncausalAnalysis<'a> {
    pub fn new(ctx: &'a Context, run: &'a Run) -> Self {
        let dist = comm_distance(ctx).expect("runs only exist for valid contexts");
        let edges = SyncausalEdges::from_run(ctx, run);
        let graph = EventGraph::new(&edges, nd_events(ctx, run));
        SyncausalAnalysis {
            ctx,
            run,
            dist,
            graph,
        }
    }

    pub fn events(&self) -> &[NdEvent] {
        &self.graph.events
    }

    pub fn dist(&self) -> &CommDistance {
        &self.dist
    }

    /// `e ⇢ (j,t)`: run-independent bound guarantee from the event's
    /// observation node.
    pub fn event_guarantees(&self, e: &NdEvent, node: NodeRef) -> bool {
        node_guarantees(
            &self.dist,
            NodeRef {
                agent: e.observer,
                time: e.time,
            },
            node,
        )
    }

    /// Event-to-event syncausality on this run's events.
    pub fn event_syncausal(&self, e: &NdEvent, e2: &NdEvent) -> bool {
        match (self.graph.index_of(e), self.graph.index_of(e2)) {
            (Some(i), Some(j)) => self.graph.event_leq(i, j),
            _ => false,
        }
    }

    fn trigger_index(&self, trigger: InputId) -> Result<usize, SyncausalError> {
        let t = self
            .run
            .input_time(trigger)
            .ok_or(SyncausalError::TriggerAbsent)?;
        self.graph
            .index_of(&NdEvent {
                time: t,
                kind: NdEventKind::Input(trigger),
                observer: self.ctx.inputs[trigger].observer,
            })
            .ok_or(SyncausalError::TriggerAbsent)
    }
}

/// `(i,t) ⇢ (j,t')` over a precomputed distance matrix.
pub fn node_guarantees(dist: &CommDistance, a: NodeRef, b: NodeRef) -> bool {
    match dist.get(a.agent, b.agent) {
        Finite(d) => (a.time as i64) + d <= b.time as i64,
        PosInf => false,
        ExtendedDelta::NegInf => unreachable!("communication distances are non-negative"),
    }
}

/// The bound-guarantee relation between two agent-time nodes.
pub fn bound_guarantee(ctx: &Context, a: NodeRef, b: NodeRef) -> bool {
    let dist = comm_distance(ctx).expect("valid context");
    node_guarantees(&dist, a, b)
}

/// Earliest time each agent is influenced by `e` in this run, as the fixed
/// point of relaxation over locality, actual-delivery and guarantee edges.
pub fn earliest_influence(
    ctx: &Context,
    run: &Run,
    e: &NdEvent,
) -> Result<EarliestInfluence, SyncausalError> {
    let analysis = SyncausalAnalysis::new(ctx, run);
    let idx = analysis
        .graph
        .index_of(e)
        .ok_or(SyncausalError::EventNotInRun)?;
    Ok(analysis.graph.earliest_influence(idx))
}

/// Earliest syncausal reach of every agent from an arbitrary grid node.
pub fn node_influence(ctx: &Context, run: &Run, node: NodeRef) -> EarliestInfluence {
    let edges = SyncausalEdges::from_run(ctx, run);
    EarliestInfluence {
        per_agent: edges.earliest_from(node),
    }
}

/// The ND past of a node: every ND event syncausally before it.
pub fn nd_past(ctx: &Context, run: &Run, node: NodeRef) -> Vec<NdEvent> {
    let analysis = SyncausalAnalysis::new(ctx, run);
    (0..analysis.graph.events.len())
        .filter(|&i| analysis.graph.reaches_node(i, node))
        .map(|i| analysis.graph.events[i])
        .collect()
}

/// All events that are brooms rooted at `trigger` for `agents` by `times`:
/// syncausally after the trigger, with a bound guarantee to every listed
/// agent at its time. Sorted by occurrence.
pub fn find_brooms(
    ctx: &Context,
    run: &Run,
    trigger: InputId,
    agents: &[Agent],
    times: &BTreeMap<Agent, Time>,
) -> Result<Vec<NdEvent>, SyncausalError> {
    let analysis = SyncausalAnalysis::new(ctx, run);
    let root = analysis.trigger_index(trigger)?;
    for &a in agents {
        if a >= ctx.agent_count || !times.contains_key(&a) {
            return Err(SyncausalError::UnknownAgent(a));
        }
    }
    Ok((0..analysis.graph.events.len())
        .filter(|&i| analysis.graph.event_leq(root, i))
        .filter(|&i| {
            agents.iter().all(|&a| {
                analysis.event_guarantees(
                    &analysis.graph.events[i],
                    NodeRef {
                        agent: a,
                        time: times[&a],
                    },
                )
            })
        })
        .map(|i| analysis.graph.events[i])
        .collect())
}

/// Search for a path-traversing centipede by `t`: events `e_1..e_n` with the
/// trigger syncausally before `e_n`, each `e_{m+1}` before `e_m`, and
/// `e_m ⇢ (p_m, t + L(p_1..p_m))` for the cumulative constraint-path length.
pub fn has_path_traversing_centipede(
    ctx: &Context,
    run: &Run,
    trigger: InputId,
    path: &[Agent],
    delta: &ImplementationSpec,
    t: Time,
) -> Result<SearchOutcome<Vec<NdEvent>>, SyncausalError> {
    if path.is_empty() {
        return Err(SyncausalError::InvalidPath);
    }
    // End-node times from cumulative prefix lengths; the path must be
    // consecutive in the constraint graph and free of -inf edges.
    let mut end_times: Vec<i64> = Vec::with_capacity(path.len());
    let mut length = 0i64;
    end_times.push(t as i64);
    for w in path.windows(2) {
        let d = delta
            .get_by_agent(w[0], w[1])
            .ok_or(SyncausalError::InvalidPath)?;
        match d {
            Finite(v) => length += v,
            _ => return Err(SyncausalError::InvalidPath),
        }
        end_times.push(t as i64 + length);
    }
    if end_times
        .iter()
        .any(|&et| et < 0 || et > run.horizon as i64)
    {
        return Ok(SearchOutcome::HorizonClipped);
    }

    let analysis = SyncausalAnalysis::new(ctx, run);
    let root = analysis.trigger_index(trigger)?;
    let n = path.len();
    let ecount = analysis.graph.events.len();
    let candidates = |m: usize| -> Vec<usize> {
        (0..ecount)
            .filter(|&i| {
                analysis.event_guarantees(
                    &analysis.graph.events[i],
                    NodeRef {
                        agent: path[m],
                        time: end_times[m] as Time,
                    },
                )
            })
            .collect()
    };
    // feas[m][e] holds a witness successor at position m+1 (or the root
    // marker at position n-1).
    let mut feas: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); n];
    for e in candidates(n - 1) {
        if analysis.graph.event_leq(root, e) {
            feas[n - 1].insert(e, usize::MAX);
        }
    }
    for m in (0..n - 1).rev() {
        let next: Vec<usize> = feas[m + 1].keys().copied().collect();
        for e in candidates(m) {
            if let Some(&succ) = next.iter().find(|s| analysis.graph.event_leq(**s, e)) {
                feas[m].insert(e, succ);
            }
        }
    }
    match feas[0].iter().next() {
        None => Ok(SearchOutcome::Absent),
        Some((&first, _)) => {
            let mut chain = Vec::with_capacity(n);
            let mut cur = first;
            for m in 0..n {
                chain.push(analysis.graph.events[cur]);
                if m + 1 < n {
                    cur = feas[m][&cur];
                }
            }
            Ok(SearchOutcome::Found(chain))
        }
    }
}

/// Search for a centibroom: events `e_1..e_n` with the trigger before `e_1`,
/// each `e_m` before `e_{m+1}`, and `e_m ⇢ (i, times(i))` for every agent of
/// group `m`.
pub fn find_centibroom(
    ctx: &Context,
    run: &Run,
    trigger: InputId,
    groups: &[Vec<Agent>],
    times: &BTreeMap<Agent, Time>,
) -> Result<Option<Vec<NdEvent>>, SyncausalError> {
    if groups.iter().any(|g| g.is_empty()) {
        return Err(SyncausalError::GroupOverlap);
    }
    for (k, g) in groups.iter().enumerate() {
        for a in g {
            if groups[..k].iter().any(|h| h.contains(a)) {
                return Err(SyncausalError::GroupOverlap);
            }
            if *a >= ctx.agent_count || !times.contains_key(a) {
                return Err(SyncausalError::UnknownAgent(*a));
            }
        }
    }
    let analysis = SyncausalAnalysis::new(ctx, run);
    let root = analysis.trigger_index(trigger)?;
    let ecount = analysis.graph.events.len();
    let n = groups.len();
    let candidates = |m: usize| -> Vec<usize> {
        (0..ecount)
            .filter(|&i| {
                groups[m].iter().all(|&a| {
                    analysis.event_guarantees(
                        &analysis.graph.events[i],
                        NodeRef {
                            agent: a,
                            time: times[&a],
                        },
                    )
                })
            })
            .collect()
    };
    let mut feas: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); n];
    for e in candidates(0) {
        if analysis.graph.event_leq(root, e) {
            feas[0].insert(e, usize::MAX);
        }
    }
    for m in 1..n {
        let prev: Vec<usize> = feas[m - 1].keys().copied().collect();
        for e in candidates(m) {
            if let Some(&pred) = prev.iter().find(|p| analysis.graph.event_leq(**p, e)) {
                feas[m].insert(e, pred);
            }
        }
    }
    match feas[n - 1].iter().next() {
        None => Ok(None),
        Some((&last, _)) => {
            let mut chain = vec![analysis.graph.events[last]];
            let mut cur = last;
            for m in (0..n - 1).rev() {
                cur = feas[m + 1][&cur];
                chain.push(analysis.graph.events[cur]);
            }
            chain.reverse();
            Ok(Some(chain))
        }
    }
}

/// Start point for [`max_nd_count`].
#[derive(Debug, Clone, Copy)]
pub enum CausalSource {
    Node(NodeRef),
    Event(NdEvent),
}

/// Supremum of the number of ND events along a syncausal path from `from`
/// to `to`; `+inf` when the two are not syncausally related. Finite
/// whenever they are related: all edges advance time, so paths in a
/// discrete-time run are finite.
pub fn max_nd_count(ctx: &Context, run: &Run, from: CausalSource, to: NodeRef) -> ExtendedDelta {
    let (start, base) = match from {
        CausalSource::Node(n) => (n, 0u32),
        CausalSource::Event(e) => (
            NodeRef {
                agent: e.observer,
                time: e.time,
            },
            1,
        ),
    };
    let n = ctx.agent_count;
    let horizon = run.horizon;
    let mut best: Vec<Vec<Option<u32>>> = vec![vec![None; horizon as usize + 1]; n];
    if start.time <= horizon {
        best[start.agent][start.time as usize] = Some(base);
    }
    let channels = finite_channels(ctx);
    for t in 0..=horizon {
        for a in 0..n {
            // Locality from the previous tick.
            if t > 0 {
                if let Some(c) = best[a][t as usize - 1] {
                    if best[a][t as usize].is_none_or(|cur| c > cur) {
                        best[a][t as usize] = Some(c);
                    }
                }
            }
            // Guarantee edges landing here.
            for &(u, v, b) in &channels {
                if v == a && t >= b {
                    if let Some(c) = best[u][(t - b) as usize] {
                        if best[a][t as usize].is_none_or(|cur| c > cur) {
                            best[a][t as usize] = Some(c);
                        }
                    }
                }
            }
            // Actual deliveries landing here; early ones count as ND.
            for d in &run.deliveries {
                if d.msg.recipient == a && d.at == t {
                    if let Some(c) = best[d.msg.sender][d.msg.send_time as usize] {
                        let c = c + u32::from(d.early);
                        if best[a][t as usize].is_none_or(|cur| c > cur) {
                            best[a][t as usize] = Some(c);
                        }
                    }
                }
            }
        }
    }
    if to.time > horizon {
        return PosInf;
    }
    match best[to.agent][to.time as usize] {
        Some(c) => Finite(c as i64),
        None => PosInf,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::{Channel, InputSpec};
    use crate::runtime::{simulate, NdSchedule, NeverRespond};

    fn c1() -> Context {
        Context {
            agent_count: 2,
            channels: vec![
                Channel {
                    from: 0,
                    to: 1,
                    bound: Bound::Finite(2),
                },
                Channel {
                    from: 1,
                    to: 0,
                    bound: Bound::Finite(3),
                },
            ],
            inputs: vec![InputSpec { observer: 0 }],
            shared_clock: true,
        }
    }

    fn max_delay_run(horizon: Time) -> Run {
        let sched = NdSchedule::silent(1).with_input(0, 0);
        simulate(&c1(), &NeverRespond, &sched, horizon).unwrap()
    }

    fn trigger_event() -> NdEvent {
        NdEvent {
            time: 0,
            kind: NdEventKind::Input(0),
            observer: 0,
        }
    }

    #[test]
    fn earliest_influence_max_delay() {
        let run = max_delay_run(5);
        let ei = earliest_influence(&c1(), &run, &trigger_event()).unwrap();
        assert_eq!(ei.get(0), Finite(0));
        assert_eq!(ei.get(1), Finite(2));
    }

    #[test]
    fn earliest_influence_early_delivery() {
        let sched = NdSchedule::silent(1)
            .with_input(0, 0)
            .with_delay(0, 0, 1, 1);
        let run = simulate(&c1(), &NeverRespond, &sched, 5).unwrap();
        let ei = earliest_influence(&c1(), &run, &trigger_event()).unwrap();
        assert_eq!(ei.get(1), Finite(1));
    }

    #[test]
    fn absent_event_is_an_error() {
        let run = simulate(&c1(), &NeverRespond, &NdSchedule::silent(1), 5).unwrap();
        assert_eq!(
            earliest_influence(&c1(), &run, &trigger_event()),
            Err(SyncausalError::EventNotInRun)
        );
    }

    #[test]
    fn bound_guarantee_matches_distances() {
        let ctx = c1();
        assert!(bound_guarantee(
            &ctx,
            NodeRef { agent: 0, time: 0 },
            NodeRef { agent: 1, time: 2 }
        ));
        assert!(!bound_guarantee(
            &ctx,
            NodeRef { agent: 0, time: 0 },
            NodeRef { agent: 1, time: 1 }
        ));
        assert!(bound_guarantee(
            &ctx,
            NodeRef { agent: 0, time: 3 },
            NodeRef { agent: 0, time: 3 }
        ));
    }

    #[test]
    fn nd_past_of_nodes() {
        let run = max_delay_run(5);
        assert!(nd_past(&c1(), &run, NodeRef { agent: 1, time: 1 }).is_empty());
        assert_eq!(nd_past(&c1(), &run, NodeRef { agent: 1, time: 2 }).len(), 1);
        assert_eq!(nd_past(&c1(), &run, NodeRef { agent: 0, time: 0 }).len(), 1);
    }

    #[test]
    fn brooms_on_c1() {
        let run = max_delay_run(5);
        let times: BTreeMap<Agent, Time> = [(0, 2), (1, 2)].into();
        let found = find_brooms(&c1(), &run, 0, &[0, 1], &times).unwrap();
        assert_eq!(found, vec![trigger_event()]);
        let times0: BTreeMap<Agent, Time> = [(0, 0), (1, 0)].into();
        assert!(find_brooms(&c1(), &run, 0, &[0, 1], &times0)
            .unwrap()
            .is_empty());
        let single: BTreeMap<Agent, Time> = [(0, 0)].into();
        assert_eq!(find_brooms(&c1(), &run, 0, &[0], &single).unwrap().len(), 1);
    }

    #[test]
    fn path_traversing_centipede_example() {
        let run = max_delay_run(5);
        let delta = ImplementationSpec::new(vec![0, 1], &[((0, 1), Finite(1))]).unwrap();
        let found = has_path_traversing_centipede(&c1(), &run, 0, &[0, 1], &delta, 1).unwrap();
        let chain = found.found().expect("centipede by 1");
        assert_eq!(chain, vec![trigger_event(), trigger_event()]);
        let missing = has_path_traversing_centipede(&c1(), &run, 0, &[0, 1], &delta, 0).unwrap();
        assert_eq!(missing, SearchOutcome::Absent);
        let trivial = has_path_traversing_centipede(&c1(), &run, 0, &[0], &delta, 0).unwrap();
        assert_eq!(trivial.found().unwrap().len(), 1);
    }

    #[test]
    fn centipede_rejects_non_consecutive_path() {
        let run = max_delay_run(5);
        let delta = ImplementationSpec::new(vec![0, 1], &[]).unwrap();
        assert_eq!(
            has_path_traversing_centipede(&c1(), &run, 0, &[0, 1], &delta, 1),
            Err(SyncausalError::InvalidPath)
        );
    }

    #[test]
    fn centibroom_examples() {
        let run = max_delay_run(5);
        let times: BTreeMap<Agent, Time> = [(0, 0), (1, 2)].into();
        let found = find_centibroom(&c1(), &run, 0, &[vec![0], vec![1]], &times).unwrap();
        assert_eq!(found.unwrap(), vec![trigger_event(), trigger_event()]);
        let times_tight: BTreeMap<Agent, Time> = [(0, 0), (1, 1)].into();
        assert!(
            find_centibroom(&c1(), &run, 0, &[vec![0], vec![1]], &times_tight)
                .unwrap()
                .is_none()
        );
        let overlap = find_centibroom(&c1(), &run, 0, &[vec![0], vec![0]], &times);
        assert_eq!(overlap, Err(SyncausalError::GroupOverlap));
    }

    #[test]
    fn max_nd_count_examples() {
        let run = max_delay_run(5);
        let e = trigger_event();
        assert_eq!(
            max_nd_count(
                &c1(),
                &run,
                CausalSource::Event(e),
                NodeRef { agent: 0, time: 0 }
            ),
            Finite(1)
        );
        assert_eq!(
            max_nd_count(
                &c1(),
                &run,
                CausalSource::Event(e),
                NodeRef { agent: 1, time: 1 }
            ),
            PosInf
        );
        assert_eq!(
            max_nd_count(
                &c1(),
                &run,
                CausalSource::Event(e),
                NodeRef { agent: 1, time: 2 }
            ),
            Finite(1)
        );
    }
}
