//! Coordination problems over a context: solvability decisions, worst-case
//! response bounds, and the optimal response engine with its brute-force
//! oracle.
//!
//! Both response rules decide, from an agent's own full-information state
//! and the shared clock, whether the agent should respond now. The
//! brute-force rule checks the defining condition directly: a chain of known
//! ND events must exist for every constraint-graph path from the agent, with
//! each chain event guaranteeing delivery to its path position on time.
//! The optimal engine reaches the same verdicts over a reduced search space:
//! paths over one representative per rigid (zero-length-cycle) equivalence
//! class, whole classes covered at their rigid offsets, and per-component
//! broom obligations. Exploration of ever-longer paths stops once a chain
//! event alone guarantees every remaining requirement (saturation), which is
//! what makes the infinite path family decidable.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::constraints::{canonical_form, CanonicalForm, ImplementationSpec, TimeAssignment};
use crate::constraints::{is_implementable, verify_implementation};
use crate::context::{comm_distance, CommDistance, Context};
use crate::delta::{ExtendedDelta, Finite, PosInf};
use crate::graph;
use crate::runtime::{AgentState, Fact, NdEvent, NdEventKind, ResponseRule, Run};
use crate::syncausality::{EventGraph, SyncausalEdges};
use crate::{Agent, InputId, Time};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoordinationError {
    NotImplementable,
    NotSolvable,
    /// The trigger or an agent is not declared in the context.
    InvalidSpec,
    /// At least two coordinating agents are required.
    TooFewAgents,
    /// Violated restrictions of the worst-case bound.
    PreconditionViolated(Vec<Precondition>),
    /// The brute-force rule cannot certify its verdicts within the given
    /// path budget.
    BudgetInsufficient,
    /// Both response engines read the shared clock.
    SharedClockRequired,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precondition {
    DeltaNonNegative,
    ConstraintGraphStronglyConnected,
}

impl fmt::Display for CoordinationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoordinationError::NotImplementable => {
                write!(f, "constraining function is not implementable")
            }
            CoordinationError::NotSolvable => write!(f, "problem is not solvable in this context"),
            CoordinationError::InvalidSpec => {
                write!(f, "spec references undeclared agents or inputs")
            }
            CoordinationError::TooFewAgents => {
                write!(f, "at least two coordinating agents are required")
            }
            CoordinationError::PreconditionViolated(ps) => {
                write!(f, "precondition violated:")?;
                for p in ps {
                    match p {
                        Precondition::DeltaNonNegative => {
                            write!(f, " delta must be non-negative;")?
                        }
                        Precondition::ConstraintGraphStronglyConnected => {
                            write!(f, " constraint graph must be strongly connected;")?
                        }
                    }
                }
                Ok(())
            }
            CoordinationError::BudgetInsufficient => write!(f, "path budget insufficient"),
            CoordinationError::SharedClockRequired => {
                write!(f, "response engines require a shared clock")
            }
        }
    }
}

/// A timely-coordinated response problem: a context, the trigger input, and
/// a constraining function over the coordinating agents.
#[derive(Debug, Clone)]
pub struct TcrSpec {
    pub context: Context,
    pub trigger: InputId,
    pub delta: ImplementationSpec,
}

impl TcrSpec {
    pub fn new(
        context: Context,
        trigger: InputId,
        delta: ImplementationSpec,
    ) -> Result<Self, CoordinationError> {
        if trigger >= context.inputs.len()
            || delta.agents().iter().any(|&a| a >= context.agent_count)
        {
            return Err(CoordinationError::InvalidSpec);
        }
        if delta.len() < 2 {
            return Err(CoordinationError::TooFewAgents);
        }
        Ok(TcrSpec {
            context,
            trigger,
            delta,
        })
    }

    pub fn agents(&self) -> &[Agent] {
        self.delta.agents()
    }

    pub fn observer(&self) -> Agent {
        self.context.inputs[self.trigger].observer
    }
}

/// Check a run set against the problem: in every triggered run whose trigger
/// occurred early enough for all consequences to resolve within the horizon
/// (`trigger time + guard <= horizon`), every coordinating agent responds
/// exactly once and the response times implement the constraining function;
/// in every untriggered run, none of them responds. Triggered runs whose
/// trigger falls inside the guard band are skipped as truncated.
pub fn verify_tcr<'a>(
    spec: &TcrSpec,
    runs: impl IntoIterator<Item = &'a Run>,
    guard: Time,
) -> bool {
    for run in runs {
        match run.input_time(spec.trigger) {
            None => {
                if spec.agents().iter().any(|&a| run.responses[a].is_some()) {
                    return false;
                }
            }
            Some(t0) => {
                if t0 + guard > run.horizon {
                    continue;
                }
                let mut times = Vec::with_capacity(spec.agents().len());
                for &a in spec.agents() {
                    match run.responses[a] {
                        Some(t) => times.push(t as i64),
                        None => return false,
                    }
                }
                let t = TimeAssignment::new(spec.agents().to_vec(), times);
                if verify_implementation(&spec.delta, &t) != Ok(true) {
                    return false;
                }
            }
        }
    }
    true
}

/// One chain of constraint-graph components and the communication-graph
/// witnesses found for it (if any).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainVerdict {
    /// Indices into the report's component list, ordered along the chain.
    pub components: Vec<usize>,
    /// One relay agent per component, aligned with `components`.
    pub witness: Option<Vec<Agent>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolvabilityReport {
    pub solvable: bool,
    /// Strongly connected components of the constraint graph, each sorted.
    pub sccs: Vec<Vec<Agent>>,
    /// When the communication graph is strongly connected, the per-chain
    /// search reduces to one condition per component.
    pub comm_strongly_connected: bool,
    pub chains: Vec<ChainVerdict>,
}

/// Decide solvability: for every chain of constraint-graph components
/// connected by constraint paths, relay agents must exist along a
/// communication path from the trigger's observer (last component first),
/// each within finite communication distance of its whole component.
pub fn check_solvability(spec: &TcrSpec) -> Result<SolvabilityReport, CoordinationError> {
    if !is_implementable(&spec.delta) {
        return Err(CoordinationError::NotImplementable);
    }
    let dist = comm_distance(&spec.context).map_err(|_| CoordinationError::InvalidSpec)?;
    let adj = spec.delta.adjacency();
    let comps = graph::tarjan_scc(&adj);
    let comp_of = graph::component_of(&comps, spec.delta.len());
    let dag = graph::condensation(&adj, &comp_of, comps.len());
    let dag_reach = graph::reachability(&dag);
    let sccs: Vec<Vec<Agent>> = comps
        .iter()
        .map(|c| c.iter().map(|&p| spec.delta.agents()[p]).collect())
        .collect();
    let comm_sc = dist.strongly_connected();
    let observer = spec.observer();
    let n_ctx = spec.context.agent_count;

    let covers = |relay: Agent, comp: usize| -> bool {
        sccs[comp].iter().all(|&j| dist.get(relay, j).is_finite())
    };

    let mut chains = Vec::new();
    if comm_sc {
        // Communication paths are free; one condition per component.
        for comp in 0..sccs.len() {
            let witness = (0..n_ctx).find(|&v| covers(v, comp)).map(|v| vec![v]);
            chains.push(ChainVerdict {
                components: vec![comp],
                witness,
            });
        }
    } else {
        // Every sequence of distinct components consecutively connected in
        // the condensation.
        let mut stack: Vec<Vec<usize>> = (0..sccs.len()).rev().map(|c| vec![c]).collect();
        let mut all_chains: Vec<Vec<usize>> = Vec::new();
        while let Some(chain) = stack.pop() {
            for next in 0..sccs.len() {
                if !chain.contains(&next) && dag_reach[*chain.last().unwrap()][next] {
                    let mut longer = chain.clone();
                    longer.push(next);
                    stack.push(longer);
                }
            }
            all_chains.push(chain);
        }
        all_chains.sort();
        for chain in all_chains {
            let witness = find_chain_witness(&chain, &dist, observer, n_ctx, &covers);
            chains.push(ChainVerdict {
                components: chain,
                witness,
            });
        }
    }
    let solvable = chains.iter().all(|c| c.witness.is_some());
    Ok(SolvabilityReport {
        solvable,
        sccs,
        comm_strongly_connected: comm_sc,
        chains,
    })
}

/// Search relay agents `i_1..i_n` for a component chain: a communication
/// path runs from the observer through `i_n`, then `i_{n-1}`, ..., to `i_1`,
/// and each `i_m` is within finite distance of all of component `m`.
fn find_chain_witness(
    chain: &[usize],
    dist: &CommDistance,
    observer: Agent,
    n_ctx: usize,
    covers: &impl Fn(Agent, usize) -> bool,
) -> Option<Vec<Agent>> {
    fn go(
        k: usize,
        upstream: Agent,
        chain: &[usize],
        dist: &CommDistance,
        n_ctx: usize,
        covers: &impl Fn(Agent, usize) -> bool,
        acc: &mut Vec<Agent>,
    ) -> bool {
        for v in 0..n_ctx {
            if dist.get(upstream, v).is_finite() && covers(v, chain[k]) {
                acc.push(v);
                if k == 0 || go(k - 1, v, chain, dist, n_ctx, covers, acc) {
                    return true;
                }
                acc.pop();
            }
        }
        false
    }
    let mut acc = Vec::new();
    if go(
        chain.len() - 1,
        observer,
        chain,
        dist,
        n_ctx,
        covers,
        &mut acc,
    ) {
        acc.reverse(); // produced i_n..i_1, report as i_1..i_n
        Some(acc)
    } else {
        None
    }
}

/// Worst-case time from the trigger's occurrence to the latest response of
/// an optimally driven protocol: the vertex form of the best relay,
/// `min_v [dist(observer, v) + max_{j in I} dist(v, j)]`.
///
/// Stated for non-negative constraints over a strongly connected constraint
/// graph; `+inf` signals an unbounded worst case.
pub fn worst_case_latest_response(spec: &TcrSpec) -> Result<ExtendedDelta, CoordinationError> {
    let mut violated = Vec::new();
    let n = spec.delta.len();
    let nonneg = (0..n).all(|i| (0..n).all(|j| i == j || spec.delta.get(i, j) >= Finite(0)));
    if !nonneg {
        violated.push(Precondition::DeltaNonNegative);
    }
    let comps = graph::tarjan_scc(&spec.delta.adjacency());
    if comps.len() != 1 {
        violated.push(Precondition::ConstraintGraphStronglyConnected);
    }
    if !violated.is_empty() {
        return Err(CoordinationError::PreconditionViolated(violated));
    }
    let dist = comm_distance(&spec.context).map_err(|_| CoordinationError::InvalidSpec)?;
    let observer = spec.observer();
    let mut best = PosInf;
    for v in 0..spec.context.agent_count {
        let to_v = dist.get(observer, v);
        let spread = spec
            .agents()
            .iter()
            .fold(Finite(0), |acc, &j| acc.max(dist.get(v, j)));
        best = best.min(to_v.add(spread));
    }
    Ok(best)
}

/// How per-component broom obligations bind chain events.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ObligationMode {
    /// The event at the last visit of a component must itself guarantee
    /// delivery to the whole component.
    EventCapable,
    /// None: coverage and saturation alone decide (the oracle's mode).
    None,
}

/// Shared decision engine: explores constraint paths from the evaluating
/// agent, threading sets of feasible chain events, and answers whether every
/// path requirement is met at the evaluation time.
struct ChainSearch<'e> {
    graph: &'e EventGraph,
    events: &'e [NdEvent],
    rooted: &'e [bool],
    dist: &'e CommDistance,
    t: i64,
    /// Path-graph adjacency: per vertex, `(successor, edge weight)`.
    edges: &'e [Vec<(usize, i64)>],
    /// Per vertex: agents to cover and their offsets from the position time.
    coverage: &'e [Vec<(Agent, i64)>],
    /// Per vertex: `(agent, dhat offset)` rows certifying all continuations.
    sat_rows: &'e [Vec<(Agent, i64)>],
    scc_of: &'e [usize],
    /// Per component: agents a chain event must reach for the obligation.
    capability: &'e [Vec<Agent>],
    mode: ObligationMode,
    budget: usize,
}

impl<'e> ChainSearch<'e> {
    fn covers(&self, e: usize, vertex: usize, cum: i64) -> bool {
        self.coverage[vertex].iter().all(|&(q, off)| {
            let target = self.t + cum + off;
            target >= 0 && self.reaches_by(e, q, target)
        })
    }

    fn reaches_by(&self, e: usize, agent: Agent, target: i64) -> bool {
        match self.dist.get(self.events[e].observer, agent) {
            Finite(d) => self.events[e].time as i64 + d <= target,
            _ => false,
        }
    }

    fn capable(&self, e: usize, comp: usize) -> bool {
        self.capability[comp]
            .iter()
            .all(|&q| self.dist.get(self.events[e].observer, q).is_finite())
    }

    fn obligation_ok(&self, e: usize, vertex: usize) -> bool {
        match self.mode {
            ObligationMode::EventCapable => self.capable(e, self.scc_of[vertex]),
            ObligationMode::None => true,
        }
    }

    fn saturated(&self, e: usize, vertex: usize, cum: i64) -> bool {
        self.sat_rows[vertex]
            .iter()
            .all(|&(q, off)| self.reaches_by(e, q, self.t + cum + off))
    }

    /// Every path requirement from `start` holds. Fails with
    /// `BudgetInsufficient` when exploration outruns the edge budget.
    fn run(&self, start: usize, feas: BTreeSet<usize>) -> Result<bool, CoordinationError> {
        let mut memo: BTreeMap<(usize, i64, Vec<usize>), bool> = BTreeMap::new();
        let mut visiting: BTreeSet<(usize, i64, Vec<usize>)> = BTreeSet::new();
        self.explore(start, 0, feas, 0, &mut memo, &mut visiting)
    }

    fn explore(
        &self,
        vertex: usize,
        cum: i64,
        feas: BTreeSet<usize>,
        depth: usize,
        memo: &mut BTreeMap<(usize, i64, Vec<usize>), bool>,
        visiting: &mut BTreeSet<(usize, i64, Vec<usize>)>,
    ) -> Result<bool, CoordinationError> {
        // Requirement for the path ending here: a feasible chain whose last
        // event is syncausally after the trigger and meets the obligation.
        if !feas
            .iter()
            .any(|&e| self.rooted[e] && self.obligation_ok(e, vertex))
        {
            return Ok(false);
        }
        // A single rooted event covering every continuation requirement
        // settles all longer paths through this node.
        if feas
            .iter()
            .any(|&e| self.rooted[e] && self.saturated(e, vertex, cum))
        {
            return Ok(true);
        }
        let key = (vertex, cum, feas.iter().copied().collect::<Vec<_>>());
        if let Some(&v) = memo.get(&key) {
            return Ok(v);
        }
        if visiting.contains(&key) {
            // A zero-length cycle repeats this exact state; its requirements
            // are those already being verified on the first pass.
            return Ok(true);
        }
        if depth >= self.budget {
            return Err(CoordinationError::BudgetInsufficient);
        }
        visiting.insert(key.clone());
        let mut verdict = true;
        for &(next, w) in &self.edges[vertex] {
            // Crossing a component boundary binds the obligation on the
            // event at the last visit, i.e. on the parent's chain event.
            let usable: Vec<usize> = feas
                .iter()
                .copied()
                .filter(|&e| {
                    self.scc_of[vertex] == self.scc_of[next] || self.obligation_ok(e, vertex)
                })
                .collect();
            let child: BTreeSet<usize> = (0..self.events.len())
                .filter(|&e2| self.covers(e2, next, cum + w))
                .filter(|&e2| usable.iter().any(|&e| self.graph.event_leq(e2, e)))
                .collect();
            if !self.explore(next, cum + w, child, depth + 1, memo, visiting)? {
                verdict = false;
                break;
            }
        }
        visiting.remove(&key);
        memo.insert(key, verdict);
        Ok(verdict)
    }
}

/// Precomputed tables shared by both response rules.
struct RuleTables {
    ctx: Context,
    trigger: InputId,
    delta: ImplementationSpec,
    agents: Vec<Agent>,
    dist: CommDistance,
    dhat: CanonicalForm,
    /// Per agent position, component id in the constraint graph.
    scc_of: Vec<usize>,
    /// Per component, its member agents.
    capability: Vec<Vec<Agent>>,
    /// Saturation rows indexed by agent position: `(agent, dhat(v, q))` for
    /// every finitely-constrained `q`.
    sat_rows: Vec<Vec<(Agent, i64)>>,
}

impl RuleTables {
    fn new(spec: &TcrSpec) -> Result<Self, CoordinationError> {
        if !spec.context.shared_clock {
            return Err(CoordinationError::SharedClockRequired);
        }
        let report = check_solvability(spec)?;
        if !report.solvable {
            return Err(CoordinationError::NotSolvable);
        }
        let dist = comm_distance(&spec.context).map_err(|_| CoordinationError::InvalidSpec)?;
        let dhat = canonical_form(&spec.delta);
        let comps = graph::tarjan_scc(&spec.delta.adjacency());
        let scc_of = graph::component_of(&comps, spec.delta.len());
        let capability: Vec<Vec<Agent>> = comps
            .iter()
            .map(|c| c.iter().map(|&p| spec.delta.agents()[p]).collect())
            .collect();
        let n = spec.delta.len();
        let sat_rows: Vec<Vec<(Agent, i64)>> = (0..n)
            .map(|v| {
                (0..n)
                    .filter_map(|q| dhat.get(v, q).finite().map(|d| (spec.delta.agents()[q], d)))
                    .collect()
            })
            .collect();
        Ok(RuleTables {
            ctx: spec.context.clone(),
            trigger: spec.trigger,
            delta: spec.delta.clone(),
            agents: spec.delta.agents().to_vec(),
            dist,
            dhat,
            scc_of,
            capability,
            sat_rows,
        })
    }

    /// Events of the agent's own causal cone at time `t`, with the trigger's
    /// index when known.
    fn cone(&self, state: &AgentState, t: Time) -> (EventGraph, Option<usize>) {
        let events: Vec<NdEvent> = state
            .iter()
            .map(|f: &Fact| NdEvent {
                time: f.time,
                kind: f.kind,
                observer: match f.kind {
                    NdEventKind::Input(i) => self.ctx.inputs[i].observer,
                    NdEventKind::EarlyDelivery(m) => m.recipient,
                },
            })
            .collect();
        let edges = SyncausalEdges::from_facts(&self.ctx, state.iter(), t);
        let graph = EventGraph::new(&edges, events);
        let trigger_idx = graph
            .events
            .iter()
            .position(|e| matches!(e.kind, NdEventKind::Input(i) if i == self.trigger));
        (graph, trigger_idx)
    }
}

/// The optimal response engine: representative paths over rigid equivalence
/// classes of the canonical form, whole-class coverage, and per-component
/// obligations, certified by saturation.
pub struct OptimalRule {
    tables: RuleTables,
    /// Rigid classes (positions into the agent list), each sorted.
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    budget: usize,
}

/// The oracle: the defining response condition checked directly on raw
/// constraint-graph paths, one coverage target per position.
pub struct BruteforceRule {
    tables: RuleTables,
    budget: usize,
}

/// Default exploration budget (path edges) for desk-scale scenarios.
pub const DEFAULT_PATH_BUDGET: usize = 256;

/// Construct the optimal rule; the spec must be solvable.
pub fn optimal_response_rule(spec: &TcrSpec) -> Result<OptimalRule, CoordinationError> {
    let tables = RuleTables::new(spec)?;
    let n = tables.agents.len();
    // Rigid classes: i ~ j when dhat(i,j) = -dhat(j,i), both finite.
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if class_of[i] != usize::MAX {
            continue;
        }
        let cid = classes.len();
        class_of[i] = cid;
        let mut members = vec![i];
        for j in i + 1..n {
            if class_of[j] == usize::MAX {
                if let (Finite(a), Finite(b)) = (tables.dhat.get(i, j), tables.dhat.get(j, i)) {
                    if a == -b {
                        class_of[j] = cid;
                        members.push(j);
                    }
                }
            }
        }
        classes.push(members);
    }
    Ok(OptimalRule {
        tables,
        classes,
        class_of,
        budget: DEFAULT_PATH_BUDGET,
    })
}

/// Construct the brute-force oracle with an explicit path budget.
pub fn bruteforce_response_rule(
    spec: &TcrSpec,
    path_budget: usize,
) -> Result<BruteforceRule, CoordinationError> {
    let tables = RuleTables::new(spec)?;
    let n = tables.agents.len();
    let has_edges = (0..n).any(|i| (0..n).any(|j| i != j && tables.delta.get(i, j) != PosInf));
    if path_budget == 0 && has_edges {
        return Err(CoordinationError::BudgetInsufficient);
    }
    Ok(BruteforceRule {
        tables,
        budget: path_budget,
    })
}

impl OptimalRule {
    pub fn try_should_respond(
        &self,
        agent: Agent,
        time: Time,
        state: &AgentState,
    ) -> Result<bool, CoordinationError> {
        let t = &self.tables;
        let Some(me) = t.agents.iter().position(|&a| a == agent) else {
            return Ok(false);
        };
        let (graph, Some(trigger_idx)) = t.cone(state, time) else {
            return Ok(false);
        };
        let rooted: Vec<bool> = (0..graph.events.len())
            .map(|e| graph.event_leq(trigger_idx, e))
            .collect();

        // Representatives: smallest position per class, except the
        // evaluator's class which is anchored at the evaluator (rigidity
        // makes the two pictures equivalent; this one needs no base shift).
        let my_class = self.class_of[me];
        let rep: Vec<usize> = (0..self.classes.len())
            .map(|c| {
                if c == my_class {
                    me
                } else {
                    self.classes[c][0]
                }
            })
            .collect();
        let nv = rep.len();
        let mut edges = vec![Vec::new(); nv];
        for u in 0..nv {
            for v in 0..nv {
                if u != v {
                    if let Finite(w) = t.dhat.get(rep[u], rep[v]) {
                        edges[u].push((v, w));
                    }
                }
            }
        }
        let coverage: Vec<Vec<(Agent, i64)>> = (0..nv)
            .map(|c| {
                self.classes[c]
                    .iter()
                    .map(|&q| {
                        let off = t
                            .dhat
                            .get(rep[c], q)
                            .finite()
                            .expect("rigid class distance");
                        (t.agents[q], off)
                    })
                    .collect()
            })
            .collect();
        let sat_rows: Vec<Vec<(Agent, i64)>> =
            (0..nv).map(|c| t.sat_rows[rep[c]].clone()).collect();
        let scc_of: Vec<usize> = (0..nv).map(|c| t.scc_of[rep[c]]).collect();

        let search = ChainSearch {
            graph: &graph,
            events: &graph.events,
            rooted: &rooted,
            dist: &t.dist,
            t: time as i64,
            edges: &edges,
            coverage: &coverage,
            sat_rows: &sat_rows,
            scc_of: &scc_of,
            capability: &t.capability,
            mode: ObligationMode::EventCapable,
            budget: self.budget,
        };
        let feas: BTreeSet<usize> = (0..graph.events.len())
            .filter(|&e| search.covers(e, my_class, 0))
            .collect();
        search.run(my_class, feas)
    }
}

impl ResponseRule for OptimalRule {
    fn should_respond(&self, agent: Agent, time: Time, state: &AgentState) -> bool {
        self.try_should_respond(agent, time, state)
            .expect("optimal rule exceeded its exploration budget")
    }
}

impl BruteforceRule {
    pub fn try_should_respond(
        &self,
        agent: Agent,
        time: Time,
        state: &AgentState,
    ) -> Result<bool, CoordinationError> {
        let t = &self.tables;
        let Some(me) = t.agents.iter().position(|&a| a == agent) else {
            return Ok(false);
        };
        let (graph, Some(trigger_idx)) = t.cone(state, time) else {
            return Ok(false);
        };
        let rooted: Vec<bool> = (0..graph.events.len())
            .map(|e| graph.event_leq(trigger_idx, e))
            .collect();
        let n = t.agents.len();
        let mut edges = vec![Vec::new(); n];
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    if let Finite(w) = t.delta.get(u, v) {
                        edges[u].push((v, w));
                    }
                }
            }
        }
        let coverage: Vec<Vec<(Agent, i64)>> = (0..n).map(|v| vec![(t.agents[v], 0)]).collect();
        let search = ChainSearch {
            graph: &graph,
            events: &graph.events,
            rooted: &rooted,
            dist: &t.dist,
            t: time as i64,
            edges: &edges,
            coverage: &coverage,
            sat_rows: &t.sat_rows,
            scc_of: &t.scc_of,
            capability: &t.capability,
            mode: ObligationMode::None,
            budget: self.budget,
        };
        let feas: BTreeSet<usize> = (0..graph.events.len())
            .filter(|&e| search.covers(e, me, 0))
            .collect();
        search.run(me, feas)
    }
}

impl ResponseRule for BruteforceRule {
    fn should_respond(&self, agent: Agent, time: Time, state: &AgentState) -> bool {
        self.try_should_respond(agent, time, state)
            .expect("brute-force rule exceeded its path budget")
    }
}

/// Handwritten reference rule: every listed agent responds a fixed delay
/// after the trigger's occurrence time, once it learns of it.
#[derive(Debug, Clone)]
pub struct FixedDelayRule {
    pub trigger: InputId,
    pub agents: Vec<Agent>,
    pub delay: Time,
}

impl ResponseRule for FixedDelayRule {
    fn should_respond(&self, agent: Agent, time: Time, state: &AgentState) -> bool {
        if !self.agents.contains(&agent) {
            return false;
        }
        state.iter().any(|f| {
            matches!(f.kind, NdEventKind::Input(i) if i == self.trigger)
                && time == f.time + self.delay
        })
    }
}

/// Handwritten rule: respond the moment the trigger is known. Does not
/// solve constrained problems in general; used as a negative reference.
#[derive(Debug, Clone)]
pub struct ImmediateRule {
    pub trigger: InputId,
    pub agents: Vec<Agent>,
}

impl ResponseRule for ImmediateRule {
    fn should_respond(&self, agent: Agent, _time: Time, state: &AgentState) -> bool {
        self.agents.contains(&agent)
            && state
                .iter()
                .any(|f| matches!(f.kind, NdEventKind::Input(i) if i == self.trigger))
    }
}

/// Replay a run's schedule under a different rule and report the response
/// times (timelines are rule-independent).
pub fn responses_under_rule(
    ctx: &Context,
    rule: &dyn ResponseRule,
    run: &Run,
) -> Vec<Option<Time>> {
    crate::runtime::simulate(ctx, rule, &run.schedule(), run.horizon)
        .expect("replaying a valid run's schedule")
        .responses
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::{Bound, Channel, InputSpec};
    use crate::runtime::{simulate, NdSchedule};

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

    fn gap_spec() -> TcrSpec {
        let delta = ImplementationSpec::new(vec![0, 1], &[((0, 1), Finite(1))]).unwrap();
        TcrSpec::new(c1(), 0, delta).unwrap()
    }

    fn zero_spec() -> TcrSpec {
        let delta = ImplementationSpec::uniform(vec![0, 1], Finite(0)).unwrap();
        TcrSpec::new(c1(), 0, delta).unwrap()
    }

    #[test]
    fn solvability_on_c1() {
        let report = check_solvability(&zero_spec()).unwrap();
        assert!(report.solvable);
        assert!(report.comm_strongly_connected);
        assert_eq!(report.sccs, vec![vec![0, 1]]);
        assert_eq!(report.chains[0].witness, Some(vec![0]));
    }

    #[test]
    fn solvability_one_way_channel() {
        let mut spec = zero_spec();
        spec.context.channels.retain(|c| c.from == 0);
        let report = check_solvability(&spec).unwrap();
        assert!(report.solvable);
        assert!(!report.comm_strongly_connected);
        spec.context.channels.clear();
        let report = check_solvability(&spec).unwrap();
        assert!(!report.solvable);
    }

    #[test]
    fn solvability_rejects_negative_cycle() {
        let delta =
            ImplementationSpec::new(vec![0, 1], &[((0, 1), Finite(-1)), ((1, 0), Finite(0))])
                .unwrap();
        let spec = TcrSpec::new(c1(), 0, delta).unwrap();
        assert_eq!(
            check_solvability(&spec),
            Err(CoordinationError::NotImplementable)
        );
    }

    #[test]
    fn worst_case_bound_on_c1() {
        assert_eq!(worst_case_latest_response(&zero_spec()), Ok(Finite(2)));
    }

    #[test]
    fn worst_case_bound_preconditions() {
        let err = worst_case_latest_response(&gap_spec()).unwrap_err();
        assert_eq!(
            err,
            CoordinationError::PreconditionViolated(vec![
                Precondition::ConstraintGraphStronglyConnected
            ])
        );
    }

    #[test]
    fn optimal_rule_on_gap_spec_max_delay() {
        // Constraint 0 -> 1 of weight 1: agent 1 may respond at most one
        // tick after agent 0.
        let spec = gap_spec();
        let rule = optimal_response_rule(&spec).unwrap();
        let sched = NdSchedule::silent(1).with_input(0, 0);
        let run = simulate(&spec.context, &rule, &sched, 5).unwrap();
        assert_eq!(run.responses, vec![Some(1), Some(2)]);
    }

    #[test]
    fn optimal_rule_on_zero_spec_max_delay() {
        let spec = zero_spec();
        let rule = optimal_response_rule(&spec).unwrap();
        let sched = NdSchedule::silent(1).with_input(0, 0);
        let run = simulate(&spec.context, &rule, &sched, 5).unwrap();
        assert_eq!(run.responses, vec![Some(2), Some(2)]);
    }

    #[test]
    fn bruteforce_matches_on_max_delay_runs() {
        for spec in [gap_spec(), zero_spec()] {
            let opt = optimal_response_rule(&spec).unwrap();
            let bf = bruteforce_response_rule(&spec, DEFAULT_PATH_BUDGET).unwrap();
            let sched = NdSchedule::silent(1).with_input(0, 0);
            let run_o = simulate(&spec.context, &opt, &sched, 5).unwrap();
            let run_b = simulate(&spec.context, &bf, &sched, 5).unwrap();
            assert_eq!(run_o.responses, run_b.responses);
        }
    }

    #[test]
    fn zero_budget_with_edges_is_rejected() {
        assert_eq!(
            bruteforce_response_rule(&gap_spec(), 0).err(),
            Some(CoordinationError::BudgetInsufficient)
        );
    }

    #[test]
    fn untriggered_runs_stay_silent() {
        let spec = gap_spec();
        let rule = optimal_response_rule(&spec).unwrap();
        let run = simulate(&spec.context, &rule, &NdSchedule::silent(1), 5).unwrap();
        assert_eq!(run.responses, vec![None, None]);
    }

    #[test]
    fn verify_tcr_accepts_optimal_and_rejects_partial() {
        let spec = gap_spec();
        let rule = optimal_response_rule(&spec).unwrap();
        let sched = NdSchedule::silent(1).with_input(0, 0);
        let good = simulate(&spec.context, &rule, &sched, 5).unwrap();
        assert!(verify_tcr(&spec, [&good], 3));
        let lonely = ImmediateRule {
            trigger: 0,
            agents: vec![0],
        };
        let bad = simulate(&spec.context, &lonely, &sched, 5).unwrap();
        assert!(!verify_tcr(&spec, [&bad], 3));
        let eager = ImmediateRule {
            trigger: 0,
            agents: vec![0, 1],
        };
        let silent_run = simulate(&spec.context, &eager, &NdSchedule::silent(1), 5).unwrap();
        assert!(verify_tcr(&spec, [&silent_run], 3));
    }
}
