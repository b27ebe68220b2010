//! Constraining functions over ordered agent pairs, their weighted graphs,
//! canonical forms, implementability and implementation construction.
//!
//! A constraining function `delta` bounds the response-time difference of
//! every ordered pair of distinct agents: an assignment `t` implements
//! `delta` when `t(j) <= t(i) + delta(i,j)` for every pair `(i,j)`. The
//! canonical form is the distance function of the weighted digraph whose
//! edges are the pairs with a non-`+inf` constraint; it is the minimal
//! constraining function with the same implementation set.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::delta::{ExtendedDelta, Finite, NegInf, PosInf};
use crate::graph;
use crate::Agent;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintError {
    /// The constraining function admits no implementation.
    NotImplementable,
    /// A time assignment ranges over a different agent set than the spec.
    AgentMismatch,
    /// An operation required two distinct agents.
    SameAgent,
    /// An agent id that is not part of the spec.
    UnknownAgent(Agent),
    /// The agent list contains a repeated id.
    DuplicateAgent(Agent),
}

impl fmt::Display for ConstraintError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintError::NotImplementable => {
                write!(f, "constraining function is not implementable")
            }
            ConstraintError::AgentMismatch => {
                write!(f, "time assignment does not range over the spec's agents")
            }
            ConstraintError::SameAgent => write!(f, "two distinct agents are required"),
            ConstraintError::UnknownAgent(a) => write!(f, "unknown agent {a}"),
            ConstraintError::DuplicateAgent(a) => write!(f, "duplicate agent {a}"),
        }
    }
}

/// A finite agent set plus a constraining function on ordered distinct pairs.
///
/// Pairs omitted at construction default to `+inf` (no constraint).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImplementationSpec {
    agents: Vec<Agent>,
    /// Row-major `n x n`; the diagonal is unused and fixed at `+inf`.
    delta: Vec<ExtendedDelta>,
}

impl ImplementationSpec {
    /// Build a spec from an agent list and explicit `((from, to), value)`
    /// entries; omitted pairs are `+inf`.
    pub fn new(
        agents: Vec<Agent>,
        entries: &[((Agent, Agent), ExtendedDelta)],
    ) -> Result<Self, ConstraintError> {
        for (k, &a) in agents.iter().enumerate() {
            if agents[..k].contains(&a) {
                return Err(ConstraintError::DuplicateAgent(a));
            }
        }
        let n = agents.len();
        let mut delta = vec![PosInf; n * n];
        let pos = |a: Agent| agents.iter().position(|&x| x == a);
        for &((from, to), value) in entries {
            let i = pos(from).ok_or(ConstraintError::UnknownAgent(from))?;
            let j = pos(to).ok_or(ConstraintError::UnknownAgent(to))?;
            if i == j {
                return Err(ConstraintError::SameAgent);
            }
            delta[i * n + j] = value;
        }
        Ok(ImplementationSpec { agents, delta })
    }

    /// Uniform constraint `value` on every ordered distinct pair.
    pub fn uniform(agents: Vec<Agent>, value: ExtendedDelta) -> Result<Self, ConstraintError> {
        let pairs: Vec<_> = agents
            .iter()
            .flat_map(|&a| agents.iter().map(move |&b| (a, b)))
            .filter(|&(a, b)| a != b)
            .map(|p| (p, value))
            .collect();
        Self::new(agents, &pairs)
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn position(&self, agent: Agent) -> Option<usize> {
        self.agents.iter().position(|&a| a == agent)
    }

    /// Constraint by positional indices (`i != j`).
    pub fn get(&self, i: usize, j: usize) -> ExtendedDelta {
        debug_assert_ne!(i, j);
        self.delta[i * self.agents.len() + j]
    }

    /// Constraint by agent ids.
    pub fn get_by_agent(&self, from: Agent, to: Agent) -> Option<ExtendedDelta> {
        let (i, j) = (self.position(from)?, self.position(to)?);
        if i == j {
            return None;
        }
        Some(self.get(i, j))
    }

    /// The weighted digraph of the spec: exactly the ordered distinct pairs
    /// whose constraint is not `+inf`, with their (finite or `-inf`) weights.
    pub fn constraint_graph(&self) -> ConstraintGraph {
        let n = self.len();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && self.get(i, j) != PosInf {
                    edges.push((self.agents[i], self.agents[j], self.get(i, j)));
                }
            }
        }
        ConstraintGraph {
            vertices: self.agents.clone(),
            edges,
        }
    }

    /// Positional adjacency list of the constraint graph.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut adj = vec![Vec::new(); n];
        for i in 0..n {
            for j in 0..n {
                if i != j && self.get(i, j) != PosInf {
                    adj[i].push(j);
                }
            }
        }
        adj
    }
}

/// Edge view of `G_delta`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintGraph {
    pub vertices: Vec<Agent>,
    pub edges: Vec<(Agent, Agent, ExtendedDelta)>,
}

/// The canonical form: the full distance matrix of `G_delta`, diagonal
/// included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    agents: Vec<Agent>,
    dhat: Vec<ExtendedDelta>,
}

impl CanonicalForm {
    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    /// Distance by positional indices; the diagonal is meaningful here.
    pub fn get(&self, i: usize, j: usize) -> ExtendedDelta {
        self.dhat[i * self.agents.len() + j]
    }

    pub fn get_by_agent(&self, from: Agent, to: Agent) -> Option<ExtendedDelta> {
        let i = self.agents.iter().position(|&a| a == from)?;
        let j = self.agents.iter().position(|&a| a == to)?;
        Some(self.get(i, j))
    }

    /// Minimum of row `i` (diagonal included). Never `+inf`: the diagonal
    /// contributes at most `0`.
    pub fn row_min(&self, i: usize) -> ExtendedDelta {
        (0..self.len()).fold(PosInf, |acc, j| acc.min(self.get(i, j)))
    }

    pub fn has_neg_inf(&self) -> bool {
        self.dhat.contains(&NegInf)
    }

    /// Reinterpret the off-diagonal entries as a constraining function.
    pub fn to_spec(&self) -> ImplementationSpec {
        let n = self.len();
        let mut entries = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    entries.push(((self.agents[i], self.agents[j]), self.get(i, j)));
                }
            }
        }
        ImplementationSpec::new(self.agents.clone(), &entries)
            .expect("canonical form is a valid spec")
    }
}

/// A non-negative response-time assignment for the spec's agents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimeAssignment {
    agents: Vec<Agent>,
    times: Vec<i64>,
}

impl TimeAssignment {
    pub fn new(agents: Vec<Agent>, times: Vec<i64>) -> Self {
        assert_eq!(agents.len(), times.len());
        assert!(
            times.iter().all(|&t| t >= 0),
            "assignment times must be non-negative"
        );
        TimeAssignment { agents, times }
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn times(&self) -> &[i64] {
        &self.times
    }

    pub fn time_of(&self, agent: Agent) -> Option<i64> {
        let i = self.agents.iter().position(|&a| a == agent)?;
        Some(self.times[i])
    }
}

/// Distance matrix of `G_delta`: infimum of walk lengths between every
/// ordered vertex pair, the empty walk included on the diagonal.
///
/// `+inf` marks unreachable pairs; `-inf` marks pairs connected by a walk
/// through a negative cycle or a `-inf` edge. Relaxation runs over the
/// finite-weight edges only, so the undefined extended sum cannot arise.
pub fn canonical_form(spec: &ImplementationSpec) -> CanonicalForm {
    let n = spec.len();
    let mut fin_edges: Vec<(usize, usize, i64)> = Vec::new();
    let mut neg_edges: Vec<(usize, usize)> = Vec::new();
    let mut adj_all = vec![Vec::new(); n];
    let mut adj_fin = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            match spec.get(i, j) {
                PosInf => {}
                NegInf => {
                    neg_edges.push((i, j));
                    adj_all[i].push(j);
                }
                Finite(w) => {
                    fin_edges.push((i, j, w));
                    adj_all[i].push(j);
                    adj_fin[i].push(j);
                }
            }
        }
    }
    let reach_all = graph::reachability(&adj_all);

    let mut dhat = vec![PosInf; n * n];
    for s in 0..n {
        // Bellman-Ford over the finite edges from source s.
        let mut dist: Vec<Option<i64>> = vec![None; n];
        dist[s] = Some(0);
        for _ in 0..n.saturating_sub(1) {
            let mut changed = false;
            for &(u, v, w) in &fin_edges {
                if let Some(du) = dist[u] {
                    let cand = du + w;
                    if dist[v].is_none_or(|dv| cand < dv) {
                        dist[v] = Some(cand);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        // Round n: anything that still relaxes sits on (or behind) a negative
        // cycle; everything it reaches is -inf from this source.
        let mut marked = vec![false; n];
        for &(u, v, w) in &fin_edges {
            if let Some(du) = dist[u] {
                if dist[v].is_none_or(|dv| du + w < dv) {
                    marked[v] = true;
                }
            }
        }
        let mut todo: Vec<usize> = (0..n).filter(|&v| marked[v]).collect();
        while let Some(u) = todo.pop() {
            for &v in &adj_fin[u] {
                if !marked[v] {
                    marked[v] = true;
                    todo.push(v);
                }
            }
        }
        for v in 0..n {
            dhat[s * n + v] = if marked[v] {
                NegInf
            } else {
                match dist[v] {
                    Some(d) => Finite(d),
                    None => PosInf,
                }
            };
        }
    }
    // Any walk traversing a -inf edge has length -inf.
    for &(u, v) in &neg_edges {
        for s in 0..n {
            if reach_all[s][u] {
                for w in 0..n {
                    if reach_all[v][w] {
                        dhat[s * n + w] = NegInf;
                    }
                }
            }
        }
    }
    CanonicalForm {
        agents: spec.agents.clone(),
        dhat,
    }
}

/// A constraining function over a finite agent set is implementable exactly
/// when its canonical form is bounded below on every row, which here means
/// it contains no `-inf` entry.
pub fn is_implementable(spec: &ImplementationSpec) -> bool {
    !canonical_form(spec).has_neg_inf()
}

/// The coordinate-wise minimal implementation: `t(i) = -min` of row `i` of
/// the canonical form.
pub fn minimal_implementation(
    spec: &ImplementationSpec,
) -> Result<TimeAssignment, ConstraintError> {
    let dhat = canonical_form(spec);
    if dhat.has_neg_inf() {
        return Err(ConstraintError::NotImplementable);
    }
    let times: Vec<i64> = (0..spec.len())
        .map(|i| match dhat.row_min(i) {
            Finite(m) => -m,
            _ => unreachable!("row minimum of an implementable form is finite"),
        })
        .collect();
    Ok(TimeAssignment::new(spec.agents.clone(), times))
}

/// Check `t(j) <= t(i) + delta(i,j)` on every ordered distinct pair.
pub fn verify_implementation(
    spec: &ImplementationSpec,
    t: &TimeAssignment,
) -> Result<bool, ConstraintError> {
    if t.agents() != spec.agents() {
        return Err(ConstraintError::AgentMismatch);
    }
    let n = spec.len();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let bound = Finite(t.times[i]).add(spec.get(i, j));
            if Finite(t.times[j]) > bound {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// An implementation attaining the canonical-form bound for the pair
/// `(from, to)`: when `dhat(from, to)` is finite the returned assignment has
/// `t(to) - t(from)` equal to it, and when it is `+inf` the gap is at least
/// `k`.
///
/// Construction: replace each `+inf` entry of the spec with a per-column
/// slack constant (each column's minimal-implementation value, bumped
/// uniformly when the first attempt undershoots), then translate row `from`
/// of the resulting canonical form into the non-negative range.
pub fn extremal_implementation(
    spec: &ImplementationSpec,
    from: Agent,
    to: Agent,
    k: i64,
) -> Result<TimeAssignment, ConstraintError> {
    if from == to {
        return Err(ConstraintError::SameAgent);
    }
    let i = spec
        .position(from)
        .ok_or(ConstraintError::UnknownAgent(from))?;
    let j = spec.position(to).ok_or(ConstraintError::UnknownAgent(to))?;
    let dhat = canonical_form(spec);
    if dhat.has_neg_inf() {
        return Err(ConstraintError::NotImplementable);
    }
    let n = spec.len();
    let slack: Vec<i64> = (0..n)
        .map(|u| match dhat.row_min(u) {
            Finite(m) => -m,
            _ => unreachable!(),
        })
        .collect();
    let target = match dhat.get(i, j) {
        Finite(d) => d,
        PosInf => k,
        NegInf => unreachable!(),
    };

    let complete = |extra: i64| -> CanonicalForm {
        let mut entries = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if u == v {
                    continue;
                }
                let value = match spec.get(u, v) {
                    PosInf => Finite(slack[v] + extra),
                    d => d,
                };
                entries.push(((spec.agents[u], spec.agents[v]), value));
            }
        }
        canonical_form(
            &ImplementationSpec::new(spec.agents.clone(), &entries).expect("same agent set"),
        )
    };

    let first = complete(0);
    let gap = first
        .get(i, j)
        .finite()
        .expect("completed graph has finite distances");
    let (used, base) = if gap >= target {
        (first, slack[i])
    } else {
        let bump = target - gap;
        (complete(bump), slack[i] + bump)
    };
    debug_assert!({
        let g = used.get(i, j).finite().expect("finite");
        if dhat.get(i, j).is_finite() {
            g == target
        } else {
            g >= target
        }
    });
    let times: Vec<i64> = (0..n)
        .map(|v| base + used.get(i, v).finite().expect("finite completed distance"))
        .collect();
    let t = TimeAssignment::new(spec.agents.clone(), times);
    debug_assert_eq!(verify_implementation(spec, &t), Ok(true));
    Ok(t)
}
