//! Brute-force knowledge oracle over finite point spaces.
//!
//! A point space indexes every (run, time) pair of an enumerated run set and
//! partitions it per agent by indistinguishability: equal full-information
//! state, and equal time under a shared clock. Knowledge, temporal shifts
//! and the vectorial fixed points are computed extensionally as bitsets over
//! the points, so equality questions are exact. This module is deliberately
//! independent of the syncausal machinery: it is the oracle the response
//! engines are validated against.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::constraints::{canonical_form, ImplementationSpec};
use crate::context::{comm_distance, Context};
use crate::delta::{ExtendedDelta, Finite, NegInf, PosInf};
use crate::runtime::Run;
use crate::{Agent, InputId, Time};

/// A set of points, stored as a bitset. All set operations require both
/// operands to come from the same space and panic otherwise.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PointSet {
    len: usize,
    words: Vec<u64>,
}

impl PointSet {
    pub fn empty(len: usize) -> Self {
        PointSet {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn full(len: usize) -> Self {
        let mut s = Self::empty(len);
        for i in 0..len {
            s.insert(i);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        assert!(i < self.len);
        self.words[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn intersect(&self, other: &Self) -> Self {
        assert_eq!(self.len, other.len, "point sets from different spaces");
        PointSet {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        assert_eq!(self.len, other.len, "point sets from different spaces");
        PointSet {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a | b)
                .collect(),
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        assert_eq!(self.len, other.len, "point sets from different spaces");
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.contains(i))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EpistemicError {
    /// Runs of differing horizons or agent counts cannot share a space.
    InhomogeneousRuns,
    EmptySpace,
    /// The shift-form fixed point requires constraints above `-inf`.
    DeltaNegInf,
    /// Fewer than two coordinating agents.
    TooFewAgents,
    /// An ensemble coordinate is not local to its agent.
    NotLocal(Agent),
}

impl fmt::Display for EpistemicError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EpistemicError::InhomogeneousRuns => write!(f, "runs do not share horizon and agents"),
            EpistemicError::EmptySpace => write!(f, "no runs"),
            EpistemicError::DeltaNegInf => write!(f, "constraints must exceed -inf"),
            EpistemicError::TooFewAgents => write!(f, "at least two agents required"),
            EpistemicError::NotLocal(a) => write!(f, "coordinate of agent {a} is not local"),
        }
    }
}

/// A finite space of (run, time) points with per-agent indistinguishability
/// partitions.
pub struct PointSpace {
    runs: Vec<Run>,
    horizon: Time,
    points: usize,
    /// Per agent: cell id of every point, and the member list of every cell.
    cells: Vec<(Vec<u32>, Vec<Vec<u32>>)>,
}

impl PointSpace {
    /// Build the space of `runs × {0..=horizon}`. Partitions merge points
    /// with equal agent state; under a shared clock they additionally demand
    /// equal time.
    pub fn new(ctx: &Context, runs: Vec<Run>) -> Result<Self, EpistemicError> {
        let first = runs.first().ok_or(EpistemicError::EmptySpace)?;
        let horizon = first.horizon;
        if runs
            .iter()
            .any(|r| r.horizon != horizon || r.agent_count() != ctx.agent_count)
        {
            return Err(EpistemicError::InhomogeneousRuns);
        }
        let steps = horizon as usize + 1;
        let points = runs.len() * steps;
        let mut cells = Vec::with_capacity(ctx.agent_count);
        for agent in 0..ctx.agent_count {
            let mut of_point = vec![0u32; points];
            let mut members: Vec<Vec<u32>> = Vec::new();
            let mut seen: BTreeMap<(Option<Time>, &crate::runtime::AgentState), u32> =
                BTreeMap::new();
            for (ri, run) in runs.iter().enumerate() {
                for t in 0..=horizon {
                    let key = (
                        if ctx.shared_clock { Some(t) } else { None },
                        run.state(agent, t),
                    );
                    let p = (ri * steps + t as usize) as u32;
                    let cell = *seen.entry(key).or_insert_with(|| {
                        members.push(Vec::new());
                        (members.len() - 1) as u32
                    });
                    of_point[p as usize] = cell;
                    members[cell as usize].push(p);
                }
            }
            cells.push((of_point, members));
        }
        Ok(PointSpace {
            runs,
            horizon,
            points,
            cells,
        })
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points == 0
    }

    pub fn horizon(&self) -> Time {
        self.horizon
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    pub fn point(&self, run: usize, t: Time) -> usize {
        run * (self.horizon as usize + 1) + t as usize
    }

    pub fn decompose(&self, point: usize) -> (usize, Time) {
        let steps = self.horizon as usize + 1;
        (point / steps, (point % steps) as Time)
    }

    pub fn empty_set(&self) -> PointSet {
        PointSet::empty(self.points)
    }

    pub fn full_set(&self) -> PointSet {
        PointSet::full(self.points)
    }

    /// The event "the input is occurring right now".
    pub fn input_occurring(&self, input: InputId) -> PointSet {
        let mut s = self.empty_set();
        for (ri, run) in self.runs.iter().enumerate() {
            if let Some(t) = run.input_time(input) {
                s.insert(self.point(ri, t));
            }
        }
        s
    }

    /// Knowledge: the points whose whole indistinguishability cell lies in
    /// `psi`.
    pub fn knows(&self, agent: Agent, psi: &PointSet) -> PointSet {
        assert_eq!(psi.len(), self.points, "point set from another space");
        let (_, members) = &self.cells[agent];
        let mut out = self.empty_set();
        for cell in members {
            if cell.iter().all(|&p| psi.contains(p as usize)) {
                for &p in cell {
                    out.insert(p as usize);
                }
            }
        }
        out
    }

    /// An event is local to an agent when knowing it is the same as it
    /// holding.
    pub fn is_local(&self, agent: Agent, set: &PointSet) -> bool {
        &self.knows(agent, set) == set
    }

    /// "psi holds at some time no later than `eps` from now" — within the
    /// same run; `+inf` yields the some-time operator, `-inf` the empty set.
    pub fn no_later_than(&self, eps: ExtendedDelta, psi: &PointSet) -> PointSet {
        assert_eq!(psi.len(), self.points);
        let mut out = self.empty_set();
        match eps {
            NegInf => out,
            PosInf => {
                for ri in 0..self.runs.len() {
                    if (0..=self.horizon).any(|t| psi.contains(self.point(ri, t))) {
                        for t in 0..=self.horizon {
                            out.insert(self.point(ri, t));
                        }
                    }
                }
                out
            }
            Finite(e) => {
                for ri in 0..self.runs.len() {
                    let earliest = (0..=self.horizon).find(|&t| psi.contains(self.point(ri, t)));
                    if let Some(t0) = earliest {
                        for t in 0..=self.horizon {
                            if t0 as i64 <= t as i64 + e {
                                out.insert(self.point(ri, t));
                            }
                        }
                    }
                }
                out
            }
        }
    }

    /// The some-time operator: `psi` holds at some point of the run.
    pub fn sometime(&self, psi: &PointSet) -> PointSet {
        self.no_later_than(PosInf, psi)
    }

    /// Shift semantics: "psi holds at exactly `eps` from now". Points whose
    /// target time falls outside the horizon are excluded; the second value
    /// counts them.
    pub fn at_exactly_clipped(&self, eps: i64, psi: &PointSet) -> (PointSet, usize) {
        assert_eq!(psi.len(), self.points);
        let mut out = self.empty_set();
        let mut clipped = 0;
        for ri in 0..self.runs.len() {
            for t in 0..=self.horizon {
                let target = t as i64 + eps;
                if target < 0 || target > self.horizon as i64 {
                    clipped += 1;
                } else if psi.contains(self.point(ri, target as Time)) {
                    out.insert(self.point(ri, t));
                }
            }
        }
        (out, clipped)
    }

    pub fn at_exactly(&self, eps: i64, psi: &PointSet) -> PointSet {
        self.at_exactly_clipped(eps, psi).0
    }

    /// Everybody-knows over a set of agents.
    pub fn everyone_knows(&self, agents: &[Agent], psi: &PointSet) -> PointSet {
        agents.iter().fold(self.full_set(), |acc, &a| {
            acc.intersect(&self.knows(a, psi))
        })
    }

    /// Common knowledge, computed along both classic routes — the nested
    /// everybody-knows intersection and the greatest fixed point of
    /// `x -> E(psi ∩ x)` by downward iteration — which must agree.
    pub fn common_knowledge(&self, agents: &[Agent], psi: &PointSet) -> PointSet {
        let mut nested = self.everyone_knows(agents, psi);
        loop {
            let next = self.everyone_knows(agents, &nested);
            if next == nested {
                break;
            }
            nested = next;
        }
        let mut gfp = self.full_set();
        loop {
            let next = self.everyone_knows(agents, &psi.intersect(&gfp));
            if next == gfp {
                break;
            }
            debug_assert!(next.is_subset(&gfp));
            gfp = next;
        }
        assert_eq!(nested, gfp, "the two common-knowledge routes must agree");
        gfp
    }

    /// Downward Kleene iteration of a monotone operator on agent-indexed
    /// tuples, from the top tuple; on a finite lattice the limit is the
    /// greatest fixed point.
    fn tuple_gfp(&self, arity: usize, step: impl Fn(&[PointSet]) -> Vec<PointSet>) -> FixedPoint {
        let mut current = vec![self.full_set(); arity];
        let mut iterations = 0;
        loop {
            let next = step(&current);
            iterations += 1;
            let decreased = next.iter().zip(&current).all(|(n, c)| n.is_subset(c));
            assert!(
                decreased,
                "fixed-point iteration must be pointwise decreasing"
            );
            if next == current {
                return FixedPoint {
                    coords: current,
                    iterations,
                };
            }
            current = next;
        }
    }

    /// Greatest fixed point of the vectorial knowledge operator
    /// `x_i -> ⋂_{j≠i} no_later_than(delta(i,j), K_j(psi ∩ x_j))`,
    /// coordinates aligned with `delta.agents()`.
    pub fn delta_common_knowledge(
        &self,
        delta: &ImplementationSpec,
        psi: &PointSet,
    ) -> Result<FixedPoint, EpistemicError> {
        let n = delta.len();
        if n < 2 {
            return Err(EpistemicError::TooFewAgents);
        }
        Ok(self.tuple_gfp(n, |x| {
            (0..n)
                .map(|i| {
                    let mut acc = self.full_set();
                    for j in 0..n {
                        if j != i {
                            let known = self.knows(delta.agents()[j], &psi.intersect(&x[j]));
                            acc = acc.intersect(&self.no_later_than(delta.get(i, j), &known));
                        }
                    }
                    acc
                })
                .collect()
        }))
    }

    /// The shift-form fixed point: `x_i -> ◇◇psi ∩ ⋂_{j≠i, δ(i,j)≠+inf}
    /// at_exactly(delta(i,j), K_j(psi ∩ x_j))`. Requires `delta > -inf`.
    pub fn g_delta_common_knowledge(
        &self,
        delta: &ImplementationSpec,
        psi: &PointSet,
    ) -> Result<FixedPoint, EpistemicError> {
        let n = delta.len();
        if n < 2 {
            return Err(EpistemicError::TooFewAgents);
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && delta.get(i, j) == NegInf {
                    return Err(EpistemicError::DeltaNegInf);
                }
            }
        }
        let some = self.sometime(psi);
        Ok(self.tuple_gfp(n, |x| {
            (0..n)
                .map(|i| {
                    let mut acc = some.clone();
                    for j in 0..n {
                        if j != i {
                            if let Finite(e) = delta.get(i, j) {
                                let known = self.knows(delta.agents()[j], &psi.intersect(&x[j]));
                                acc = acc.intersect(&self.at_exactly(e, &known));
                            }
                        }
                    }
                    acc
                })
                .collect()
        }))
    }

    /// Scalar eventual-common-knowledge: gfp of `x -> ⋂_i ◇◇ K_i(psi ∩ x)`.
    pub fn eventual_common_knowledge(&self, agents: &[Agent], psi: &PointSet) -> PointSet {
        let mut current = self.full_set();
        loop {
            let mut next = self.full_set();
            for &a in agents {
                next = next.intersect(&self.sometime(&self.knows(a, &psi.intersect(&current))));
            }
            if next == current {
                return current;
            }
            debug_assert!(next.is_subset(&current));
            current = next;
        }
    }

    /// Pairwise coordination check: for every ordered distinct pair `(i,j)`
    /// and every point of `e_i`, some point of `e_j` in the same run lies no
    /// later than `delta(i,j)` after it.
    pub fn is_delta_coordinated(&self, ensemble: &[PointSet], delta: &ImplementationSpec) -> bool {
        let n = delta.len();
        assert_eq!(ensemble.len(), n);
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let window = self.no_later_than(delta.get(i, j), &ensemble[j]);
                if !ensemble[i].is_subset(&window) {
                    return false;
                }
            }
        }
        true
    }

    /// Verify `K_i(◇◇ input) = K_i(no_later_than(0, input))` for every
    /// agent: knowing an ND event will ever occur is knowing it already has.
    pub fn nd_knowledge_check(&self, ctx: &Context, input: InputId) -> NdKnowledgeReport {
        let occurring = self.input_occurring(input);
        let eventually = self.sometime(&occurring);
        let already = self.no_later_than(Finite(0), &occurring);
        let mut failures = Vec::new();
        for agent in 0..ctx.agent_count {
            let lhs = self.knows(agent, &eventually);
            let rhs = self.knows(agent, &already);
            if lhs != rhs {
                for p in 0..self.points {
                    if lhs.contains(p) != rhs.contains(p) {
                        let (run, t) = self.decompose(p);
                        failures.push(NdKnowledgeFailure { agent, run, t });
                    }
                }
            }
        }
        NdKnowledgeReport { failures }
    }
}

/// One agent-local point set per coordinating agent. Locality (the agent
/// knows its own coordinate wherever it holds) is checked at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ensemble {
    agents: Vec<Agent>,
    coords: Vec<PointSet>,
}

impl Ensemble {
    pub fn new(
        space: &PointSpace,
        agents: Vec<Agent>,
        coords: Vec<PointSet>,
    ) -> Result<Self, EpistemicError> {
        assert_eq!(agents.len(), coords.len());
        for (&a, c) in agents.iter().zip(&coords) {
            if !space.is_local(a, c) {
                return Err(EpistemicError::NotLocal(a));
            }
        }
        Ok(Ensemble { agents, coords })
    }

    /// The knowledge projections of a fixed point always form an ensemble.
    pub fn from_fixed_point(space: &PointSpace, agents: &[Agent], fp: &FixedPoint) -> Self {
        let coords = agents
            .iter()
            .zip(&fp.coords)
            .map(|(&a, c)| space.knows(a, c))
            .collect();
        Ensemble {
            agents: agents.to_vec(),
            coords,
        }
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn coords(&self) -> &[PointSet] {
        &self.coords
    }
}

/// Result of a tuple fixed-point computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedPoint {
    pub coords: Vec<PointSet>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NdKnowledgeFailure {
    pub agent: Agent,
    pub run: usize,
    pub t: Time,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NdKnowledgeReport {
    pub failures: Vec<NdKnowledgeFailure>,
}

impl NdKnowledgeReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Horizon slack for comparing fixed points against syncausal results:
/// assertions are confined to points with `t + slack <= horizon`, where the
/// temporal operators cannot have been clipped. The slack combines the
/// minimal-implementation spread, the largest finite constraint and the
/// finite communication diameter.
pub fn slack_guard(ctx: &Context, delta: &ImplementationSpec) -> Time {
    let dhat = canonical_form(delta);
    let n = delta.len();
    let spread = (0..n)
        .map(|i| match dhat.row_min(i) {
            Finite(m) => (-m).max(0),
            _ => 0,
        })
        .max()
        .unwrap_or(0);
    let max_delta = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .filter_map(|(i, j)| delta.get(i, j).finite())
        .max()
        .unwrap_or(0)
        .max(0);
    let diameter = comm_distance(ctx)
        .ok()
        .and_then(|d| d.finite_diameter())
        .unwrap_or(0);
    (spread + max_delta + diameter) as Time
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::{Bound, Channel, InputSpec};
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

    fn tiny_space() -> PointSpace {
        // Two runs at horizon 3: trigger at 0 with max delays, and silence.
        let ctx = c1();
        let triggered = simulate(
            &ctx,
            &NeverRespond,
            &NdSchedule::silent(1).with_input(0, 0),
            3,
        )
        .unwrap();
        let silent = simulate(&ctx, &NeverRespond, &NdSchedule::silent(1), 3).unwrap();
        PointSpace::new(&ctx, vec![triggered, silent]).unwrap()
    }

    #[test]
    fn knows_full_and_empty() {
        let space = tiny_space();
        assert_eq!(space.knows(0, &space.full_set()), space.full_set());
        assert_eq!(space.knows(1, &space.empty_set()), space.empty_set());
    }

    #[test]
    fn truth_axiom_on_sample_sets() {
        let space = tiny_space();
        let psi = space.input_occurring(0);
        for agent in 0..2 {
            let k = space.knows(agent, &psi);
            assert!(k.is_subset(&psi));
            assert_eq!(space.knows(agent, &k), k);
        }
    }

    #[test]
    fn knowledge_respects_indistinguishability() {
        let space = tiny_space();
        let psi = space.sometime(&space.input_occurring(0));
        // Before anything reaches agent 1 it cannot distinguish the
        // triggered run from silence, so it cannot know the input occurred.
        let k1 = space.knows(1, &psi);
        assert!(!k1.contains(space.point(0, 0)));
        assert!(!k1.contains(space.point(0, 1)));
        assert!(k1.contains(space.point(0, 2)));
        // The observer knows immediately.
        let k0 = space.knows(0, &psi);
        assert!(k0.contains(space.point(0, 0)));
        assert!(!k0.contains(space.point(1, 0)));
    }

    #[test]
    fn no_later_than_semantics() {
        let space = tiny_space();
        let mut single = space.empty_set();
        single.insert(space.point(0, 3));
        let closed = space.no_later_than(Finite(0), &single);
        assert!(closed.contains(space.point(0, 3)));
        assert!(!closed.contains(space.point(0, 2)));
        assert_eq!(space.no_later_than(NegInf, &single), space.empty_set());
        let some = space.no_later_than(PosInf, &single);
        assert!(some.contains(space.point(0, 0)));
        assert!(!some.contains(space.point(1, 0)));
    }

    #[test]
    fn no_later_than_additivity_on_finite() {
        let space = tiny_space();
        let psi = space.input_occurring(0);
        let a = space.no_later_than(Finite(1), &space.no_later_than(Finite(2), &psi));
        let b = space.no_later_than(Finite(3), &psi);
        assert_eq!(a, b);
    }

    #[test]
    fn at_exactly_shift_and_clipping() {
        let space = tiny_space();
        let mut single = space.empty_set();
        single.insert(space.point(0, 3));
        let (shifted, clipped) = space.at_exactly_clipped(2, &single);
        assert!(shifted.contains(space.point(0, 1)));
        assert_eq!(shifted.count(), 1);
        // Times 2 and 3 of each run shift beyond horizon 3.
        assert_eq!(clipped, 4);
        assert_eq!(space.at_exactly(0, &single), single);
        let nlt = space.no_later_than(Finite(2), &single);
        assert!(space.at_exactly(2, &single).is_subset(&nlt));
    }

    #[test]
    fn common_knowledge_trivial_sets() {
        let space = tiny_space();
        assert_eq!(
            space.common_knowledge(&[0, 1], &space.full_set()),
            space.full_set()
        );
        assert_eq!(
            space.common_knowledge(&[0, 1], &space.empty_set()),
            space.empty_set()
        );
    }

    #[test]
    fn delta_fixed_point_of_empty_is_empty() {
        let space = tiny_space();
        let delta = ImplementationSpec::uniform(vec![0, 1], Finite(0)).unwrap();
        let fp = space
            .delta_common_knowledge(&delta, &space.empty_set())
            .unwrap();
        assert!(fp.coords.iter().all(|c| c.is_empty()));
        assert!(fp.iterations <= space.len() * 2);
    }

    #[test]
    fn g_fixed_point_rejects_neg_inf() {
        let space = tiny_space();
        let delta = ImplementationSpec::new(vec![0, 1], &[((0, 1), NegInf)]).unwrap();
        assert_eq!(
            space.g_delta_common_knowledge(&delta, &space.full_set()),
            Err(EpistemicError::DeltaNegInf)
        );
    }

    #[test]
    fn coordination_of_trivial_ensembles() {
        let space = tiny_space();
        let delta = ImplementationSpec::uniform(vec![0, 1], Finite(1)).unwrap();
        let empty = vec![space.empty_set(), space.empty_set()];
        assert!(space.is_delta_coordinated(&empty, &delta));
        let mut e0 = space.empty_set();
        e0.insert(space.point(0, 0));
        let lopsided = vec![e0, space.empty_set()];
        assert!(!space.is_delta_coordinated(&lopsided, &delta));
    }

    #[test]
    fn nd_knowledge_check_on_enumerated_space() {
        let space = tiny_space();
        assert!(space.nd_knowledge_check(&c1(), 0).holds());
    }

    #[test]
    fn slack_guard_formula() {
        let delta = ImplementationSpec::new(vec![0, 1], &[((0, 1), Finite(1))]).unwrap();
        // No negative rows, max finite entry 1, diameter 3.
        assert_eq!(slack_guard(&c1(), &delta), 4);
        let neg = ImplementationSpec::new(vec![0, 1], &[((0, 1), Finite(-2)), ((1, 0), Finite(5))])
            .unwrap();
        // Row minimum of agent 0 is -2, max entry 5, diameter 3.
        assert_eq!(slack_guard(&c1(), &neg), 10);
    }
}
