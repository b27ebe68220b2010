//! The discrete-time communication context: agents, directed channels with
//! worst-case delivery bounds, and external inputs with designated observers.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::delta::{ExtendedDelta, Finite, PosInf};
use crate::{Agent, InputId, Time};

/// Worst-case delivery time of a channel. Finite bounds are at least 1;
/// an infinite bound means a message may take arbitrarily long.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Bound {
    Finite(Time),
    Infinite,
}

impl Bound {
    pub fn finite(self) -> Option<Time> {
        match self {
            Bound::Finite(b) => Some(b),
            Bound::Infinite => None,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(b) => write!(f, "{b}"),
            Bound::Infinite => write!(f, "+inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Channel {
    pub from: Agent,
    pub to: Agent,
    pub bound: Bound,
}

/// An external input and the single agent that observes it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InputSpec {
    pub observer: Agent,
}

/// Communication graph, external inputs and the clock model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Context {
    pub agent_count: usize,
    pub channels: Vec<Channel>,
    pub inputs: Vec<InputSpec>,
    pub shared_clock: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Diagnostic {
    /// Channel bound below 1.
    NonPositiveBound { from: Agent, to: Agent },
    /// Channel endpoint outside the agent set.
    UnknownEndpoint { from: Agent, to: Agent },
    /// A channel from an agent to itself.
    SelfChannel { agent: Agent },
    /// The same ordered pair declared more than once.
    DuplicateChannel { from: Agent, to: Agent },
    /// An input whose observer is not a declared agent.
    UnknownObserver { input: InputId, observer: Agent },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::NonPositiveBound { from, to } => {
                write!(f, "channel {from}->{to} has a non-positive bound")
            }
            Diagnostic::UnknownEndpoint { from, to } => {
                write!(f, "channel {from}->{to} references an unknown agent")
            }
            Diagnostic::SelfChannel { agent } => write!(f, "agent {agent} has a self-channel"),
            Diagnostic::DuplicateChannel { from, to } => {
                write!(f, "channel {from}->{to} is declared twice")
            }
            Diagnostic::UnknownObserver { input, observer } => {
                write!(f, "input {input} observed by unknown agent {observer}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContextError {
    Invalid(Vec<Diagnostic>),
}

impl fmt::Display for ContextError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContextError::Invalid(ds) => write!(f, "invalid context ({} diagnostics)", ds.len()),
        }
    }
}

/// One diagnostic per violated invariant; empty exactly when the context is
/// well formed.
pub fn validate_context(ctx: &Context) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (k, ch) in ctx.channels.iter().enumerate() {
        if ch.from >= ctx.agent_count || ch.to >= ctx.agent_count {
            out.push(Diagnostic::UnknownEndpoint {
                from: ch.from,
                to: ch.to,
            });
            continue;
        }
        if ch.from == ch.to {
            out.push(Diagnostic::SelfChannel { agent: ch.from });
        }
        if ch.bound == Bound::Finite(0) {
            out.push(Diagnostic::NonPositiveBound {
                from: ch.from,
                to: ch.to,
            });
        }
        if ctx.channels[..k]
            .iter()
            .any(|c| c.from == ch.from && c.to == ch.to)
        {
            out.push(Diagnostic::DuplicateChannel {
                from: ch.from,
                to: ch.to,
            });
        }
    }
    for (input, spec) in ctx.inputs.iter().enumerate() {
        if spec.observer >= ctx.agent_count {
            out.push(Diagnostic::UnknownObserver {
                input,
                observer: spec.observer,
            });
        }
    }
    out
}

impl Context {
    pub fn validated(self) -> Result<Self, ContextError> {
        let diags = validate_context(&self);
        if diags.is_empty() {
            Ok(self)
        } else {
            Err(ContextError::Invalid(diags))
        }
    }

    pub fn channel_bound(&self, from: Agent, to: Agent) -> Option<Bound> {
        self.channels
            .iter()
            .find(|c| c.from == from && c.to == to)
            .map(|c| c.bound)
    }
}

/// Shortest delivery-guarantee distances over the finite-bound channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommDistance {
    n: usize,
    dist: Vec<ExtendedDelta>,
}

impl CommDistance {
    pub fn get(&self, from: Agent, to: Agent) -> ExtendedDelta {
        self.dist[from * self.n + to]
    }

    /// Largest finite off-diagonal entry, or `None` if there is none.
    pub fn finite_diameter(&self) -> Option<i64> {
        let mut best = None;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    if let Finite(d) = self.get(i, j) {
                        best = Some(best.map_or(d, |b: i64| b.max(d)));
                    }
                }
            }
        }
        best
    }

    /// True when every ordered pair has a finite distance.
    pub fn strongly_connected(&self) -> bool {
        self.dist.iter().all(|d| d.is_finite())
    }
}

/// All-pairs shortest paths over channels with finite bounds; the diagonal is
/// zero. A bound guarantee `(i,t) ⇢ (j,t')` holds exactly when
/// `t' >= t + dist(i,j)`.
pub fn comm_distance(ctx: &Context) -> Result<CommDistance, ContextError> {
    let diags = validate_context(ctx);
    if !diags.is_empty() {
        return Err(ContextError::Invalid(diags));
    }
    let n = ctx.agent_count;
    let mut dist = vec![PosInf; n * n];
    for i in 0..n {
        dist[i * n + i] = Finite(0);
    }
    for ch in &ctx.channels {
        if let Bound::Finite(b) = ch.bound {
            let cur = &mut dist[ch.from * n + ch.to];
            *cur = (*cur).min(Finite(b as i64));
        }
    }
    // Weights are positive, graphs are tiny: plain relaxation to fixpoint.
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..n {
            for k in 0..n {
                if let Finite(dik) = dist[i * n + k] {
                    for j in 0..n {
                        if let Finite(dkj) = dist[k * n + j] {
                            let cand = Finite(dik + dkj);
                            if cand < dist[i * n + j] {
                                dist[i * n + j] = cand;
                                changed = true;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(CommDistance { n, dist })
}
