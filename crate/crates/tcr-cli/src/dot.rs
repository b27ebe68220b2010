//! Space-time diagrams in DOT: the agent-time grid with one rank per tick,
//! solid arrows for actual deliveries, dashed arrows for delivery
//! guarantees, and an optional highlighted structure.

use std::fmt::Write as _;

use tcr_core::context::{Bound, Context};
use tcr_core::runtime::{NdEvent, Run};
use tcr_core::syncausality::NodeRef;
use tcr_core::Time;

use crate::scenario::Names;

/// Nodes of a detected structure to highlight: the chain events and the end
/// nodes they guarantee.
#[derive(Debug, Clone, Default)]
pub struct Highlight {
    pub events: Vec<NdEvent>,
    pub end_nodes: Vec<NodeRef>,
}

pub fn render(names: &Names, ctx: &Context, run: &Run, highlight: &Highlight) -> String {
    let node = |a: usize, t: Time| format!("\"{}@{}\"", names.agent(a), t);
    let mut out = String::new();
    out.push_str("digraph run {\n");
    out.push_str("  rankdir=TB;\n  node [shape=circle, fontsize=10];\n");
    for t in 0..=run.horizon {
        out.push_str("  { rank=same;");
        for a in 0..ctx.agent_count {
            let mut attrs = String::new();
            if highlight
                .events
                .iter()
                .any(|e| e.observer == a && e.time == t)
            {
                attrs.push_str(" [style=filled, fillcolor=red]");
            } else if highlight
                .end_nodes
                .iter()
                .any(|n| n.agent == a && n.time == t)
            {
                attrs.push_str(" [style=filled, fillcolor=orange]");
            }
            let _ = write!(out, " {}{};", node(a, t), attrs);
        }
        out.push_str(" }\n");
    }
    // Vertical timelines per agent.
    for a in 0..ctx.agent_count {
        for t in 0..run.horizon {
            let _ = writeln!(
                out,
                "  {} -> {} [style=dotted, arrowhead=none];",
                node(a, t),
                node(a, t + 1)
            );
        }
    }
    for d in &run.deliveries {
        let _ = writeln!(
            out,
            "  {} -> {} [style=solid{}];",
            node(d.msg.sender, d.msg.send_time),
            node(d.msg.recipient, d.at),
            if d.early { ", color=red" } else { "" }
        );
    }
    for ch in &ctx.channels {
        if let Bound::Finite(b) = ch.bound {
            for t in 0..=run.horizon.saturating_sub(b) {
                let _ = writeln!(
                    out,
                    "  {} -> {} [style=dashed, color=gray];",
                    node(ch.from, t),
                    node(ch.to, t + b)
                );
            }
        }
    }
    out.push_str("}\n");
    out
}
