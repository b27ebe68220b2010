//! Text rendering: aligned matrices, solvability reports, assignments and
//! the line-oriented run trace. All output is deterministic.

use std::fmt::Write as _;

use tcr_core::constraints::{CanonicalForm, TimeAssignment};
use tcr_core::context::Context;
use tcr_core::coordination::SolvabilityReport;
use tcr_core::runtime::{nd_events, Fact, NdEventKind, Run};
use tcr_core::Time;

use crate::scenario::Names;

/// Aligned matrix of the canonical form, rows and columns labelled by agent
/// name, with `-inf`/`+inf` tokens.
pub fn matrix(names: &Names, form: &CanonicalForm) -> String {
    let labels: Vec<&str> = form.agents().iter().map(|&a| names.agent(a)).collect();
    let n = labels.len();
    let mut cells: Vec<Vec<String>> = Vec::with_capacity(n);
    for i in 0..n {
        cells.push((0..n).map(|j| form.get(i, j).to_string()).collect());
    }
    let mut widths: Vec<usize> = (0..n)
        .map(|j| cells.iter().map(|row| row[j].len()).max().unwrap_or(0))
        .collect();
    for (j, label) in labels.iter().enumerate() {
        widths[j] = widths[j].max(label.len());
    }
    let head_width = labels.iter().map(|l| l.len()).max().unwrap_or(0);
    let mut out = String::new();
    let _ = write!(out, "{:>head_width$}", "");
    for (j, label) in labels.iter().enumerate() {
        let _ = write!(out, "  {:>width$}", label, width = widths[j]);
    }
    out.push('\n');
    for (i, label) in labels.iter().enumerate() {
        let _ = write!(out, "{:>head_width$}", label);
        for j in 0..n {
            let _ = write!(out, "  {:>width$}", cells[i][j], width = widths[j]);
        }
        out.push('\n');
    }
    out
}

pub fn assignment(names: &Names, t: &TimeAssignment) -> String {
    let mut out = String::new();
    for (&a, &v) in t.agents().iter().zip(t.times()) {
        let _ = writeln!(out, "{} = {}", names.agent(a), v);
    }
    out
}

pub fn solvability(names: &Names, report: &SolvabilityReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "solvable: {}",
        if report.solvable { "yes" } else { "no" }
    );
    let _ = writeln!(
        out,
        "communication graph strongly connected: {}",
        if report.comm_strongly_connected {
            "yes"
        } else {
            "no"
        }
    );
    for (k, scc) in report.sccs.iter().enumerate() {
        let members: Vec<&str> = scc.iter().map(|&a| names.agent(a)).collect();
        let _ = writeln!(out, "component {k}: {{{}}}", members.join(", "));
    }
    for chain in &report.chains {
        let comps: Vec<String> = chain.components.iter().map(|c| c.to_string()).collect();
        match &chain.witness {
            Some(relays) => {
                let w: Vec<&str> = relays.iter().map(|&a| names.agent(a)).collect();
                let _ = writeln!(
                    out,
                    "chain [{}]: witness ({})",
                    comps.join(" -> "),
                    w.join(", ")
                );
            }
            None => {
                let _ = writeln!(out, "chain [{}]: NO WITNESS", comps.join(" -> "));
            }
        }
    }
    out
}

fn fact(names: &Names, f: &Fact) -> String {
    match f.kind {
        NdEventKind::Input(i) => format!("{}@{}", names.inputs[i], f.time),
        NdEventKind::EarlyDelivery(m) => format!(
            "early({}->{} sent={})@{}",
            names.agent(m.sender),
            names.agent(m.recipient),
            m.send_time,
            f.time
        ),
    }
}

/// Line-oriented trace of one run: per tick, its events then each agent's
/// newly learned facts and response mark; pending messages last.
pub fn trace(names: &Names, ctx: &Context, run: &Run) -> String {
    let mut out = String::new();
    let events = nd_events(ctx, run);
    for t in 0..=run.horizon {
        for e in events.iter().filter(|e| e.time == t) {
            match e.kind {
                NdEventKind::Input(i) => {
                    let _ = writeln!(
                        out,
                        "t={t} input {} @{}",
                        names.inputs[i],
                        names.agent(e.observer)
                    );
                }
                NdEventKind::EarlyDelivery(_) => {}
            }
        }
        for d in run.deliveries.iter().filter(|d| d.at == t) {
            let _ = writeln!(
                out,
                "t={t} deliver {}->{} sent={}{}",
                names.agent(d.msg.sender),
                names.agent(d.msg.recipient),
                d.msg.send_time,
                if d.early { " early" } else { "" }
            );
        }
        for a in 0..ctx.agent_count {
            let new: Vec<String> = run
                .state(a, t)
                .iter()
                .filter(|f| t == 0 || !run.state(a, t - 1).contains(f))
                .map(|f| fact(names, f))
                .collect();
            let respond = run.responses[a] == Some(t);
            if !new.is_empty() || respond {
                let _ = write!(out, "t={t} agent {} +[{}]", names.agent(a), new.join(","));
                if respond {
                    out.push_str(" respond");
                }
                out.push('\n');
            }
        }
    }
    for m in &run.pending {
        let _ = writeln!(
            out,
            "pending {}->{} sent={}",
            names.agent(m.sender),
            names.agent(m.recipient),
            m.send_time
        );
    }
    for a in 0..ctx.agent_count {
        let _ = writeln!(
            out,
            "response {} = {}",
            names.agent(a),
            match run.responses[a] {
                Some(t) => t.to_string(),
                None => "none".to_string(),
            }
        );
    }
    out
}

/// Response table over a set of runs: one line per run keyed by its trigger
/// time, listing each coordinating agent's response.
pub fn response_line(names: &Names, agents: &[usize], responses: &[Option<Time>]) -> String {
    let cells: Vec<String> = agents
        .iter()
        .map(|&a| {
            format!(
                "{}={}",
                names.agent(a),
                responses[a].map_or("none".to_string(), |t| t.to_string())
            )
        })
        .collect();
    cells.join(" ")
}
