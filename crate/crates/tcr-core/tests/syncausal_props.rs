//! Order-theoretic properties of the two relations, checked against an
//! explicit grid-closure oracle, plus the broom-to-chain strengthening.

use std::collections::BTreeMap;

use tcr_core::constraints::{canonical_form, ImplementationSpec};
use tcr_core::context::{comm_distance, Bound, Channel, Context, InputSpec};
use tcr_core::delta::Finite;
use tcr_core::runtime::{enumerate_runs, simulate, EnumerationConfig, NdSchedule, NeverRespond};
use tcr_core::syncausality::{bound_guarantee, find_brooms, node_influence, NodeRef};
use tcr_core::{Agent, Time};

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

struct Rng(u64);

impl Rng {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }
}

fn random_context(rng: &mut Rng) -> Context {
    let n = 2 + (rng.next() % 3) as usize;
    let mut channels = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.next() % 100 < 60 {
                let bound = if rng.next() % 100 < 20 {
                    Bound::Infinite
                } else {
                    Bound::Finite(1 + (rng.next() % 3) as Time)
                };
                channels.push(Channel {
                    from: i,
                    to: j,
                    bound,
                });
            }
        }
    }
    Context {
        agent_count: n,
        channels,
        inputs: vec![InputSpec { observer: 0 }],
        shared_clock: true,
    }
}

/// Oracle: explicit closure of locality and guarantee edges on the grid
/// `agents x {0..=max_t}`.
fn guarantee_closure(ctx: &Context, max_t: Time) -> Vec<Vec<bool>> {
    let n = ctx.agent_count;
    let nodes = n * (max_t as usize + 1);
    let id = |a: Agent, t: Time| a * (max_t as usize + 1) + t as usize;
    let mut reach = vec![vec![false; nodes]; nodes];
    for v in 0..nodes {
        reach[v][v] = true;
    }
    let mut edges = Vec::new();
    for a in 0..n {
        for t in 0..max_t {
            edges.push((id(a, t), id(a, t + 1)));
        }
    }
    for ch in &ctx.channels {
        if let Bound::Finite(b) = ch.bound {
            for t in 0..=max_t.saturating_sub(b) {
                edges.push((id(ch.from, t), id(ch.to, t + b)));
            }
        }
    }
    // Transitive closure by repeated relaxation (tiny grids).
    let mut changed = true;
    while changed {
        changed = false;
        for &(u, v) in &edges {
            for s in 0..nodes {
                if reach[s][u] && !reach[s][v] {
                    reach[s][v] = true;
                    changed = true;
                }
            }
        }
    }
    reach
}

#[test]
fn bound_guarantee_equals_grid_closure() {
    let mut rng = Rng(7);
    for _ in 0..20 {
        let ctx = random_context(&mut rng);
        let max_t: Time = 10;
        let closure = guarantee_closure(&ctx, max_t);
        let id = |a: Agent, t: Time| a * (max_t as usize + 1) + t as usize;
        for i in 0..ctx.agent_count {
            for j in 0..ctx.agent_count {
                for t in 0..=max_t {
                    for t2 in 0..=max_t {
                        let a = NodeRef { agent: i, time: t };
                        let b = NodeRef { agent: j, time: t2 };
                        assert_eq!(
                            bound_guarantee(&ctx, a, b),
                            closure[id(i, t)][id(j, t2)],
                            "mismatch for ({i},{t}) -> ({j},{t2})"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn syncausality_is_a_partial_order_and_contains_guarantees() {
    let ctx = c1();
    let cfg = EnumerationConfig {
        horizon: 3,
        input_window: Some(1),
        max_runs: 10_000,
    };
    for run in enumerate_runs(&ctx, &NeverRespond, &cfg).unwrap() {
        let nodes: Vec<NodeRef> = (0..ctx.agent_count)
            .flat_map(|a| (0..=run.horizon).map(move |t| NodeRef { agent: a, time: t }))
            .collect();
        let reach: Vec<Vec<bool>> = nodes
            .iter()
            .map(|&from| {
                let ei = node_influence(&ctx, &run, from);
                nodes.iter().map(|&to| ei.influences(to)).collect()
            })
            .collect();
        for (ai, &a) in nodes.iter().enumerate() {
            assert!(reach[ai][ai], "reflexivity");
            for (bi, &b) in nodes.iter().enumerate() {
                if reach[ai][bi] {
                    if reach[bi][ai] {
                        assert_eq!(a, b, "antisymmetry");
                    }
                    for ci in 0..nodes.len() {
                        if reach[bi][ci] {
                            assert!(reach[ai][ci], "transitivity");
                        }
                    }
                }
                if bound_guarantee(&ctx, a, b) {
                    assert!(reach[ai][bi], "guarantee must imply syncausality");
                }
            }
        }
    }
}

#[test]
fn broom_yields_chains_for_every_path() {
    // On the max-delay triggered run, the trigger is a broom for both agents
    // by (2,2); repeated as a chain it must guarantee every path position by
    // the strengthened time sup(times) - min row of the canonical form.
    let ctx = c1();
    let delta =
        ImplementationSpec::new(vec![0, 1], &[((0, 1), Finite(1)), ((1, 0), Finite(2))]).unwrap();
    let dhat = canonical_form(&delta);
    let run = simulate(
        &ctx,
        &NeverRespond,
        &NdSchedule::silent(1).with_input(0, 0),
        6,
    )
    .unwrap();
    let times: BTreeMap<Agent, Time> = [(0, 2), (1, 2)].into();
    let brooms = find_brooms(&ctx, &run, 0, &[0, 1], &times).unwrap();
    assert!(!brooms.is_empty());
    let dist = comm_distance(&ctx).unwrap();
    let sup = 2i64;
    for broom in &brooms {
        // Enumerate constraint paths up to 5 edges from each start.
        for start in 0..2usize {
            let row_min = (0..2)
                .map(|j| dhat.get(start, j).finite().unwrap())
                .min()
                .unwrap();
            let by = sup - row_min;
            let mut stack = vec![vec![start]];
            while let Some(path) = stack.pop() {
                let mut length = 0i64;
                for w in path.windows(2) {
                    length += delta.get(w[0], w[1]).finite().unwrap();
                }
                let position_time = by + length;
                let d = dist
                    .get(broom.observer, *path.last().unwrap())
                    .finite()
                    .unwrap();
                assert!(
                    broom.time as i64 + d <= position_time,
                    "broom fails to guarantee {:?} at {}",
                    path,
                    position_time
                );
                if path.len() <= 5 {
                    let last = *path.last().unwrap();
                    for next in 0..2usize {
                        if next != last && delta.get(last, next).is_finite() {
                            let mut ext = path.clone();
                            ext.push(next);
                            stack.push(ext);
                        }
                    }
                }
            }
        }
    }
}
