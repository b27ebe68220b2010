//! Run-level properties over exhaustively enumerated sets: an independent
//! recursive enumerator reproduces the run set, states exhibit perfect
//! recall and no foresight, and runs with equal ND prefixes have equal
//! states.

use std::collections::BTreeSet;

use tcr_core::context::{Bound, Channel, Context, InputSpec};
use tcr_core::runtime::{
    enumerate_runs, nd_events, simulate, EnumerationConfig, MsgId, NdSchedule, NeverRespond, Run,
};
use tcr_core::Time;

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

/// Independent enumerator: recursion over input occurrences and per-message
/// delay choices, simulating each complete schedule.
fn recursive_enumerate(ctx: &Context, horizon: Time) -> BTreeSet<Run> {
    let mut messages: Vec<(MsgId, Bound)> = Vec::new();
    for s in 0..=horizon {
        for ch in &ctx.channels {
            messages.push((
                MsgId {
                    sender: ch.from,
                    send_time: s,
                    recipient: ch.to,
                },
                ch.bound,
            ));
        }
    }
    let mut out = BTreeSet::new();
    let mut input_choice: Vec<Option<Time>> = vec![None; ctx.inputs.len()];
    fn choose_inputs(
        ctx: &Context,
        horizon: Time,
        k: usize,
        input_choice: &mut Vec<Option<Time>>,
        messages: &[(MsgId, Bound)],
        out: &mut BTreeSet<Run>,
    ) {
        if k == input_choice.len() {
            let mut sched = NdSchedule::silent(input_choice.len());
            sched.input_times = input_choice.clone();
            choose_delays(ctx, horizon, 0, sched, messages, out);
            return;
        }
        for opt in std::iter::once(None).chain((0..=horizon).map(Some)) {
            input_choice[k] = opt;
            choose_inputs(ctx, horizon, k + 1, input_choice, messages, out);
        }
        input_choice[k] = None;
    }
    fn choose_delays(
        ctx: &Context,
        horizon: Time,
        k: usize,
        sched: NdSchedule,
        messages: &[(MsgId, Bound)],
        out: &mut BTreeSet<Run>,
    ) {
        if k == messages.len() {
            out.insert(simulate(ctx, &NeverRespond, &sched, horizon).unwrap());
            return;
        }
        let (msg, bound) = messages[k];
        let room = horizon - msg.send_time;
        let mut options: Vec<Option<Time>> = Vec::new();
        match bound {
            Bound::Finite(b) => {
                for d in 1..=b.min(room) {
                    options.push(Some(d));
                }
                if msg.send_time + b > horizon {
                    options.push(None);
                }
            }
            Bound::Infinite => {
                for d in 1..=room {
                    options.push(Some(d));
                }
                options.push(None);
            }
        }
        for opt in options {
            let mut next = sched.clone();
            if let Some(d) = opt {
                next.delays.insert(msg, d);
            }
            choose_delays(ctx, horizon, k + 1, next, messages, out);
        }
    }
    choose_inputs(&c1(), horizon, 0, &mut input_choice, &messages, &mut out);
    out
}

#[test]
fn enumeration_matches_independent_oracle() {
    let ctx = c1();
    let cfg = EnumerationConfig {
        horizon: 2,
        input_window: None,
        max_runs: 10_000,
    };
    let enumerated = enumerate_runs(&ctx, &NeverRespond, &cfg).unwrap();
    let oracle = recursive_enumerate(&ctx, 2);
    assert_eq!(enumerated.len(), 96);
    assert_eq!(enumerated, oracle);
}

#[test]
fn perfect_recall_and_no_foresight() {
    let ctx = c1();
    let cfg = EnumerationConfig {
        horizon: 3,
        input_window: None,
        max_runs: 10_000,
    };
    for run in enumerate_runs(&ctx, &NeverRespond, &cfg).unwrap() {
        for a in 0..ctx.agent_count {
            for t in 0..=3u32 {
                if t > 0 {
                    assert!(run.state(a, t).is_superset(run.state(a, t - 1)));
                }
                for fact in run.state(a, t) {
                    assert!(fact.time <= t, "state holds a future event");
                }
            }
        }
    }
}

#[test]
fn equal_nd_prefixes_give_equal_states() {
    let ctx = c1();
    let cfg = EnumerationConfig {
        horizon: 3,
        input_window: None,
        max_runs: 10_000,
    };
    let runs: Vec<Run> = enumerate_runs(&ctx, &NeverRespond, &cfg)
        .unwrap()
        .into_iter()
        .collect();
    for a in &runs {
        for b in &runs {
            for t in 0..=3u32 {
                let nd_a: BTreeSet<_> = nd_events(&ctx, a)
                    .into_iter()
                    .filter(|e| e.time <= t)
                    .collect();
                let nd_b: BTreeSet<_> = nd_events(&ctx, b)
                    .into_iter()
                    .filter(|e| e.time <= t)
                    .collect();
                if nd_a == nd_b {
                    for agent in 0..ctx.agent_count {
                        for u in 0..=t {
                            assert_eq!(
                                a.state(agent, u),
                                b.state(agent, u),
                                "states diverge below an equal ND prefix"
                            );
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn schedule_round_trip_reproduces_runs() {
    let ctx = c1();
    let cfg = EnumerationConfig {
        horizon: 3,
        input_window: Some(1),
        max_runs: 10_000,
    };
    for run in enumerate_runs(&ctx, &NeverRespond, &cfg).unwrap() {
        let replay = simulate(&ctx, &NeverRespond, &run.schedule(), run.horizon).unwrap();
        assert_eq!(replay, run);
    }
}
