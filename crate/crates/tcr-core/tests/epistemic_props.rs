//! Operator algebra over random point sets, and hand-built spaces for the
//! knowledge corner cases.

use tcr_core::context::{Bound, Channel, Context, InputSpec};
use tcr_core::delta::{Finite, PosInf};
use tcr_core::epistemic::{PointSet, PointSpace};
use tcr_core::runtime::{simulate, NdSchedule, NeverRespond};

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

fn space_with_runs(ctx: &Context, inputs: &[Option<u32>], horizon: u32) -> PointSpace {
    let runs = inputs
        .iter()
        .map(|&at| {
            let mut sched = NdSchedule::silent(ctx.inputs.len());
            if let Some(t) = at {
                sched.input_times[0] = Some(t);
            }
            simulate(ctx, &NeverRespond, &sched, horizon).unwrap()
        })
        .collect();
    PointSpace::new(ctx, runs).unwrap()
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

fn random_set(rng: &mut Rng, space: &PointSpace) -> PointSet {
    let mut s = space.empty_set();
    for p in 0..space.len() {
        if rng.next() % 2 == 0 {
            s.insert(p);
        }
    }
    s
}

#[test]
fn knowledge_axioms_on_random_sets() {
    let ctx = c1();
    let space = space_with_runs(&ctx, &[Some(0), Some(1), None], 4);
    let mut rng = Rng(3);
    for _ in 0..50 {
        let psi = random_set(&mut rng, &space);
        let phi = psi.union(&random_set(&mut rng, &space));
        for agent in 0..2 {
            let k = space.knows(agent, &psi);
            // Truth and positive introspection.
            assert!(k.is_subset(&psi));
            assert_eq!(space.knows(agent, &k), k);
            // Monotonicity.
            assert!(k.is_subset(&space.knows(agent, &phi)));
            // Meet commutation.
            let meet = space.knows(agent, &psi.intersect(&phi));
            assert_eq!(meet, k.intersect(&space.knows(agent, &phi)));
        }
    }
}

#[test]
fn temporal_operators_on_random_sets() {
    let ctx = c1();
    let space = space_with_runs(&ctx, &[Some(0), Some(2), None], 4);
    let mut rng = Rng(17);
    for _ in 0..50 {
        let psi = random_set(&mut rng, &space);
        // Additivity for finite windows.
        let a = space.no_later_than(Finite(1), &space.no_later_than(Finite(2), &psi));
        assert_eq!(a, space.no_later_than(Finite(3), &psi));
        // Exact shifts sit inside the window.
        for eps in [0i64, 1, 2] {
            assert!(space
                .at_exactly(eps, &psi)
                .is_subset(&space.no_later_than(Finite(eps), &psi)));
        }
        // The unbounded window is the some-time operator and is idempotent.
        let some = space.no_later_than(PosInf, &psi);
        assert_eq!(space.no_later_than(PosInf, &some), some);
        // Monotonicity in both arguments.
        let phi = psi.union(&random_set(&mut rng, &space));
        assert!(space
            .no_later_than(Finite(1), &psi)
            .is_subset(&space.no_later_than(Finite(2), &phi)));
    }
}

#[test]
fn common_knowledge_unreachable_agent_is_empty() {
    // No channels: agent 1 never learns anything, so nothing below the full
    // space can become common knowledge.
    let ctx = Context {
        agent_count: 2,
        channels: vec![],
        inputs: vec![InputSpec { observer: 0 }],
        shared_clock: true,
    };
    let space = space_with_runs(&ctx, &[Some(0), None], 3);
    let psi = space.no_later_than(Finite(0), &space.input_occurring(0));
    assert!(space.common_knowledge(&[0, 1], &psi).is_empty());
    assert_eq!(
        space.common_knowledge(&[0, 1], &space.full_set()),
        space.full_set()
    );
}

#[test]
fn nd_knowledge_needs_untriggered_runs() {
    // On the honestly enumerated flavor (triggered and silent runs), the
    // equality holds; dropping the silent run manufactures foresight and the
    // check reports it.
    let ctx = c1();
    let honest = space_with_runs(&ctx, &[Some(1), None], 4);
    assert!(honest.nd_knowledge_check(&ctx, 0).holds());
    let foresight = space_with_runs(&ctx, &[Some(1)], 4);
    let report = foresight.nd_knowledge_check(&ctx, 0);
    assert!(!report.holds());
    assert!(report.failures.iter().any(|f| f.t == 0));
}

#[test]
fn single_run_without_input_has_empty_event() {
    let ctx = c1();
    let space = space_with_runs(&ctx, &[None], 3);
    let occurring = space.input_occurring(0);
    assert!(occurring.is_empty());
    assert!(space.sometime(&occurring).is_empty());
    assert!(space.no_later_than(Finite(0), &occurring).is_empty());
}

#[test]
fn ensembles_validate_locality() {
    use tcr_core::epistemic::{Ensemble, EpistemicError};
    let ctx = c1();
    let space = space_with_runs(&ctx, &[Some(0), None], 3);
    let psi = space.no_later_than(Finite(0), &space.input_occurring(0));
    let local = vec![space.knows(0, &psi), space.knows(1, &psi)];
    assert!(Ensemble::new(&space, vec![0, 1], local).is_ok());
    // The raw occurrence event is not local to the non-observer.
    let raw = vec![space.knows(0, &psi), psi.clone()];
    assert_eq!(
        Ensemble::new(&space, vec![0, 1], raw).unwrap_err(),
        EpistemicError::NotLocal(1)
    );
}

#[test]
fn shift_fixed_point_of_full_space() {
    use tcr_core::constraints::ImplementationSpec;
    let ctx = c1();
    let space = space_with_runs(&ctx, &[Some(0), None], 3);
    // Zero constraints shift nothing: the full space is its own fixed point.
    let zero = ImplementationSpec::uniform(vec![0, 1], Finite(0)).unwrap();
    let fp = space
        .g_delta_common_knowledge(&zero, &space.full_set())
        .unwrap();
    assert!(fp.coords.iter().all(|c| c == &space.full_set()));
    // A strictly positive shift clips at the horizon on every iteration, so
    // marching forward forever is impossible and the fixed point drains.
    let one = ImplementationSpec::uniform(vec![0, 1], Finite(1)).unwrap();
    let fp = space
        .g_delta_common_knowledge(&one, &space.full_set())
        .unwrap();
    assert!(fp.coords.iter().all(|c| c.is_empty()));
}
