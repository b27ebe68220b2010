//! Acceptance suite: one test per shipping criterion, each printing its own
//! pass line via the harness. Tolerances and bounds are pinned in code; the
//! randomized suites use fixed seeds.

use std::path::PathBuf;

use tcr_cli::checks::{
    self, canonical_form_suite, enumerate_implementations, random_spec, CheckReport, Rng,
};
use tcr_cli::render;
use tcr_cli::scenario::{load_scenario, Scenario};
use tcr_core::constraints::{
    canonical_form, is_implementable, minimal_implementation, verify_implementation,
};
use tcr_core::coordination::{check_solvability, worst_case_latest_response, FixedDelayRule};
use tcr_core::delta::{Finite, PosInf};

fn scenario(name: &str) -> Scenario {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name);
    let bytes = std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    load_scenario(&bytes).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn assert_pass(report: CheckReport) {
    assert!(report.pass, "{}: {}", report.name, report.detail);
    println!("PASS {} ({})", report.name, report.detail);
}

#[test]
fn criterion_01_canonical_form_suite() {
    assert_pass(canonical_form_suite(500, 0x5eed));
}

#[test]
fn criterion_02_minimal_implementation_optimality() {
    let mut rng = Rng::new(0x1a2b);
    let mut implementable = 0;
    let mut tried = 0;
    while implementable < 500 {
        tried += 1;
        assert!(tried < 2000, "generator starved");
        let spec = random_spec(&mut rng);
        if !is_implementable(&spec) {
            continue;
        }
        implementable += 1;
        let minimal = minimal_implementation(&spec).expect("implementable");
        assert_eq!(verify_implementation(&spec, &minimal), Ok(true));
        for t in enumerate_implementations(&spec, 8) {
            for (a, b) in minimal.times().iter().zip(t.times()) {
                assert!(
                    a <= b,
                    "minimal implementation must be coordinate-wise least"
                );
            }
        }
    }
    println!("PASS minimal-implementation optimality (500 implementable specs)");
}

const ACME_MATRIX: &str = "     1    2\n1    0  100\n2  300    0\n";

#[test]
fn criterion_03_acme_regression() {
    let s = scenario("acme.json");
    assert!(is_implementable(&s.tcr.delta));
    let form = canonical_form(&s.tcr.delta);
    assert_eq!(form.get_by_agent(0, 1), Some(Finite(100)));
    assert_eq!(form.get_by_agent(1, 0), Some(Finite(300)));
    let first = render::matrix(&s.names, &form);
    let second = render::matrix(&s.names, &canonical_form(&s.tcr.delta));
    assert_eq!(first, ACME_MATRIX, "golden canonical matrix changed");
    assert_eq!(first, second, "rendering must be byte-stable");
    let minimal = minimal_implementation(&s.tcr.delta).unwrap();
    assert_eq!(minimal.times(), &[0, 0]);
    println!("PASS acme regression (canonical 100/300, minimal (0,0), byte-stable)");
}

#[test]
fn criterion_04_broom_theorem() {
    for name in ["c1_zero.json", "ring3.json", "line3.json"] {
        let s = scenario(name);
        assert_pass(checks::broom_theorem(name, &s));
    }
}

#[test]
fn criterion_05_centipede_theorem() {
    use tcr_core::coordination::{
        bruteforce_response_rule, optimal_response_rule, DEFAULT_PATH_BUDGET,
    };
    for name in ["c1_gap.json", "c1_zero.json", "oracle_a.json"] {
        let s = scenario(name);
        let optimal = optimal_response_rule(&s.tcr).expect("solvable");
        assert_pass(checks::centipede_theorem(name, &s, &optimal, 4));
    }
    let s = scenario("c1_gap.json");
    let oracle = bruteforce_response_rule(&s.tcr, DEFAULT_PATH_BUDGET).expect("solvable");
    assert_pass(checks::centipede_theorem(
        "c1_gap.json/bruteforce",
        &s,
        &oracle,
        4,
    ));
    let s = scenario("c1_zero.json");
    let fixed = FixedDelayRule {
        trigger: s.tcr.trigger,
        agents: s.tcr.agents().to_vec(),
        delay: 2,
    };
    assert_pass(checks::centipede_theorem(
        "c1_zero.json/fixed-delay",
        &s,
        &fixed,
        4,
    ));
}

#[test]
fn criterion_06_optimality_cross_check() {
    let zero = scenario("c1_zero.json");
    let fixed_zero = FixedDelayRule {
        trigger: zero.tcr.trigger,
        agents: zero.tcr.agents().to_vec(),
        delay: 2,
    };
    assert_pass(checks::rule_agreement(
        "c1_zero.json",
        &zero,
        Some(&fixed_zero),
    ));

    let gap = scenario("c1_gap.json");
    let fixed_gap = FixedDelayRule {
        trigger: gap.tcr.trigger,
        agents: gap.tcr.agents().to_vec(),
        delay: 2,
    };
    assert_pass(checks::rule_agreement(
        "c1_gap.json",
        &gap,
        Some(&fixed_gap),
    ));

    for name in ["c1_neg.json", "chain_gap.json", "oracle_a.json"] {
        let s = scenario(name);
        assert_pass(checks::rule_agreement(name, &s, None));
    }
}

#[test]
fn criterion_07_equivalence_theorem() {
    for name in ["oracle_a.json", "ring3.json"] {
        let s = scenario(name);
        let outcome = checks::oracle_equivalence(name, &s);
        assert!(
            outcome.points <= 20_000,
            "space too large: {}",
            outcome.points
        );
        assert!(outcome.guarded_points > 0, "guard left nothing to assert");
        assert_pass(outcome.report);
        assert_pass(checks::nd_knowledge(name, &s));
    }
}

#[test]
fn criterion_08_gfp_ensemble_properties() {
    for (name, seed) in [("oracle_a.json", 0xa11u64), ("ring3.json", 0xb22u64)] {
        let s = scenario(name);
        assert_pass(checks::gfp_ensemble_properties(name, &s, 100, seed));
    }
}

#[test]
fn criterion_09_solvability_and_bound() {
    // C1 with the zero constraint: solvable, worst case 2.
    let zero = scenario("c1_zero.json");
    let report = check_solvability(&zero.tcr).unwrap();
    assert!(report.solvable);
    assert!(report.comm_strongly_connected);
    assert_eq!(worst_case_latest_response(&zero.tcr), Ok(Finite(2)));

    // Removing the return channel keeps it solvable through the observer.
    let oneway = scenario("c1_oneway.json");
    let report = check_solvability(&oneway.tcr).unwrap();
    assert!(report.solvable);
    assert!(!report.comm_strongly_connected);
    assert_eq!(
        report.chains.iter().filter(|c| c.witness.is_some()).count(),
        report.chains.len()
    );

    // Removing the last channel to the witness flips the verdict.
    let isolated = scenario("c1_isolated.json");
    let report = check_solvability(&isolated.tcr).unwrap();
    assert!(!report.solvable);

    // Star with the observer at the hub: worst case equals the spoke bound.
    let star = scenario("star4.json");
    assert!(check_solvability(&star.tcr).unwrap().solvable);
    assert_eq!(worst_case_latest_response(&star.tcr), Ok(Finite(4)));

    // An unreachable coordinating agent: unsolvable, unbounded worst case.
    let far = scenario("star4_far.json");
    assert!(!check_solvability(&far.tcr).unwrap().solvable);
    assert_eq!(worst_case_latest_response(&far.tcr), Ok(PosInf));

    println!("PASS solvability and bound regressions");
}

#[test]
fn criterion_09b_broom_horizon_bound_and_solvability_transfer() {
    for name in ["c1_zero.json", "c1_neg.json"] {
        let s = scenario(name);
        assert_pass(checks::implies_broom_bound(name, &s));
    }
    let solvable_side = scenario("c1_zero.json");
    assert_pass(checks::tcr_iff_sr(
        "c1_zero.json",
        &solvable_side,
        50,
        0xf00,
    ));
    let unsolvable_side = scenario("c1_isolated.json");
    assert_pass(checks::tcr_iff_sr(
        "c1_isolated.json",
        &unsolvable_side,
        50,
        0xf11,
    ));
}

#[test]
fn criterion_10_eventual_common_knowledge_reduction() {
    for name in ["oracle_a.json", "ring3.json", "c1_gap.json"] {
        let s = scenario(name);
        assert_pass(checks::eventual_ck_reduction(name, &s));
    }
}
