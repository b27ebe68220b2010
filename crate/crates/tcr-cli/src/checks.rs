//! Property suites shared by the `selftest` subcommand and the acceptance
//! tests. Each check returns a pass/fail report; randomized suites use a
//! fixed-seed generator so every invocation is reproducible.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use tcr_core::constraints::{
    canonical_form, extremal_implementation, is_implementable, minimal_implementation,
    verify_implementation, ImplementationSpec, TimeAssignment,
};
use tcr_core::coordination::{
    bruteforce_response_rule, check_solvability, optimal_response_rule, responses_under_rule,
    verify_tcr, TcrSpec, DEFAULT_PATH_BUDGET,
};
use tcr_core::delta::{ExtendedDelta, Finite, PosInf};
use tcr_core::epistemic::{slack_guard, PointSet, PointSpace};
use tcr_core::runtime::NdEventKind;
use tcr_core::runtime::{enumerate_runs, NeverRespond, ResponseRule, Run};
use tcr_core::syncausality::{
    find_brooms, has_path_traversing_centipede, max_nd_count, nd_past, CausalSource, NodeRef,
    SearchOutcome,
};
use tcr_core::{Agent, Time};

use crate::scenario::Scenario;

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl CheckReport {
    fn pass(name: &str, detail: String) -> Self {
        CheckReport {
            name: name.into(),
            pass: true,
            detail,
        }
    }

    fn fail(name: &str, detail: String) -> Self {
        CheckReport {
            name: name.into(),
            pass: false,
            detail,
        }
    }
}

/// Deterministic 64-bit generator (splitmix64).
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.below(den) < num
    }
}

/// Random spec: 2..=4 agents, entries in {-3..3, +inf}.
pub fn random_spec(rng: &mut Rng) -> ImplementationSpec {
    let n = 2 + rng.below(3) as usize;
    let agents: Vec<Agent> = (0..n).collect();
    let mut entries = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.chance(45, 100) {
                entries.push(((i, j), Finite(rng.below(7) as i64 - 3)));
            }
        }
    }
    ImplementationSpec::new(agents, &entries).expect("generated spec is valid")
}

/// All assignments over `{0..=max}` that implement the spec.
pub fn enumerate_implementations(spec: &ImplementationSpec, max: i64) -> Vec<TimeAssignment> {
    let n = spec.len();
    let mut out = Vec::new();
    let mut values = vec![0i64; n];
    loop {
        let t = TimeAssignment::new(spec.agents().to_vec(), values.clone());
        if verify_implementation(spec, &t) == Ok(true) {
            out.push(t);
        }
        let mut k = n;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            values[k] += 1;
            if values[k] <= max {
                break;
            }
            values[k] = 0;
        }
    }
}

/// Canonical-form suite: idempotence, minimality, triangle inequality,
/// diagonal shape, implementation-set equivalence under exhaustive
/// enumeration, minimal-implementation optimality, attained bounds, and the
/// order embedding — over `count` random specs.
pub fn canonical_form_suite(count: usize, seed: u64) -> CheckReport {
    const NAME: &str = "canonical-form suite";
    const WINDOW: i64 = 8;
    let mut rng = Rng::new(seed);
    let mut implementable = 0usize;
    let mut previous: Option<ImplementationSpec> = None;
    for k in 0..count {
        let spec = random_spec(&mut rng);
        let dhat = canonical_form(&spec);
        let n = spec.len();

        // Idempotence.
        if canonical_form(&dhat.to_spec()) != dhat {
            return CheckReport::fail(NAME, format!("spec {k}: canonicalization not idempotent"));
        }
        // Minimality and diagonal shape.
        for i in 0..n {
            for j in 0..n {
                if i != j && dhat.get(i, j) > spec.get(i, j) {
                    return CheckReport::fail(NAME, format!("spec {k}: minimality violated"));
                }
            }
            let d = dhat.get(i, i);
            if d != Finite(0) && d != ExtendedDelta::NegInf {
                return CheckReport::fail(NAME, format!("spec {k}: diagonal {d}"));
            }
        }
        // Triangle inequality wherever the sum is defined.
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    if let Some(sum) = dhat.get(i, j).checked_add(dhat.get(j, l)) {
                        if dhat.get(i, l) > sum {
                            return CheckReport::fail(
                                NAME,
                                format!("spec {k}: triangle inequality violated at ({i},{j},{l})"),
                            );
                        }
                    }
                }
            }
        }
        // Equivalence of implementation sets over the window.
        let t_spec = enumerate_implementations(&spec, WINDOW);
        let t_dhat = enumerate_implementations(&dhat.to_spec(), WINDOW);
        if t_spec != t_dhat {
            return CheckReport::fail(NAME, format!("spec {k}: T(delta) != T(dhat) in window"));
        }

        if is_implementable(&spec) {
            implementable += 1;
            let minimal = minimal_implementation(&spec).expect("implementable");
            if verify_implementation(&spec, &minimal) != Ok(true) {
                return CheckReport::fail(NAME, format!("spec {k}: minimal does not verify"));
            }
            for t in &t_spec {
                for (a, b) in minimal.times().iter().zip(t.times()) {
                    if a > b {
                        return CheckReport::fail(
                            NAME,
                            format!("spec {k}: minimal not coordinate-wise least"),
                        );
                    }
                }
            }
            // Attained bounds: the extremal construction witnesses every
            // finite canonical entry exactly, and beats K on +inf pairs.
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let (from, to) = (spec.agents()[i], spec.agents()[j]);
                    let w = extremal_implementation(&spec, from, to, 9).expect("implementable");
                    let gap = w.time_of(to).unwrap() - w.time_of(from).unwrap();
                    match dhat.get(i, j) {
                        Finite(d) => {
                            if gap != d {
                                return CheckReport::fail(
                                    NAME,
                                    format!("spec {k}: extremal gap {gap} != dhat {d}"),
                                );
                            }
                            // Enumerated implementations never exceed the bound,
                            // and attain it when the witness fits the window.
                            let reached = t_spec.iter().map(|t| t.times()[j] - t.times()[i]).max();
                            if let Some(m) = reached {
                                if m > d {
                                    return CheckReport::fail(
                                        NAME,
                                        format!("spec {k}: enumerated gap {m} exceeds dhat {d}"),
                                    );
                                }
                                if w.times().iter().all(|&v| v <= WINDOW) && m != d {
                                    return CheckReport::fail(
                                        NAME,
                                        format!("spec {k}: window max {m} misses dhat {d}"),
                                    );
                                }
                            }
                        }
                        PosInf => {
                            if gap < 9 {
                                return CheckReport::fail(
                                    NAME,
                                    format!("spec {k}: unconstrained gap {gap} < K"),
                                );
                            }
                        }
                        ExtendedDelta::NegInf => unreachable!("implementable"),
                    }
                }
            }
            // Order embedding against the previous implementable spec on the
            // same agent set: dhat1 <= dhat2 implies window containment.
            if let Some(prev) = previous.take() {
                if prev.agents() == spec.agents() {
                    let dhat_prev = canonical_form(&prev);
                    let le = (0..n)
                        .all(|i| (0..n).all(|j| i == j || dhat_prev.get(i, j) <= dhat.get(i, j)));
                    if le {
                        let t_prev = enumerate_implementations(&prev, WINDOW);
                        for t in &t_prev {
                            let mirrored =
                                TimeAssignment::new(spec.agents().to_vec(), t.times().to_vec());
                            if verify_implementation(&spec, &mirrored) != Ok(true) {
                                return CheckReport::fail(
                                    NAME,
                                    format!("spec {k}: order embedding violated"),
                                );
                            }
                        }
                    }
                }
            }
            previous = Some(spec);
        }
    }
    let ratio = implementable as f64 / count as f64;
    if ratio < 0.6 {
        return CheckReport::fail(
            NAME,
            format!("only {:.0}% implementable specs generated", ratio * 100.0),
        );
    }
    CheckReport::pass(
        NAME,
        format!("{count} specs, {implementable} implementable, window 0..=8"),
    )
}

/// Enumerate the scenario's run set under the passive rule (canonical
/// timelines; responses are replayed per rule on demand).
pub fn enumerate(scenario: &Scenario) -> Result<Vec<Run>, String> {
    enumerate_runs(&scenario.context, &NeverRespond, &scenario.oracle)
        .map(|set| set.into_iter().collect())
        .map_err(|e| format!("enumeration failed: {e}"))
}

fn respond_all(scenario: &Scenario, rule: &dyn ResponseRule, runs: &[Run]) -> Vec<Run> {
    runs.iter()
        .map(|r| {
            let responses = responses_under_rule(&scenario.context, rule, r);
            let mut run = r.clone();
            run.responses = responses;
            run
        })
        .collect()
}

/// Completeness guard for truncated verification: the largest observed lag
/// between a trigger and the latest response across fully-responded runs.
/// Every triggered run whose trigger leaves at least this much room must
/// then have responded in full. Sanity-bounded by the horizon slack.
fn response_guard(scenario: &Scenario, runs: &[Run]) -> Result<Time, String> {
    let trigger = scenario.tcr.trigger;
    let agents = scenario.tcr.agents();
    let mut max_lag: Option<Time> = None;
    for run in runs {
        let Some(t0) = run.input_time(trigger) else {
            continue;
        };
        let responses: Option<Vec<Time>> = agents.iter().map(|&a| run.responses[a]).collect();
        if let Some(rs) = responses {
            let lag = rs.into_iter().max().unwrap() - t0;
            max_lag = Some(max_lag.map_or(lag, |m| m.max(lag)));
        }
    }
    let lag = max_lag.ok_or("no fully responded triggered run within the horizon")?;
    let slack = slack_guard(&scenario.context, &scenario.tcr.delta);
    if lag > slack {
        return Err(format!(
            "observed lag {lag} exceeds the horizon slack {slack}"
        ));
    }
    Ok(lag)
}

/// The optimal rule solves the problem on the enumerated runs, and on every
/// triggered run where all agents responded, a broom for the full agent set
/// by the response times exists among the known events. Fails on the first
/// exception.
pub fn broom_theorem(label: &str, scenario: &Scenario) -> CheckReport {
    let name = format!("broom theorem [{label}]");
    let runs = match enumerate(scenario) {
        Ok(r) => r,
        Err(e) => return CheckReport::fail(&name, e),
    };
    let rule = match optimal_response_rule(&scenario.tcr) {
        Ok(r) => r,
        Err(e) => return CheckReport::fail(&name, format!("{e}")),
    };
    let runs = respond_all(scenario, &rule, &runs);
    let guard = match response_guard(scenario, &runs) {
        Ok(g) => g,
        Err(e) => return CheckReport::fail(&name, e),
    };
    if !verify_tcr(&scenario.tcr, runs.iter(), guard) {
        return CheckReport::fail(&name, "optimal rule does not solve the problem".into());
    }
    let agents = scenario.tcr.agents().to_vec();
    let mut checked = 0usize;
    for run in &runs {
        if run.input_time(scenario.tcr.trigger).is_none() {
            continue;
        }
        if agents.iter().any(|&a| run.responses[a].is_none()) {
            continue; // truncated by the horizon; verify_tcr guards these
        }
        let times: BTreeMap<Agent, Time> = agents
            .iter()
            .map(|&a| (a, run.responses[a].unwrap()))
            .collect();
        match find_brooms(
            &scenario.context,
            run,
            scenario.tcr.trigger,
            &agents,
            &times,
        ) {
            Ok(brooms) if !brooms.is_empty() => checked += 1,
            Ok(_) => {
                return CheckReport::fail(
                    &name,
                    format!("run without a broom by its response times: {:?}", times),
                )
            }
            Err(e) => return CheckReport::fail(&name, format!("{e}")),
        }
    }
    CheckReport::pass(&name, format!("{} responding runs checked", checked))
}

/// All constraint-graph paths from `start` with at most `max_edges` edges.
fn paths_from(spec: &ImplementationSpec, start: usize, max_edges: usize) -> Vec<Vec<usize>> {
    let n = spec.len();
    let mut out = vec![vec![start]];
    let mut frontier = vec![vec![start]];
    for _ in 0..max_edges {
        let mut next = Vec::new();
        for p in &frontier {
            let last = *p.last().unwrap();
            for v in 0..n {
                if v != last && spec.get(last, v).is_finite() {
                    let mut q = p.clone();
                    q.push(v);
                    next.push(q);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// For every run of a solving rule and every responder, the required
/// chain exists for every constraint path from the responder (up to
/// `max_edges`, skipping paths whose end nodes fall outside the horizon) at
/// the response time.
pub fn centipede_theorem(
    label: &str,
    scenario: &Scenario,
    rule: &dyn ResponseRule,
    max_edges: usize,
) -> CheckReport {
    let name = format!("path-traversing-centipede theorem [{label}]");
    let runs = match enumerate(scenario) {
        Ok(r) => r,
        Err(e) => return CheckReport::fail(&name, e),
    };
    let runs = respond_all(scenario, rule, &runs);
    let guard = match response_guard(scenario, &runs) {
        Ok(g) => g,
        Err(e) => return CheckReport::fail(&name, e),
    };
    if !verify_tcr(&scenario.tcr, runs.iter(), guard) {
        return CheckReport::fail(&name, "rule does not solve the problem".into());
    }
    let spec = &scenario.tcr.delta;
    let mut checked = 0usize;
    let mut clipped = 0usize;
    for run in &runs {
        if run.input_time(scenario.tcr.trigger).is_none() {
            continue;
        }
        for (pos, &agent) in spec.agents().iter().enumerate() {
            let Some(t_r) = run.responses[agent] else {
                continue;
            };
            for path in paths_from(spec, pos, max_edges) {
                let named: Vec<Agent> = path.iter().map(|&p| spec.agents()[p]).collect();
                match has_path_traversing_centipede(
                    &scenario.context,
                    run,
                    scenario.tcr.trigger,
                    &named,
                    spec,
                    t_r,
                ) {
                    Ok(SearchOutcome::Found(_)) => checked += 1,
                    Ok(SearchOutcome::HorizonClipped) => clipped += 1,
                    Ok(SearchOutcome::Absent) => {
                        return CheckReport::fail(
                            &name,
                            format!(
                                "missing chain for path {:?} at t={} (trigger at {:?})",
                                named,
                                t_r,
                                run.input_time(scenario.tcr.trigger)
                            ),
                        )
                    }
                    Err(e) => return CheckReport::fail(&name, format!("{e}")),
                }
            }
        }
    }
    CheckReport::pass(
        &name,
        format!("{checked} path requirements found, {clipped} clipped"),
    )
}

/// The optimal engine and the brute-force oracle produce identical response
/// tables over every enumerated run, and neither responds later than a
/// provided reference rule (when one solves the problem).
pub fn rule_agreement(
    label: &str,
    scenario: &Scenario,
    reference: Option<&dyn ResponseRule>,
) -> CheckReport {
    let name = format!("optimal vs brute-force [{label}]");
    let runs = match enumerate(scenario) {
        Ok(r) => r,
        Err(e) => return CheckReport::fail(&name, e),
    };
    let optimal = match optimal_response_rule(&scenario.tcr) {
        Ok(r) => r,
        Err(e) => return CheckReport::fail(&name, format!("{e}")),
    };
    let oracle = match bruteforce_response_rule(&scenario.tcr, DEFAULT_PATH_BUDGET) {
        Ok(r) => r,
        Err(e) => return CheckReport::fail(&name, format!("{e}")),
    };
    let opt_runs = respond_all(scenario, &optimal, &runs);
    let orc_runs = respond_all(scenario, &oracle, &runs);
    let guard = match response_guard(scenario, &opt_runs) {
        Ok(g) => g,
        Err(e) => return CheckReport::fail(&name, e),
    };
    for (a, b) in opt_runs.iter().zip(&orc_runs) {
        if a.responses != b.responses {
            return CheckReport::fail(
                &name,
                format!(
                    "response tables differ: optimal {:?} vs oracle {:?} (trigger {:?})",
                    a.responses,
                    b.responses,
                    a.input_time(scenario.tcr.trigger)
                ),
            );
        }
    }
    if !verify_tcr(&scenario.tcr, opt_runs.iter(), guard) {
        return CheckReport::fail(&name, "optimal rule fails verification".into());
    }
    // A verified non-empty triggered run set certifies implementability.
    if opt_runs
        .iter()
        .any(|r| r.input_time(scenario.tcr.trigger).is_some())
        && !is_implementable(&scenario.tcr.delta)
    {
        return CheckReport::fail(&name, "solved problem with an unimplementable delta".into());
    }
    if let Some(reference) = reference {
        let ref_runs = respond_all(scenario, reference, &runs);
        let ref_guard = match response_guard(scenario, &ref_runs) {
            Ok(g) => g,
            Err(e) => return CheckReport::fail(&name, e),
        };
        if !verify_tcr(&scenario.tcr, ref_runs.iter(), ref_guard) {
            return CheckReport::fail(&name, "reference rule fails verification".into());
        }
        for (opt, re) in opt_runs.iter().zip(&ref_runs) {
            for &a in scenario.tcr.agents() {
                if let (Some(to), Some(tr)) = (opt.responses[a], re.responses[a]) {
                    if to > tr {
                        return CheckReport::fail(
                            &name,
                            format!("optimal responds later than reference for agent {a}"),
                        );
                    }
                }
                if opt.responses[a].is_none() && re.responses[a].is_some() {
                    return CheckReport::fail(
                        &name,
                        format!("optimal missed a response the reference makes (agent {a})"),
                    );
                }
            }
        }
    }
    CheckReport::pass(&name, format!("{} runs agree", runs.len()))
}

/// Result of the fixed-point-versus-engine comparison.
pub struct EquivalenceOutcome {
    pub report: CheckReport,
    pub points: usize,
    pub guarded_points: usize,
}

/// Build the oracle point space and compare: membership in each agent's
/// knowledge of its fixed-point coordinate must begin exactly at the optimal
/// rule's response time (on guard-clear runs), and the two fixed-point forms
/// must coincide under their stated hypotheses.
pub fn oracle_equivalence(label: &str, scenario: &Scenario) -> EquivalenceOutcome {
    let name = format!("fixed point vs response engine [{label}]");
    let fail = |d: String| EquivalenceOutcome {
        report: CheckReport::fail(&name, d),
        points: 0,
        guarded_points: 0,
    };
    let runs = match enumerate(scenario) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let rule = match optimal_response_rule(&scenario.tcr) {
        Ok(r) => r,
        Err(e) => return fail(format!("{e}")),
    };
    let runs = respond_all(scenario, &rule, &runs);
    let space = match PointSpace::new(&scenario.context, runs) {
        Ok(s) => s,
        Err(e) => return fail(format!("{e}")),
    };
    let delta = &scenario.tcr.delta;
    let trigger = scenario.tcr.trigger;
    let psi = space.no_later_than(Finite(0), &space.input_occurring(trigger));
    let fp = match space.delta_common_knowledge(delta, &psi) {
        Ok(fp) => fp,
        Err(e) => return fail(format!("{e}")),
    };
    let ensemble: Vec<PointSet> = delta
        .agents()
        .iter()
        .zip(&fp.coords)
        .map(|(&a, c)| space.knows(a, c))
        .collect();

    let guard = slack_guard(&scenario.context, delta) as i64;
    let horizon = space.horizon() as i64;
    let mut guarded_points = 0usize;
    for (ri, run) in space.runs().iter().enumerate() {
        let t0 = run.input_time(trigger);
        for (k, &a) in delta.agents().iter().enumerate() {
            // Untriggered runs carry no fixed-point knowledge at all.
            if t0.is_none() {
                for t in 0..=space.horizon() {
                    if ensemble[k].contains(space.point(ri, t)) {
                        return fail(format!("knowledge without a trigger (run {ri}, agent {a})"));
                    }
                }
                continue;
            }
            let run_guarded = t0.unwrap() as i64 + guard <= horizon;
            if run_guarded {
                let first =
                    (0..=space.horizon()).find(|&t| ensemble[k].contains(space.point(ri, t)));
                if first != run.responses[a] {
                    return fail(format!(
                        "run {ri} agent {a}: first knowledge {:?} vs response {:?}",
                        first, run.responses[a]
                    ));
                }
            }
            for t in 0..=space.horizon() {
                if t as i64 + guard <= horizon {
                    guarded_points += 1;
                    let member = ensemble[k].contains(space.point(ri, t));
                    let responded = run.responses[a].is_some_and(|r| r <= t);
                    if member != responded {
                        return fail(format!(
                            "run {ri} agent {a} t={t}: membership {member} vs responded {responded}"
                        ));
                    }
                }
            }
        }
    }

    // Shift-form equivalence under its hypotheses: stability of psi holds by
    // construction and enumeration yields perfect recall; check that every
    // coordinate is eventually known wherever psi eventually holds.
    let some_psi = space.sometime(&psi);
    let hypotheses = fp
        .coords
        .iter()
        .all(|c| some_psi.is_subset(&space.sometime(c)));
    if !hypotheses {
        return fail("shift-form hypotheses do not hold on this space".into());
    }
    let g = match space.g_delta_common_knowledge(delta, &psi) {
        Ok(g) => g,
        Err(e) => return fail(format!("{e}")),
    };
    // The shift operator clips at the horizon, so the two forms are compared
    // on the clipping-free region only.
    let mut guard_mask = space.empty_set();
    for ri in 0..space.runs().len() {
        for t in 0..=space.horizon() {
            if t as i64 + guard <= horizon {
                guard_mask.insert(space.point(ri, t));
            }
        }
    }
    for (gc, fc) in g.coords.iter().zip(&fp.coords) {
        if gc.intersect(&guard_mask) != fc.intersect(&guard_mask) {
            return fail("shift-form and window-form fixed points differ on guarded points".into());
        }
    }

    EquivalenceOutcome {
        report: CheckReport::pass(
            &name,
            format!(
                "{} points ({} guarded) agree; fixed-point forms equal",
                space.len(),
                guarded_points
            ),
        ),
        points: space.len(),
        guarded_points,
    }
}

/// Fixed-point ensemble properties: coordination, stability, locality,
/// iteration bound, and maximality against repaired random coordinated
/// ensembles.
pub fn gfp_ensemble_properties(
    label: &str,
    scenario: &Scenario,
    samples: usize,
    seed: u64,
) -> CheckReport {
    let name = format!("fixed-point ensemble properties [{label}]");
    let runs = match enumerate(scenario) {
        Ok(r) => r,
        Err(e) => return CheckReport::fail(&name, e),
    };
    let space = match PointSpace::new(&scenario.context, runs) {
        Ok(s) => s,
        Err(e) => return CheckReport::fail(&name, format!("{e}")),
    };
    let delta = &scenario.tcr.delta;
    let psi = space.no_later_than(Finite(0), &space.input_occurring(scenario.tcr.trigger));
    let fp = match space.delta_common_knowledge(delta, &psi) {
        Ok(fp) => fp,
        Err(e) => return CheckReport::fail(&name, format!("{e}")),
    };
    if fp.iterations > space.len() * delta.len() + 1 {
        return CheckReport::fail(
            &name,
            format!("iteration bound exceeded: {}", fp.iterations),
        );
    }
    let ensemble: Vec<PointSet> = delta
        .agents()
        .iter()
        .zip(&fp.coords)
        .map(|(&a, c)| space.knows(a, c))
        .collect();
    for (k, &a) in delta.agents().iter().enumerate() {
        if space.no_later_than(Finite(0), &fp.coords[k]) != fp.coords[k] {
            return CheckReport::fail(&name, format!("coordinate {k} is not stable"));
        }
        if space.no_later_than(Finite(0), &ensemble[k]) != ensemble[k] {
            return CheckReport::fail(&name, format!("knowledge coordinate {k} is not stable"));
        }
        if !space.is_local(a, &ensemble[k]) {
            return CheckReport::fail(&name, format!("knowledge coordinate {k} is not local"));
        }
    }
    if !space.is_delta_coordinated(&ensemble, delta) {
        return CheckReport::fail(&name, "fixed-point ensemble is not coordinated".into());
    }

    // Random coordinated local ensembles inside psi, by shrink-repair.
    let mut rng = Rng::new(seed);
    let n = delta.len();
    let mut nonempty = 0usize;
    for s in 0..samples {
        let mut cand: Vec<PointSet> = (0..n)
            .map(|k| {
                let mut set = space.empty_set();
                for p in 0..space.len() {
                    // Bias toward the fixed-point ensemble so repairs often
                    // survive with content.
                    let keep = if ensemble[k].contains(p) {
                        rng.chance(7, 8)
                    } else {
                        psi.contains(p) && rng.chance(1, 8)
                    };
                    if keep {
                        set.insert(p);
                    }
                }
                set
            })
            .collect();
        loop {
            let mut next: Vec<PointSet> = cand
                .iter()
                .zip(delta.agents())
                .map(|(c, &a)| space.knows(a, c))
                .collect();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        let window = space.no_later_than(delta.get(i, j), &next[j]);
                        next[i] = next[i].intersect(&window);
                    }
                }
            }
            if next == cand {
                break;
            }
            cand = next;
        }
        // Repaired candidates are coordinated, local, and inside psi.
        if !space.is_delta_coordinated(&cand, delta) {
            return CheckReport::fail(&name, format!("sample {s}: repair left incoordination"));
        }
        let union = cand.iter().fold(space.empty_set(), |acc, c| acc.union(c));
        if !union.is_subset(&psi) {
            return CheckReport::fail(&name, format!("sample {s}: escaped psi"));
        }
        if !union.is_empty() {
            nonempty += 1;
        }
        // Maximality: every coordinated ensemble within psi sits below the
        // fixed-point ensemble.
        for k in 0..n {
            if !cand[k].is_subset(&ensemble[k]) {
                return CheckReport::fail(&name, format!("sample {s}: exceeds the fixed point"));
            }
        }
        // And its own fixed point dominates it coordinatewise.
        let own = match space.delta_common_knowledge(delta, &union) {
            Ok(fp) => fp,
            Err(e) => return CheckReport::fail(&name, format!("{e}")),
        };
        for (k, &a) in delta.agents().iter().enumerate() {
            if !cand[k].is_subset(&space.knows(a, &own.coords[k])) {
                return CheckReport::fail(
                    &name,
                    format!("sample {s}: below-own-fixed-point failed"),
                );
            }
        }
        let own_union = own
            .coords
            .iter()
            .fold(space.empty_set(), |acc, c| acc.union(c));
        if !union.is_subset(&own_union) {
            return CheckReport::fail(&name, format!("sample {s}: union containment failed"));
        }
    }
    if samples > 0 && nonempty == 0 {
        return CheckReport::fail(&name, "all repaired samples were empty".into());
    }
    CheckReport::pass(
        &name,
        format!("{samples} coordinated samples ({nonempty} non-empty)"),
    )
}

/// With all constraints at `+inf`, the intersection of the vectorial fixed
/// point equals the scalar eventual-common-knowledge fixed point, and the
/// knowledge projections coincide coordinatewise.
pub fn eventual_ck_reduction(label: &str, scenario: &Scenario) -> CheckReport {
    let name = format!("eventual-common-knowledge reduction [{label}]");
    let runs = match enumerate(scenario) {
        Ok(r) => r,
        Err(e) => return CheckReport::fail(&name, e),
    };
    let space = match PointSpace::new(&scenario.context, runs) {
        Ok(s) => s,
        Err(e) => return CheckReport::fail(&name, format!("{e}")),
    };
    let agents = scenario.tcr.agents().to_vec();
    let unconstrained = ImplementationSpec::uniform(agents.clone(), PosInf).expect("agents");
    let occurring = space.input_occurring(scenario.tcr.trigger);
    for psi in [
        space.sometime(&occurring),
        space.no_later_than(Finite(0), &occurring),
    ] {
        let fp = match space.delta_common_knowledge(&unconstrained, &psi) {
            Ok(fp) => fp,
            Err(e) => return CheckReport::fail(&name, format!("{e}")),
        };
        let scalar = space.eventual_common_knowledge(&agents, &psi);
        let meet = fp
            .coords
            .iter()
            .fold(space.full_set(), |acc, c| acc.intersect(c));
        if meet != scalar {
            return CheckReport::fail(
                &name,
                "tuple meet differs from the scalar fixed point".into(),
            );
        }
        for (k, &a) in agents.iter().enumerate() {
            if space.knows(a, &fp.coords[k]) != space.knows(a, &scalar) {
                return CheckReport::fail(&name, format!("knowledge projection differs for {a}"));
            }
        }
    }
    CheckReport::pass(&name, format!("{} points", space.len()))
}

/// Knowing an ND event will occur equals knowing it has occurred, on the
/// enumerated space.
pub fn nd_knowledge(label: &str, scenario: &Scenario) -> CheckReport {
    let name = format!("nd-knowledge equality [{label}]");
    let runs = match enumerate(scenario) {
        Ok(r) => r,
        Err(e) => return CheckReport::fail(&name, e),
    };
    let space = match PointSpace::new(&scenario.context, runs) {
        Ok(s) => s,
        Err(e) => return CheckReport::fail(&name, format!("{e}")),
    };
    let report = space.nd_knowledge_check(&scenario.context, scenario.tcr.trigger);
    if report.holds() {
        CheckReport::pass(&name, format!("{} points", space.len()))
    } else {
        let mut detail = String::new();
        for f in report.failures.iter().take(5) {
            let _ = write!(detail, "(agent {} run {} t {}) ", f.agent, f.run, f.t);
        }
        CheckReport::fail(&name, detail)
    }
}

/// For every fully-responded triggered run and every agent of a
/// strongly-connected constraint component, a broom for the whole component
/// exists among the agent's known events with horizon at most
/// `t_r(i) + (|J|-1) * L * max(dhat over J)`, where `L` counts ND events on
/// the longest syncausal path from the trigger.
pub fn implies_broom_bound(label: &str, scenario: &Scenario) -> CheckReport {
    let name = format!("broom horizon bound [{label}]");
    let runs = match enumerate(scenario) {
        Ok(r) => r,
        Err(e) => return CheckReport::fail(&name, e),
    };
    let rule = match optimal_response_rule(&scenario.tcr) {
        Ok(r) => r,
        Err(e) => return CheckReport::fail(&name, format!("{e}")),
    };
    let runs = respond_all(scenario, &rule, &runs);
    let spec = &scenario.tcr.delta;
    let dhat = tcr_core::constraints::canonical_form(spec);
    let comps = {
        // Components over positions, mapped to agent ids.
        let adj = spec.adjacency();
        tcr_core::graph::tarjan_scc(&adj)
    };
    let trigger = scenario.tcr.trigger;
    let observer = scenario.tcr.observer();
    let mut checked = 0usize;
    for run in &runs {
        let Some(t0) = run.input_time(trigger) else {
            continue;
        };
        if spec.agents().iter().any(|&a| run.responses[a].is_none()) {
            continue;
        }
        let trigger_event = tcr_core::runtime::NdEvent {
            time: t0,
            kind: NdEventKind::Input(trigger),
            observer,
        };
        for comp in &comps {
            let max_dhat = comp
                .iter()
                .flat_map(|&i| comp.iter().map(move |&j| (i, j)))
                .filter_map(|(i, j)| dhat.get(i, j).finite())
                .max()
                .unwrap_or(0)
                .max(0);
            for &pos in comp {
                let agent = spec.agents()[pos];
                let t_r = run.responses[agent].unwrap();
                let l = match max_nd_count(
                    &scenario.context,
                    run,
                    CausalSource::Event(trigger_event),
                    NodeRef { agent, time: t_r },
                ) {
                    Finite(l) => l,
                    _ => continue,
                };
                let bound = t_r as i64 + (comp.len() as i64 - 1) * l * max_dhat;
                let members: Vec<Agent> = comp.iter().map(|&p| spec.agents()[p]).collect();
                let times: BTreeMap<Agent, Time> =
                    members.iter().map(|&a| (a, bound as Time)).collect();
                let brooms = match find_brooms(&scenario.context, run, trigger, &members, &times) {
                    Ok(b) => b,
                    Err(e) => return CheckReport::fail(&name, format!("{e}")),
                };
                let past = nd_past(&scenario.context, run, NodeRef { agent, time: t_r });
                if !brooms.iter().any(|b| past.contains(b)) {
                    return CheckReport::fail(
                        &name,
                        format!(
                            "no known broom for {:?} within horizon {bound} (agent {agent})",
                            members
                        ),
                    );
                }
                checked += 1;
            }
        }
    }
    if checked == 0 {
        return CheckReport::fail(&name, "nothing checked".into());
    }
    CheckReport::pass(&name, format!("{checked} component obligations bounded"))
}

/// On a context where the simultaneous problem is decidable one way, every
/// strongly-connected, negative-cycle-free constraining function over the
/// same agents gets the same solvability verdict.
pub fn tcr_iff_sr(label: &str, scenario: &Scenario, samples: usize, seed: u64) -> CheckReport {
    let name = format!("solvability transfer [{label}]");
    let agents = scenario.tcr.agents().to_vec();
    let zero = ImplementationSpec::uniform(agents.clone(), Finite(0)).expect("agents");
    let base_spec =
        TcrSpec::new(scenario.context.clone(), scenario.tcr.trigger, zero).expect("valid spec");
    let baseline = match check_solvability(&base_spec) {
        Ok(r) => r.solvable,
        Err(e) => return CheckReport::fail(&name, format!("{e}")),
    };
    let mut rng = Rng::new(seed);
    let mut produced = 0usize;
    let mut attempts = 0usize;
    while produced < samples {
        attempts += 1;
        if attempts > samples * 200 {
            return CheckReport::fail(&name, "generator starved".into());
        }
        let n = agents.len();
        let mut entries = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && rng.chance(70, 100) {
                    entries.push(((agents[i], agents[j]), Finite(rng.below(7) as i64 - 3)));
                }
            }
        }
        let delta = ImplementationSpec::new(agents.clone(), &entries).expect("agents");
        if !is_implementable(&delta) {
            continue;
        }
        let comps = tcr_core::graph::tarjan_scc(&delta.adjacency());
        if comps.len() != 1 {
            continue;
        }
        produced += 1;
        let spec = TcrSpec::new(scenario.context.clone(), scenario.tcr.trigger, delta)
            .expect("valid spec");
        let verdict = match check_solvability(&spec) {
            Ok(r) => r.solvable,
            Err(e) => return CheckReport::fail(&name, format!("{e}")),
        };
        if verdict != baseline {
            return CheckReport::fail(
                &name,
                format!("verdict {verdict} against baseline {baseline}"),
            );
        }
    }
    CheckReport::pass(
        &name,
        format!("{samples} constraint sets agree ({baseline})"),
    )
}
