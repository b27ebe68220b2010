use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use tcr_cli::checks::{self, CheckReport};
use tcr_cli::scenario::{load_scenario, Scenario};
use tcr_cli::{dot, render};
use tcr_core::constraints::{canonical_form, is_implementable, minimal_implementation};
use tcr_core::coordination::{
    bruteforce_response_rule, check_solvability, optimal_response_rule, worst_case_latest_response,
    DEFAULT_PATH_BUDGET,
};
use tcr_core::runtime::{simulate, NeverRespond, ResponseRule, Run};
use tcr_core::syncausality::{
    find_brooms, find_centibroom, has_path_traversing_centipede, NodeRef, SearchOutcome,
};
use tcr_core::{Agent, Time};

/// Analyze, simulate and cross-validate timely-coordinated response
/// problems described by scenario files.
#[derive(Parser)]
#[command(name = "tcr", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the canonical form of the scenario's constraining function.
    Canon { scenario: PathBuf },
    /// Decide whether the constraining function admits any implementation.
    Implementable { scenario: PathBuf },
    /// Print the coordinate-wise minimal implementation.
    MinImpl { scenario: PathBuf },
    /// Decide solvability and print the component/witness report.
    Solvable { scenario: PathBuf },
    /// Print the worst-case latest-response bound.
    Bound { scenario: PathBuf },
    /// Simulate one named schedule and print the run trace.
    Simulate {
        scenario: PathBuf,
        #[arg(long)]
        schedule: String,
        #[arg(long, value_enum, default_value_t = RuleKind::None)]
        rule: RuleKind,
    },
    /// Search a simulated run for a syncausal structure.
    Detect {
        scenario: PathBuf,
        #[arg(long)]
        schedule: String,
        #[arg(long, value_enum)]
        structure: StructureKind,
        /// Agents for a broom, e.g. "1,2".
        #[arg(long)]
        agents: Option<String>,
        /// End-node times, e.g. "1=2,2=2".
        #[arg(long)]
        times: Option<String>,
        /// Path for a centipede, e.g. "1,2".
        #[arg(long)]
        path: Option<String>,
        /// Reference time for a centipede.
        #[arg(long)]
        at: Option<Time>,
        /// Groups for a centibroom, '|'-separated, e.g. "1|2,3".
        #[arg(long)]
        groups: Option<String>,
        /// Write the space-time diagram (with the found structure
        /// highlighted) to this file.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Compare the epistemic fixed point against the response engine.
    OracleEquiv { scenario: PathBuf },
    /// Run the property suites at desk scale.
    Selftest,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleKind {
    Optimal,
    Bruteforce,
    None,
}

#[derive(Clone, Copy, ValueEnum)]
enum StructureKind {
    Broom,
    Centipede,
    Centibroom,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load(path: &PathBuf) -> Result<Scenario, String> {
    let bytes = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    load_scenario(&bytes).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_agent(s: &Scenario, name: &str) -> Result<Agent, String> {
    s.names
        .agent_id(name.trim())
        .ok_or_else(|| format!("unknown agent '{name}'"))
}

fn parse_agents(s: &Scenario, list: &str) -> Result<Vec<Agent>, String> {
    list.split(',').map(|a| parse_agent(s, a)).collect()
}

fn parse_times(s: &Scenario, list: &str) -> Result<BTreeMap<Agent, Time>, String> {
    let mut out = BTreeMap::new();
    for part in list.split(',') {
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| format!("bad time entry '{part}', expected agent=t"))?;
        let t: Time = value
            .trim()
            .parse()
            .map_err(|_| format!("bad time '{value}'"))?;
        out.insert(parse_agent(s, name)?, t);
    }
    Ok(out)
}

fn simulate_named(s: &Scenario, schedule: &str, rule: &dyn ResponseRule) -> Result<Run, String> {
    let sched = s
        .schedules
        .get(schedule)
        .ok_or_else(|| format!("unknown schedule '{schedule}'"))?;
    simulate(&s.context, rule, sched, s.oracle.horizon).map_err(|e| format!("{e}"))
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Canon { scenario } => {
            let s = load(&scenario)?;
            print!(
                "{}",
                render::matrix(&s.names, &canonical_form(&s.tcr.delta))
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Implementable { scenario } => {
            let s = load(&scenario)?;
            if is_implementable(&s.tcr.delta) {
                println!("implementable");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("not implementable");
                Ok(ExitCode::from(1))
            }
        }
        Command::MinImpl { scenario } => {
            let s = load(&scenario)?;
            match minimal_implementation(&s.tcr.delta) {
                Ok(t) => {
                    print!("{}", render::assignment(&s.names, &t));
                    Ok(ExitCode::SUCCESS)
                }
                Err(_) => {
                    println!("not implementable");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Solvable { scenario } => {
            let s = load(&scenario)?;
            let report = check_solvability(&s.tcr).map_err(|e| format!("{e}"))?;
            print!("{}", render::solvability(&s.names, &report));
            Ok(if report.solvable {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Bound { scenario } => {
            let s = load(&scenario)?;
            let bound = worst_case_latest_response(&s.tcr).map_err(|e| format!("{e}"))?;
            println!("{bound}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate {
            scenario,
            schedule,
            rule,
        } => {
            let s = load(&scenario)?;
            let run = match rule {
                RuleKind::None => simulate_named(&s, &schedule, &NeverRespond)?,
                RuleKind::Optimal => {
                    let r = optimal_response_rule(&s.tcr).map_err(|e| format!("{e}"))?;
                    simulate_named(&s, &schedule, &r)?
                }
                RuleKind::Bruteforce => {
                    let r = bruteforce_response_rule(&s.tcr, DEFAULT_PATH_BUDGET)
                        .map_err(|e| format!("{e}"))?;
                    simulate_named(&s, &schedule, &r)?
                }
            };
            print!("{}", render::trace(&s.names, &s.context, &run));
            Ok(ExitCode::SUCCESS)
        }
        Command::Detect {
            scenario,
            schedule,
            structure,
            agents,
            times,
            path,
            at,
            groups,
            dot: dot_path,
        } => {
            let s = load(&scenario)?;
            let run = simulate_named(&s, &schedule, &NeverRespond)?;
            let trigger = s.tcr.trigger;
            let mut highlight = dot::Highlight::default();
            let found = match structure {
                StructureKind::Broom => {
                    let agents = parse_agents(
                        &s,
                        agents.as_deref().ok_or("--agents required for a broom")?,
                    )?;
                    let times =
                        parse_times(&s, times.as_deref().ok_or("--times required for a broom")?)?;
                    let brooms = find_brooms(&s.context, &run, trigger, &agents, &times)
                        .map_err(|e| format!("{e}"))?;
                    for e in &brooms {
                        println!(
                            "broom event: observer {} t={}",
                            s.names.agent(e.observer),
                            e.time
                        );
                    }
                    highlight.events = brooms.clone();
                    highlight.end_nodes = agents
                        .iter()
                        .map(|&a| NodeRef {
                            agent: a,
                            time: times[&a],
                        })
                        .collect();
                    !brooms.is_empty()
                }
                StructureKind::Centipede => {
                    let path = parse_agents(
                        &s,
                        path.as_deref().ok_or("--path required for a centipede")?,
                    )?;
                    let t = at.ok_or("--at required for a centipede")?;
                    match has_path_traversing_centipede(
                        &s.context,
                        &run,
                        trigger,
                        &path,
                        &s.tcr.delta,
                        t,
                    )
                    .map_err(|e| format!("{e}"))?
                    {
                        SearchOutcome::Found(chain) => {
                            for (k, e) in chain.iter().enumerate() {
                                println!(
                                    "chain[{k}]: observer {} t={}",
                                    s.names.agent(e.observer),
                                    e.time
                                );
                            }
                            highlight.events = chain;
                            true
                        }
                        SearchOutcome::Absent => {
                            println!("none");
                            false
                        }
                        SearchOutcome::HorizonClipped => {
                            println!("undecidable: end nodes outside the horizon");
                            false
                        }
                    }
                }
                StructureKind::Centibroom => {
                    let groups: Vec<Vec<Agent>> = groups
                        .as_deref()
                        .ok_or("--groups required for a centibroom")?
                        .split('|')
                        .map(|g| parse_agents(&s, g))
                        .collect::<Result<_, _>>()?;
                    let times = parse_times(
                        &s,
                        times
                            .as_deref()
                            .ok_or("--times required for a centibroom")?,
                    )?;
                    match find_centibroom(&s.context, &run, trigger, &groups, &times)
                        .map_err(|e| format!("{e}"))?
                    {
                        Some(chain) => {
                            for (k, e) in chain.iter().enumerate() {
                                println!(
                                    "chain[{k}]: observer {} t={}",
                                    s.names.agent(e.observer),
                                    e.time
                                );
                            }
                            highlight.events = chain;
                            true
                        }
                        None => {
                            println!("none");
                            false
                        }
                    }
                }
            };
            if let Some(path) = dot_path {
                std::fs::write(&path, dot::render(&s.names, &s.context, &run, &highlight))
                    .map_err(|e| format!("{}: {e}", path.display()))?;
            }
            Ok(if found {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::OracleEquiv { scenario } => {
            let s = load(&scenario)?;
            let outcome = checks::oracle_equivalence("scenario", &s);
            if outcome.report.pass {
                println!(
                    "AGREE on all guarded points ({} of {} points guarded)",
                    outcome.guarded_points, outcome.points
                );
                Ok(ExitCode::SUCCESS)
            } else {
                println!("DISAGREE: {}", outcome.report.detail);
                Ok(ExitCode::from(1))
            }
        }
        Command::Selftest => {
            let reports = selftest_reports();
            let mut ok = true;
            for r in &reports {
                println!(
                    "{} {} ({})",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.name,
                    r.detail
                );
                ok &= r.pass;
            }
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn embedded(name: &str, bytes: &str) -> Scenario {
    load_scenario(bytes.as_bytes()).unwrap_or_else(|e| panic!("bundled scenario {name}: {e}"))
}

fn selftest_reports() -> Vec<CheckReport> {
    let c1_zero = embedded("c1_zero", include_str!("../scenarios/c1_zero.json"));
    let c1_gap = embedded("c1_gap", include_str!("../scenarios/c1_gap.json"));
    let oracle_a = embedded("oracle_a", include_str!("../scenarios/oracle_a.json"));
    let ring3 = embedded("ring3", include_str!("../scenarios/ring3.json"));
    let mut out = vec![checks::canonical_form_suite(60, 7)];
    out.push(checks::broom_theorem("c1_zero", &c1_zero));
    out.push(checks::rule_agreement("c1_gap", &c1_gap, None));
    let optimal = optimal_response_rule(&oracle_a.tcr).expect("solvable");
    out.push(checks::centipede_theorem(
        "oracle_a", &oracle_a, &optimal, 4,
    ));
    out.push(checks::oracle_equivalence("oracle_a", &oracle_a).report);
    out.push(checks::gfp_ensemble_properties("ring3", &ring3, 20, 11));
    out.push(checks::eventual_ck_reduction("oracle_a", &oracle_a));
    out.push(checks::nd_knowledge("oracle_a", &oracle_a));
    out
}
