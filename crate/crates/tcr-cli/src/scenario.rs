//! Scenario files: a JSON description of a context, a coordination problem,
//! named schedules and enumeration bounds. Values of the extended domain use
//! the `"-inf"` / `"+inf"` string tokens; input occurrences use `"never"`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use tcr_core::constraints::ImplementationSpec;
use tcr_core::context::{Bound, Channel, Context, InputSpec};
use tcr_core::coordination::TcrSpec;
use tcr_core::delta::ExtendedDelta;
use tcr_core::runtime::{EnumerationConfig, NdSchedule};
use tcr_core::{Agent, Time};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RawScenario {
    pub context: RawContext,
    pub tcr: RawTcr,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub schedules: BTreeMap<String, RawSchedule>,
    #[serde(default)]
    pub oracle: RawOracle,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RawContext {
    pub agents: Vec<String>,
    pub channels: Vec<RawChannel>,
    pub inputs: Vec<RawInput>,
    #[serde(default = "default_true")]
    pub shared_clock: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RawChannel {
    pub from: String,
    pub to: String,
    pub bound: RawBound,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum RawBound {
    Finite(Time),
    Token(String),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RawInput {
    pub id: String,
    pub observer: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RawTcr {
    pub trigger: String,
    pub agents: Vec<String>,
    #[serde(default)]
    pub delta: Vec<RawDeltaEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RawDeltaEntry {
    pub from: String,
    pub to: String,
    pub value: RawDelta,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum RawDelta {
    Finite(i64),
    Token(String),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RawSchedule {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub inputs: BTreeMap<String, RawOccurrence>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub delays: Vec<RawDelay>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum RawOccurrence {
    At(Time),
    Token(String),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RawDelay {
    pub from: String,
    pub sent: Time,
    pub to: String,
    pub delay: Time,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RawOracle {
    pub horizon: Time,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_window: Option<Time>,
    #[serde(default = "default_max_runs")]
    pub max_runs: usize,
}

fn default_max_runs() -> usize {
    20_000
}

impl Default for RawOracle {
    fn default() -> Self {
        RawOracle {
            horizon: 4,
            input_window: None,
            max_runs: default_max_runs(),
        }
    }
}

/// Name tables mapping the file's identifiers to dense core indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Names {
    pub agents: Vec<String>,
    pub inputs: Vec<String>,
}

impl Names {
    pub fn agent(&self, a: Agent) -> &str {
        &self.agents[a]
    }

    pub fn agent_id(&self, name: &str) -> Option<Agent> {
        self.agents.iter().position(|n| n == name)
    }

    pub fn input_id(&self, name: &str) -> Option<usize> {
        self.inputs.iter().position(|n| n == name)
    }
}

/// A fully validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub names: Names,
    pub context: Context,
    pub tcr: TcrSpec,
    pub schedules: BTreeMap<String, NdSchedule>,
    pub oracle: EnumerationConfig,
}

#[derive(Debug)]
pub enum LoadError {
    Parse(String),
    Validation(Vec<String>),
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::Parse(msg) => write!(f, "parse error: {msg}"),
            LoadError::Validation(issues) => {
                writeln!(f, "validation failed:")?;
                for issue in issues {
                    writeln!(f, "  - {issue}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for LoadError {}

/// Parse and validate a scenario file.
pub fn load_scenario(bytes: &[u8]) -> Result<Scenario, LoadError> {
    let raw: RawScenario =
        serde_json::from_slice(bytes).map_err(|e| LoadError::Parse(e.to_string()))?;
    compile(&raw)
}

pub fn compile(raw: &RawScenario) -> Result<Scenario, LoadError> {
    let mut issues = Vec::new();

    let agents = raw.context.agents.clone();
    for (k, a) in agents.iter().enumerate() {
        if agents[..k].contains(a) {
            issues.push(format!("duplicate agent '{a}'"));
        }
    }
    let inputs: Vec<String> = raw.context.inputs.iter().map(|i| i.id.clone()).collect();
    for (k, i) in inputs.iter().enumerate() {
        if inputs[..k].contains(i) {
            issues.push(format!("duplicate input '{i}'"));
        }
    }
    let names = Names { agents, inputs };

    let agent_id = |name: &str, issues: &mut Vec<String>, what: &str| -> Agent {
        names.agent_id(name).unwrap_or_else(|| {
            issues.push(format!("{what}: unknown agent '{name}'"));
            usize::MAX
        })
    };

    let mut channels = Vec::new();
    for ch in &raw.context.channels {
        let from = agent_id(&ch.from, &mut issues, "channel");
        let to = agent_id(&ch.to, &mut issues, "channel");
        let bound = match &ch.bound {
            RawBound::Finite(b) => Bound::Finite(*b),
            RawBound::Token(t) if t == "+inf" => Bound::Infinite,
            RawBound::Token(t) => {
                issues.push(format!("channel {}->{}: bad bound '{t}'", ch.from, ch.to));
                Bound::Infinite
            }
        };
        channels.push(Channel { from, to, bound });
    }
    let mut input_specs = Vec::new();
    for input in &raw.context.inputs {
        input_specs.push(InputSpec {
            observer: agent_id(&input.observer, &mut issues, "input observer"),
        });
    }
    if !issues.is_empty() {
        return Err(LoadError::Validation(issues));
    }

    let context = Context {
        agent_count: names.agents.len(),
        channels,
        inputs: input_specs,
        shared_clock: raw.context.shared_clock,
    };
    for d in tcr_core::context::validate_context(&context) {
        issues.push(format!("{d}"));
    }

    // Coordination section.
    let trigger = names.input_id(&raw.tcr.trigger).unwrap_or_else(|| {
        issues.push(format!("unknown trigger input '{}'", raw.tcr.trigger));
        usize::MAX
    });
    let mut tcr_agents = Vec::new();
    for a in &raw.tcr.agents {
        tcr_agents.push(agent_id(a, &mut issues, "tcr agents"));
    }
    let mut entries = Vec::new();
    for (k, e) in raw.tcr.delta.iter().enumerate() {
        let from = agent_id(&e.from, &mut issues, "delta entry");
        let to = agent_id(&e.to, &mut issues, "delta entry");
        if raw.tcr.delta[..k]
            .iter()
            .any(|p| p.from == e.from && p.to == e.to)
        {
            issues.push(format!("duplicate delta entry {}->{}", e.from, e.to));
        }
        let value = match &e.value {
            RawDelta::Finite(v) => ExtendedDelta::Finite(*v),
            RawDelta::Token(t) if t == "+inf" => ExtendedDelta::PosInf,
            RawDelta::Token(t) if t == "-inf" => ExtendedDelta::NegInf,
            RawDelta::Token(t) => {
                issues.push(format!("delta {}->{}: bad value '{t}'", e.from, e.to));
                ExtendedDelta::PosInf
            }
        };
        entries.push(((from, to), value));
    }
    if !issues.is_empty() {
        return Err(LoadError::Validation(issues));
    }
    let delta = ImplementationSpec::new(tcr_agents, &entries)
        .map_err(|e| LoadError::Validation(vec![format!("delta: {e}")]))?;
    let tcr = TcrSpec::new(context.clone(), trigger, delta)
        .map_err(|e| LoadError::Validation(vec![format!("tcr: {e}")]))?;

    // Schedules.
    let mut schedules = BTreeMap::new();
    for (name, raw_sched) in &raw.schedules {
        let mut sched = NdSchedule::silent(context.inputs.len());
        for (input, occ) in &raw_sched.inputs {
            let Some(id) = names.input_id(input) else {
                issues.push(format!("schedule '{name}': unknown input '{input}'"));
                continue;
            };
            match occ {
                RawOccurrence::At(t) => sched.input_times[id] = Some(*t),
                RawOccurrence::Token(t) if t == "never" => {}
                RawOccurrence::Token(t) => {
                    issues.push(format!("schedule '{name}': bad occurrence '{t}'"));
                }
            }
        }
        for d in &raw_sched.delays {
            let from = agent_id(&d.from, &mut issues, "delay");
            let to = agent_id(&d.to, &mut issues, "delay");
            if from == usize::MAX || to == usize::MAX {
                continue;
            }
            match context.channel_bound(from, to) {
                None => issues.push(format!(
                    "schedule '{name}': no channel {}->{}",
                    d.from, d.to
                )),
                Some(Bound::Finite(b)) if d.delay < 1 || d.delay > b => issues.push(format!(
                    "schedule '{name}': delay {} outside 1..={b} for {}->{}",
                    d.delay, d.from, d.to
                )),
                Some(_) => {
                    sched = sched.with_delay(from, d.sent, to, d.delay);
                }
            }
        }
        schedules.insert(name.clone(), sched);
    }
    if !issues.is_empty() {
        return Err(LoadError::Validation(issues));
    }

    let oracle = EnumerationConfig {
        horizon: raw.oracle.horizon,
        input_window: raw.oracle.input_window,
        max_runs: raw.oracle.max_runs,
    };
    Ok(Scenario {
        names,
        context,
        tcr,
        schedules,
        oracle,
    })
}

/// Decompile back to the raw form (constraint entries sorted by name pair,
/// `+inf` pairs omitted). `serialize(load(x))` is a fixpoint of
/// `load ∘ serialize`.
pub fn to_raw(s: &Scenario) -> RawScenario {
    let agent = |a: Agent| s.names.agents[a].clone();
    let mut delta_entries = Vec::new();
    let spec = &s.tcr.delta;
    for (i, &a) in spec.agents().iter().enumerate() {
        for (j, &b) in spec.agents().iter().enumerate() {
            if i != j && spec.get(i, j) != ExtendedDelta::PosInf {
                delta_entries.push(RawDeltaEntry {
                    from: agent(a),
                    to: agent(b),
                    value: match spec.get(i, j) {
                        ExtendedDelta::Finite(v) => RawDelta::Finite(v),
                        ExtendedDelta::NegInf => RawDelta::Token("-inf".into()),
                        ExtendedDelta::PosInf => unreachable!(),
                    },
                });
            }
        }
    }
    RawScenario {
        context: RawContext {
            agents: s.names.agents.clone(),
            channels: s
                .context
                .channels
                .iter()
                .map(|ch| RawChannel {
                    from: agent(ch.from),
                    to: agent(ch.to),
                    bound: match ch.bound {
                        Bound::Finite(b) => RawBound::Finite(b),
                        Bound::Infinite => RawBound::Token("+inf".into()),
                    },
                })
                .collect(),
            inputs: s
                .context
                .inputs
                .iter()
                .zip(&s.names.inputs)
                .map(|(i, name)| RawInput {
                    id: name.clone(),
                    observer: agent(i.observer),
                })
                .collect(),
            shared_clock: s.context.shared_clock,
        },
        tcr: RawTcr {
            trigger: s.names.inputs[s.tcr.trigger].clone(),
            agents: s.tcr.agents().iter().map(|&a| agent(a)).collect(),
            delta: delta_entries,
        },
        schedules: s
            .schedules
            .iter()
            .map(|(name, sched)| {
                (
                    name.clone(),
                    RawSchedule {
                        inputs: sched
                            .input_times
                            .iter()
                            .enumerate()
                            .filter_map(|(id, &t)| {
                                t.map(|at| (s.names.inputs[id].clone(), RawOccurrence::At(at)))
                            })
                            .collect(),
                        delays: sched
                            .delays
                            .iter()
                            .map(|(msg, &d)| RawDelay {
                                from: agent(msg.sender),
                                sent: msg.send_time,
                                to: agent(msg.recipient),
                                delay: d,
                            })
                            .collect(),
                    },
                )
            })
            .collect(),
        oracle: RawOracle {
            horizon: s.oracle.horizon,
            input_window: s.oracle.input_window,
            max_runs: s.oracle.max_runs,
        },
    }
}

pub fn serialize(s: &Scenario) -> String {
    let mut out = serde_json::to_string_pretty(&to_raw(s)).expect("scenario serializes");
    out.push('\n');
    out
}
