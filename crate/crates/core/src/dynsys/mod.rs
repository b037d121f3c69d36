//! Computable dynamical systems `M_{t+1} = S(M_0, t)`: a small catalog of
//! rules, trajectories with execution-cost accounting, adaptation to an
//! environment through conditional K̂, convergence detection and the
//! time/state complexity gap.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{nat_to_string, BitString};
use crate::enumerate::{shortest_printer, Bounds, EnumRow, EnumTable};
use crate::vm;

#[derive(Debug, Error)]
pub enum DynError {
    #[error("rule failed at t={t}: {reason}")]
    RuleFailure { t: u64, reason: String, partial: Trajectory },
    #[error("invalid system: {0}")]
    InvalidSpec(String),
}

/// Evolution rule with its parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Rule {
    /// `M_t = nat_to_string(t)`.
    Counter,
    /// `M_t` is `M_0` repeated `t + 1` times.
    Repeater,
    /// Runs `program` on `state ++ encode_self_delim(nat_to_string(t))`.
    SbmRule { program: BitString, step_bound: u64 },
    /// Emulates `program` for `t + 1` steps: `target` once it has halted,
    /// `decoy` until then.
    HaltingProbe { program: BitString, target: BitString, decoy: BitString },
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Counter => "counter",
            Rule::Repeater => "repeater",
            Rule::SbmRule { .. } => "sbm_rule",
            Rule::HaltingProbe { .. } => "halting_probe",
        }
    }
}

/// Environment rule `E(M_0, t)` for dynamic environments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum EnvRule {
    /// `nat_to_string(t)`.
    Time,
    /// `M_0` repeated `t + 1` times.
    Repeat,
    /// `even` on even `t`, `odd` otherwise.
    Alternate { even: Box<EnvSpec>, odd: Box<EnvSpec> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvSpec {
    Static(BitString),
    Dynamic(EnvRule),
}

impl EnvSpec {
    pub fn value(&self, initial: &BitString, t: u64) -> BitString {
        match self {
            EnvSpec::Static(v) => v.clone(),
            EnvSpec::Dynamic(EnvRule::Time) => nat_to_string(t),
            EnvSpec::Dynamic(EnvRule::Repeat) => initial.repeat(t as usize + 1),
            EnvSpec::Dynamic(EnvRule::Alternate { even, odd }) => {
                if t.is_multiple_of(2) {
                    even.value(initial, t)
                } else {
                    odd.value(initial, t)
                }
            }
        }
    }
}

impl Default for EnvSpec {
    fn default() -> Self {
        EnvSpec::Static(BitString::new())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemSpec {
    #[serde(flatten)]
    pub rule: Rule,
    #[serde(default)]
    pub initial_state: BitString,
    #[serde(default)]
    pub env: EnvSpec,
}

impl SystemSpec {
    pub fn new(rule: Rule, initial_state: BitString, env: EnvSpec) -> Self {
        SystemSpec { rule, initial_state, env }
    }

    pub fn validate(&self) -> Result<(), DynError> {
        match &self.rule {
            Rule::HaltingProbe { target, decoy, .. } if target == decoy => {
                Err(DynError::InvalidSpec("halting_probe needs target != decoy".into()))
            }
            Rule::SbmRule { step_bound: 0, .. } => {
                Err(DynError::InvalidSpec("sbm_rule needs a positive step bound".into()))
            }
            _ => Ok(()),
        }
    }
}

fn rule_failure(t: u64, reason: String) -> DynError {
    DynError::RuleFailure { t, reason, partial: Trajectory::default() }
}

/// One application of the rule: the state at `t + 1` and its cost in steps.
pub fn step(spec: &SystemSpec, state: &BitString, t: u64) -> Result<(BitString, u64), DynError> {
    match &spec.rule {
        Rule::Counter => Ok((nat_to_string(t + 1), 1)),
        Rule::Repeater => Ok((spec.initial_state.repeat(t as usize + 2), 1)),
        Rule::SbmRule { program, step_bound } => {
            let input = state.concat(&vm::encode_self_delim(&nat_to_string(t)));
            let out = vm::run(program, Some(&input), *step_bound);
            if out.valid {
                Ok((out.output, out.steps))
            } else {
                Err(rule_failure(t, format!("rule program ended {:?} after {} steps", out.status, out.steps)))
            }
        }
        Rule::HaltingProbe { program, target, decoy } => {
            let out = vm::run(program, None, t + 1);
            if out.valid {
                Ok((target.clone(), out.steps))
            } else {
                Ok((decoy.clone(), t + 1))
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Trajectory {
    pub states: Vec<BitString>,
    /// Execution cost spent to reach each state; `0` for `M_0`.
    pub cumulative_steps: Vec<u64>,
}

impl Trajectory {
    pub fn horizon(&self) -> usize {
        self.states.len().saturating_sub(1)
    }
}

/// `M_0 .. M_horizon`. On a rule failure the error carries the states
/// computed so far.
pub fn trajectory(spec: &SystemSpec, horizon: u64) -> Result<Trajectory, DynError> {
    spec.validate()?;
    if horizon == 0 {
        return Err(DynError::InvalidSpec("horizon must be at least 1".into()));
    }
    let mut traj = Trajectory { states: vec![spec.initial_state.clone()], cumulative_steps: vec![0] };
    for t in 0..horizon {
        let state = traj.states.last().unwrap();
        match step(spec, state, t) {
            Ok((next, cost)) => {
                let total = traj.cumulative_steps.last().unwrap() + cost;
                traj.states.push(next);
                traj.cumulative_steps.push(total);
            }
            Err(DynError::RuleFailure { t, reason, .. }) => {
                return Err(DynError::RuleFailure { t, reason, partial: traj });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(traj)
}

/// Adaptation threshold in bits, or the degenerate infinite threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Epsilon {
    Bits(usize),
    Infinite,
}

impl Epsilon {
    pub fn admits(&self, k: usize) -> bool {
        match self {
            Epsilon::Bits(e) => k <= *e,
            Epsilon::Infinite => true,
        }
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Epsilon::Bits(e) => write!(f, "{e}"),
            Epsilon::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Epsilon {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "inf" {
            return Ok(Epsilon::Infinite);
        }
        s.parse().map(Epsilon::Bits).map_err(|_| format!("bad epsilon {s:?}"))
    }
}

/// Memoized conditional K̂ under fixed bounds. Programs for the bounds'
/// own input come from the table when one is attached.
pub struct ConditionalK<'t> {
    bounds: Bounds,
    table: Option<&'t EnumTable>,
    memo: Mutex<HashMap<(BitString, BitString), Option<EnumRow>>>,
}

impl<'t> ConditionalK<'t> {
    pub fn new(bounds: Bounds) -> Self {
        ConditionalK { bounds, table: None, memo: Mutex::new(HashMap::new()) }
    }

    pub fn from_table(table: &'t EnumTable) -> Self {
        ConditionalK { bounds: table.bounds.clone(), table: Some(table), memo: Mutex::new(HashMap::new()) }
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    /// Shortest program printing `x` on input `given`, if one fits.
    pub fn shortest(&self, x: &BitString, given: &BitString) -> Option<EnumRow> {
        let key = (x.clone(), given.clone());
        if let Some(hit) = self.memo.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let row = match self.table {
            Some(t) if given.bits() == self.bounds.input_profile.bits() => t.first_printer(x).cloned(),
            _ => shortest_printer(x, given.bits(), self.bounds.max_len, self.bounds.step_bound),
        };
        self.memo.lock().unwrap().insert(key, row.clone());
        row
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Adaptation {
    pub adapted: bool,
    /// `None` when K̂(env | state) exceeds the bounds (or was not needed
    /// under an infinite threshold).
    pub k_cond: Option<usize>,
    pub witness: Option<BitString>,
}

/// Whether `K̂(env_value | state) <= epsilon`.
pub fn is_adapted(
    state: &BitString,
    env_value: &BitString,
    epsilon: Epsilon,
    k: &ConditionalK<'_>,
) -> Adaptation {
    if epsilon == Epsilon::Infinite {
        return Adaptation { adapted: true, k_cond: None, witness: None };
    }
    match k.shortest(env_value, state) {
        Some(row) => Adaptation {
            adapted: epsilon.admits(row.program.len()),
            k_cond: Some(row.program.len()),
            witness: Some(row.program),
        },
        None => Adaptation { adapted: false, k_cond: None, witness: None },
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdaptRow {
    pub t: u64,
    pub state: BitString,
    pub env: BitString,
    #[serde(flatten)]
    pub adaptation: Adaptation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdaptationReport {
    pub epsilon: Epsilon,
    /// Adapted times in `1..=horizon`.
    pub times: Vec<u64>,
    /// Least `delta` with every `t` in `delta..=horizon` adapted.
    pub first_certified: Option<u64>,
    pub rows: Vec<AdaptRow>,
    pub max_len: usize,
    pub step_bound: u64,
    pub horizon: u64,
}

fn adapt_row(
    spec: &SystemSpec,
    traj: &Trajectory,
    t: u64,
    epsilon: Epsilon,
    k: &ConditionalK<'_>,
) -> AdaptRow {
    let state = traj.states[t as usize].clone();
    let env = spec.env.value(&spec.initial_state, t);
    let adaptation = is_adapted(&state, &env, epsilon, k);
    AdaptRow { t, state, env, adaptation }
}

/// Horizon-certified convergence time: the least `delta >= 1` such that
/// every `t` in `delta..=horizon` is adapted.
pub fn first_convergence(
    spec: &SystemSpec,
    epsilon: Epsilon,
    horizon: u64,
    k: &ConditionalK<'_>,
) -> Result<Option<u64>, DynError> {
    let traj = trajectory(spec, horizon)?;
    let mut delta = None;
    for t in (1..=horizon).rev() {
        if !adapt_row(spec, &traj, t, epsilon, k).adaptation.adapted {
            break;
        }
        delta = Some(t);
    }
    Ok(delta)
}

/// Every adapted time up to the horizon, with witnesses.
pub fn weak_convergence_times(
    spec: &SystemSpec,
    epsilon: Epsilon,
    horizon: u64,
    k: &ConditionalK<'_>,
) -> Result<AdaptationReport, DynError> {
    let traj = trajectory(spec, horizon)?;
    let rows: Vec<AdaptRow> = (1..=horizon).map(|t| adapt_row(spec, &traj, t, epsilon, k)).collect();
    let times = rows.iter().filter(|r| r.adaptation.adapted).map(|r| r.t).collect();
    let first_certified = rows.iter().rev().take_while(|r| r.adaptation.adapted).last().map(|r| r.t);
    Ok(AdaptationReport {
        epsilon,
        times,
        first_certified,
        rows,
        max_len: k.bounds.max_len,
        step_bound: k.bounds.step_bound,
        horizon,
    })
}

/// Writes `t,state,env,adapted,k_cond,witness`; `inf` marks K̂ beyond bounds.
pub fn write_adaptation_csv<W: std::io::Write>(dest: W, report: &AdaptationReport) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(dest);
    w.write_record(["t", "state", "env", "adapted", "k_cond", "witness"])?;
    for r in &report.rows {
        let a = &r.adaptation;
        w.write_record([
            r.t.to_string(),
            r.state.to_string(),
            r.env.to_string(),
            a.adapted.to_string(),
            a.k_cond.map_or("inf".into(), |k| k.to_string()),
            a.witness.as_ref().map_or(String::new(), |p| p.to_string()),
        ])?;
    }
    w.flush()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaKReport {
    pub times: Vec<u64>,
    /// K̂ of each time as a string; `None` beyond bounds.
    pub k: Vec<Option<usize>>,
    /// `delta[j][k] = K̂(times[k]) - K̂(times[j])` when both are finite.
    pub delta: Vec<Vec<Option<i64>>>,
}

pub fn delta_k_series(times: &[u64], table: &EnumTable) -> DeltaKReport {
    let k: Vec<Option<usize>> =
        times.iter().map(|&t| table.first_printer(&nat_to_string(t)).map(|r| r.program.len())).collect();
    let delta = k.iter().map(|kj| k.iter().map(|kk| Some((*kk)? as i64 - (*kj)? as i64)).collect()).collect();
    DeltaKReport { times: times.to_vec(), k, delta }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapReport {
    /// `(t, |K̂(M_t) - K̂(t)|)` for `t = 1..=horizon`; `None` when either
    /// side is beyond bounds.
    pub series: Vec<(u64, Option<u64>)>,
    pub max: Option<u64>,
    pub unbounded: usize,
}

pub fn time_state_gap(spec: &SystemSpec, horizon: u64, table: &EnumTable) -> Result<GapReport, DynError> {
    if horizon == 0 {
        return Ok(GapReport { series: Vec::new(), max: None, unbounded: 0 });
    }
    let traj = trajectory(spec, horizon)?;
    let k = |x: &BitString| table.first_printer(x).map(|r| r.program.len() as i64);
    let series: Vec<(u64, Option<u64>)> = (1..=horizon)
        .map(|t| {
            let gap = match (k(&traj.states[t as usize]), k(&nat_to_string(t))) {
                (Some(a), Some(b)) => Some(a.abs_diff(b)),
                _ => None,
            };
            (t, gap)
        })
        .collect();
    let max = series.iter().filter_map(|(_, g)| *g).max();
    let unbounded = series.iter().filter(|(_, g)| g.is_none()).count();
    Ok(GapReport { series, max, unbounded })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeRow {
    pub program: BitString,
    pub program_len: usize,
    /// Convergence time of the probe; `None` when it did not converge
    /// within the horizon.
    pub delta: Option<u64>,
    pub k_delta: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    pub rows: Vec<ProbeRow>,
    /// Largest `K̂(delta) - |m|` over converged rows.
    pub constant: Option<i64>,
}

/// Convergence times of halting probes over a family of embedded programs,
/// next to the complexity of those times.
pub fn convergence_complexity_report(
    family: &[BitString],
    target: &BitString,
    decoy: &BitString,
    epsilon: Epsilon,
    horizon: u64,
    k: &ConditionalK<'_>,
    table: &EnumTable,
) -> Result<ProbeReport, DynError> {
    let mut rows = Vec::with_capacity(family.len());
    for m in family {
        let spec = SystemSpec::new(
            Rule::HaltingProbe { program: m.clone(), target: target.clone(), decoy: decoy.clone() },
            decoy.clone(),
            EnvSpec::Static(target.clone()),
        );
        let delta = first_convergence(&spec, epsilon, horizon, k)?;
        let k_delta = delta.and_then(|d| table.first_printer(&nat_to_string(d)).map(|r| r.program.len()));
        rows.push(ProbeRow { program: m.clone(), program_len: m.len(), delta, k_delta });
    }
    let constant = rows.iter().filter_map(|r| r.k_delta.map(|kd| kd as i64 - r.program_len as i64)).max();
    Ok(ProbeReport { rows, constant })
}
