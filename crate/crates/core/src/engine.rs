//! The randomized winnowing algorithm for online set multicover.
//!
//! Each arriving element `i` with covering family `S_i` is handled in three
//! phases:
//!
//! 1. `deficit = k - |S_i ∩ T|`; nothing happens when it is not positive.
//! 2. `mu` is the `deficit`-th least cost among the unselected sets of `S_i`.
//!    Every unselected `S` in `S_i` gets a step probability
//!    `p = (mu / c_S) * (alpha_p[S] + 1/|S_i|)`, its accumulated probability
//!    grows by `p`, and it is selected with probability `min(p, 1)`.
//! 3. Whatever deficit remains is filled greedily with least-cost sets.
//!
//! [`Variant::UnweightedK`] replaces the step probability by
//! `min(alpha_p[S] + deficit/|S_i|, 1)` and accumulates the clamped value;
//! [`Variant::Universal`] accumulates the unclamped value.
//!
//! Random draws are one uniform per candidate, in ascending set id order, so
//! a run is a pure function of `(system, sequence, variant, seed)`.

use std::cmp::Ordering;
use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{self, stats, Sequence, SetSystem, Violation};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Universal,
    UnweightedK,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Universal => "universal",
            Self::UnweightedK => "unweighted-k",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "universal" => Ok(Self::Universal),
            "unweighted-k" => Ok(Self::UnweightedK),
            other => Err(format!(
                "unknown variant {other:?} (expected universal or unweighted-k)"
            )),
        }
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("stat: asked for the {j}-th cheapest of {available} candidates")]
    StatOutOfRange { j: usize, available: usize },
    #[error("instance rejected: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("the unweighted-k variant needs unit costs; set {set} costs {cost}")]
    VariantRequiresUnitCosts { set: usize, cost: f64 },
    #[error("element {0} is outside the universe")]
    UnknownElement(usize),
    #[error("element {element}: only {available} unselected sets for deficit {deficit}")]
    CoverageUnreachable {
        element: usize,
        deficit: usize,
        available: usize,
    },
    #[error("optimum is not a valid cover: element {element} covered {covered} < {k} times")]
    InvalidOptimum {
        element: usize,
        covered: usize,
        k: usize,
    },
    #[error("trace line {line}: {message}")]
    TraceFormat { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Mutable state of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnlineState {
    selected: Vec<bool>,
    alpha_p: Vec<f64>,
    rng: SplitMix64,
}

impl OnlineState {
    pub fn new(num_sets: usize, seed: u64) -> Self {
        Self {
            selected: vec![false; num_sets],
            alpha_p: vec![0.0; num_sets],
            rng: SplitMix64::new(seed),
        }
    }

    pub fn is_selected(&self, set: usize) -> bool {
        self.selected[set]
    }

    /// Selected set ids, ascending.
    pub fn selected_ids(&self) -> Vec<usize> {
        self.selected
            .iter()
            .enumerate()
            .filter_map(|(id, &s)| s.then_some(id))
            .collect()
    }

    pub fn alpha_p(&self) -> &[f64] {
        &self.alpha_p
    }

    pub fn rng(&self) -> &SplitMix64 {
        &self.rng
    }

    fn select(&mut self, set: usize) {
        self.selected[set] = true;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetStep {
    pub set_id: usize,
    pub p_computed: f64,
    pub p_used: f64,
    pub selected_randomly: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub element: usize,
    pub deficit_before: i64,
    /// `None` when the element was already covered and nothing ran.
    pub mu: Option<f64>,
    pub per_set: Vec<SetStep>,
    /// Deficit left after the randomized phase (clamped at zero).
    pub deficit_after_random: usize,
    pub greedy_selected: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub total_cost: f64,
    pub trace: Vec<StepRecord>,
    pub final_state: OnlineState,
}

fn by_cost_then_id(a: &(usize, f64), b: &(usize, f64)) -> Ordering {
    a.1.total_cmp(&b.1).then(a.0.cmp(&b.0))
}

/// Cost of the `j`-th cheapest candidate (1-based) under `(cost, set_id)`.
pub fn stat(candidates: &[(usize, f64)], j: usize) -> Result<f64, EngineError> {
    if j == 0 || j > candidates.len() {
        return Err(EngineError::StatOutOfRange {
            j,
            available: candidates.len(),
        });
    }
    let mut sorted = candidates.to_vec();
    sorted.sort_by(by_cost_then_id);
    Ok(sorted[j - 1].1)
}

fn covered_count(system: &SetSystem, state: &OnlineState, element: usize) -> usize {
    system
        .covering_sets(element)
        .iter()
        .filter(|&&s| state.is_selected(s))
        .count()
}

fn check_variant(system: &SetSystem, variant: Variant) -> Result<(), EngineError> {
    if variant == Variant::UnweightedK {
        if let Some(set) = system.sets().iter().find(|s| s.cost != 1.0) {
            return Err(EngineError::VariantRequiresUnitCosts {
                set: set.id,
                cost: set.cost,
            });
        }
    }
    Ok(())
}

/// Handles one arriving element and returns what happened.
pub fn process_element(
    system: &SetSystem,
    state: &mut OnlineState,
    element: usize,
    variant: Variant,
) -> Result<StepRecord, EngineError> {
    if element >= system.universe_size() {
        return Err(EngineError::UnknownElement(element));
    }
    let covering = system.covering_sets(element);
    let k = system.k() as i64;
    let deficit_before = k - covered_count(system, state, element) as i64;
    if deficit_before <= 0 {
        return Ok(StepRecord {
            element,
            deficit_before,
            mu: None,
            per_set: Vec::new(),
            deficit_after_random: 0,
            greedy_selected: Vec::new(),
        });
    }
    let deficit = deficit_before as usize;

    let candidates: Vec<(usize, f64)> = covering
        .iter()
        .filter(|&&s| !state.is_selected(s))
        .map(|&s| (s, system.cost(s)))
        .collect();
    if candidates.len() < deficit {
        return Err(EngineError::CoverageUnreachable {
            element,
            deficit,
            available: candidates.len(),
        });
    }
    let mu = stat(&candidates, deficit)?;
    let inv_frequency = 1.0 / covering.len() as f64;

    let mut per_set = Vec::with_capacity(candidates.len());
    for &(set, cost) in &candidates {
        let accumulated = state.alpha_p[set];
        let (p_computed, p_used) = match variant {
            Variant::Universal => {
                let p = mu / cost * (accumulated + inv_frequency);
                state.alpha_p[set] = accumulated + p;
                (p, p.min(1.0))
            }
            Variant::UnweightedK => {
                let p = (accumulated + deficit as f64 * inv_frequency).min(1.0);
                state.alpha_p[set] = accumulated + p;
                (p, p)
            }
        };
        let selected_randomly = state.rng.next_f64() < p_used;
        if selected_randomly {
            state.select(set);
        }
        per_set.push(SetStep {
            set_id: set,
            p_computed,
            p_used,
            selected_randomly,
        });
    }

    let remaining = k - covered_count(system, state, element) as i64;
    let deficit_after_random = remaining.max(0) as usize;
    let mut greedy_selected = Vec::with_capacity(deficit_after_random);
    for _ in 0..deficit_after_random {
        let cheapest = covering
            .iter()
            .filter(|&&s| !state.is_selected(s))
            .map(|&s| (s, system.cost(s)))
            .min_by(by_cost_then_id)
            .ok_or(EngineError::CoverageUnreachable {
                element,
                deficit: deficit_after_random,
                available: greedy_selected.len(),
            })?;
        state.select(cheapest.0);
        greedy_selected.push(cheapest.0);
    }

    Ok(StepRecord {
        element,
        deficit_before,
        mu: Some(mu),
        per_set,
        deficit_after_random,
        greedy_selected,
    })
}

/// Total cost of a selection, summed in ascending id order.
pub fn selection_cost(system: &SetSystem, selected: &[usize]) -> f64 {
    let mut ids = selected.to_vec();
    ids.sort_unstable();
    ids.iter().map(|&s| system.cost(s)).sum()
}

/// Runs the whole sequence. Duplicated elements are rejected; use
/// [`OnlineRunner`] to feed elements one at a time without that check.
pub fn run(
    system: &SetSystem,
    seq: &Sequence,
    variant: Variant,
    seed: u64,
) -> Result<RunResult, EngineError> {
    instance::validate(system, seq).map_err(EngineError::Invalid)?;
    let mut runner = OnlineRunner::new(system, variant, seed)?;
    for &element in seq.elements() {
        runner.present(element)?;
    }
    Ok(runner.finish())
}

/// Incremental driver: owns the state of one run and accumulates its trace.
#[derive(Debug, Clone)]
pub struct OnlineRunner<'a> {
    system: &'a SetSystem,
    variant: Variant,
    state: OnlineState,
    trace: Vec<StepRecord>,
}

impl<'a> OnlineRunner<'a> {
    pub fn new(system: &'a SetSystem, variant: Variant, seed: u64) -> Result<Self, EngineError> {
        check_variant(system, variant)?;
        Ok(Self {
            system,
            variant,
            state: OnlineState::new(system.num_sets(), seed),
            trace: Vec::new(),
        })
    }

    pub fn present(&mut self, element: usize) -> Result<&StepRecord, EngineError> {
        if element < self.system.universe_size() {
            let covering = self.system.covering_sets(element).len();
            if covering < self.system.k() {
                return Err(EngineError::Invalid(vec![
                    Violation::InsufficientCoverage {
                        element,
                        covering,
                        k: self.system.k(),
                    },
                ]));
            }
        }
        let record = process_element(self.system, &mut self.state, element, self.variant)?;
        self.trace.push(record);
        Ok(self.trace.last().expect("just pushed"))
    }

    pub fn state(&self) -> &OnlineState {
        &self.state
    }

    pub fn system(&self) -> &SetSystem {
        self.system
    }

    pub fn trace(&self) -> &[StepRecord] {
        &self.trace
    }

    pub fn finish(self) -> RunResult {
        let total_cost = selection_cost(self.system, &self.state.selected_ids());
        RunResult {
            total_cost,
            trace: self.trace,
            final_state: self.state,
        }
    }
}

/// Writes one JSON object per step.
pub fn write_trace<W: Write>(trace: &[StepRecord], mut out: W) -> Result<(), EngineError> {
    for record in trace {
        serde_json::to_writer(&mut out, record).map_err(io::Error::from)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn trace_to_bytes(trace: &[StepRecord]) -> Vec<u8> {
    let mut out = Vec::new();
    write_trace(trace, &mut out).expect("writing to a Vec cannot fail");
    out
}

pub fn read_trace<R: BufRead>(input: R) -> Result<Vec<StepRecord>, EngineError> {
    let mut trace = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| EngineError::TraceFormat {
            line: idx + 1,
            message: e.to_string(),
        })?;
        trace.push(record);
    }
    Ok(trace)
}

/// Selected ids (ascending) and their total cost, rebuilt from a trace alone.
pub fn replay_selection(system: &SetSystem, trace: &[StepRecord]) -> (Vec<usize>, f64) {
    let mut selected = vec![false; system.num_sets()];
    for record in trace {
        for step in record.per_set.iter().filter(|s| s.selected_randomly) {
            selected[step.set_id] = true;
        }
        for &s in &record.greedy_selected {
            selected[s] = true;
        }
    }
    let ids: Vec<usize> = (0..selected.len()).filter(|&s| selected[s]).collect();
    let cost = selection_cost(system, &ids);
    (ids, cost)
}

/// Analysis quantities reconstructed from a trace against a fixed optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    /// Sum of `alpha_p[S]` over `S ∈ S_i − T*` when element `i` arrived.
    pub xi: Vec<f64>,
    /// `|T ∩ S_i − T*|` when element `i` arrived.
    pub alpha: Vec<usize>,
    /// `Λ(S) = log2(m * alpha_p[S] + 1)` for every set: row 0 is the initial
    /// state, row `t + 1` the state after step `t`.
    pub lambda: Vec<Vec<f64>>,
}

pub fn potential(m: usize, alpha_p: f64) -> f64 {
    (m as f64 * alpha_p + 1.0).log2()
}

pub fn diagnostics(
    result: &RunResult,
    system: &SetSystem,
    optimum: &[usize],
) -> Result<Diagnostics, EngineError> {
    let mut in_opt = vec![false; system.num_sets()];
    for &s in optimum {
        in_opt[s] = true;
    }
    for record in &result.trace {
        let covered = system
            .covering_sets(record.element)
            .iter()
            .filter(|&&s| in_opt[s])
            .count();
        if covered < system.k() {
            return Err(EngineError::InvalidOptimum {
                element: record.element,
                covered,
                k: system.k(),
            });
        }
    }
    let m = match stats(system) {
        Ok(s) => s.m,
        Err(_) => 0,
    };

    let mut alpha_p = vec![0.0; system.num_sets()];
    let mut selected = vec![false; system.num_sets()];
    let lambda_row = |alpha_p: &[f64]| alpha_p.iter().map(|&a| potential(m, a)).collect();
    let mut diag = Diagnostics {
        xi: Vec::with_capacity(result.trace.len()),
        alpha: Vec::with_capacity(result.trace.len()),
        lambda: vec![lambda_row(&alpha_p)],
    };
    for record in &result.trace {
        let outside_opt = system
            .covering_sets(record.element)
            .iter()
            .filter(|&&s| !in_opt[s]);
        let (xi, alpha) = outside_opt.fold((0.0, 0), |(xi, alpha), &s| {
            (xi + alpha_p[s], alpha + usize::from(selected[s]))
        });
        diag.xi.push(xi);
        diag.alpha.push(alpha);
        for step in &record.per_set {
            alpha_p[step.set_id] += step.p_computed;
            if step.selected_randomly {
                selected[step.set_id] = true;
            }
        }
        for &s in &record.greedy_selected {
            selected[s] = true;
        }
        diag.lambda.push(lambda_row(&alpha_p));
    }
    Ok(diag)
}
