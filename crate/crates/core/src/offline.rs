//! Offline baselines for the multicover problem over the presented elements.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::instance::SetSystem;

/// Largest number of relevant sets the exact solver will search.
pub const EXACT_MAX_SETS: usize = 30;
/// Search-node budget of the exact solver.
pub const EXACT_NODE_BUDGET: u64 = 50_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum OfflineError {
    #[error("element {element} lies in {available} < {k} sets")]
    Infeasible {
        element: usize,
        available: usize,
        k: usize,
    },
    #[error("exact search budget exceeded ({0})")]
    BudgetExceeded(String),
    #[error("element {0} is outside the universe")]
    UnknownElement(usize),
    #[error("cover leaves element {element} covered {covered} < {k} times")]
    InvalidCover {
        element: usize,
        covered: usize,
        k: usize,
    },
    #[error("no presented elements")]
    NoPresentedElements,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cover {
    pub set_ids: BTreeSet<usize>,
    pub cost: f64,
}

impl Cover {
    pub fn from_ids(system: &SetSystem, ids: impl IntoIterator<Item = usize>) -> Self {
        let set_ids: BTreeSet<usize> = ids.into_iter().collect();
        let cost = set_ids.iter().map(|&s| system.cost(s)).sum();
        Self { set_ids, cost }
    }

    pub fn contains(&self, set: usize) -> bool {
        self.set_ids.contains(&set)
    }
}

fn distinct_presented(system: &SetSystem, presented: &[usize]) -> Result<Vec<usize>, OfflineError> {
    let mut out: Vec<usize> = presented.to_vec();
    out.sort_unstable();
    out.dedup();
    if let Some(&bad) = out.iter().find(|&&e| e >= system.universe_size()) {
        return Err(OfflineError::UnknownElement(bad));
    }
    Ok(out)
}

fn check_feasible(system: &SetSystem, elements: &[usize], k: usize) -> Result<(), OfflineError> {
    for &element in elements {
        let available = system.covering_sets(element).len();
        if available < k {
            return Err(OfflineError::Infeasible {
                element,
                available,
                k,
            });
        }
    }
    Ok(())
}

/// Checks that `set_ids` covers every presented element at least `k` times.
pub fn check_cover(
    system: &SetSystem,
    presented: &[usize],
    k: usize,
    set_ids: &BTreeSet<usize>,
) -> Result<(), OfflineError> {
    for element in distinct_presented(system, presented)? {
        let covered = system
            .covering_sets(element)
            .iter()
            .filter(|s| set_ids.contains(s))
            .count();
        if covered < k {
            return Err(OfflineError::InvalidCover {
                element,
                covered,
                k,
            });
        }
    }
    Ok(())
}

fn tie_tolerance(best: f64) -> f64 {
    1e-9 * best.abs().max(1.0)
}

struct Search {
    costs: Vec<f64>,
    /// Element indices contained in each relevant set.
    members: Vec<Vec<usize>>,
    /// Relevant-set indices covering each element, ascending.
    covering: Vec<Vec<usize>>,
    max_set_size: f64,
    residual: Vec<usize>,
    chosen: Vec<usize>,
    best: Option<(f64, Vec<usize>)>,
    nodes: u64,
    scratch: Vec<f64>,
}

impl Search {
    /// Admissible bound on the cost still to pay, or `None` when some
    /// element can no longer reach its demand with the undecided sets.
    fn lower_bound(&mut self, next: usize) -> Option<f64> {
        let mut total = 0.0;
        let mut largest: f64 = 0.0;
        for (e, &need) in self.residual.iter().enumerate() {
            if need == 0 {
                continue;
            }
            self.scratch.clear();
            self.scratch.extend(
                self.covering[e]
                    .iter()
                    .filter(|&&s| s >= next)
                    .map(|&s| self.costs[s]),
            );
            if self.scratch.len() < need {
                return None;
            }
            self.scratch.sort_by(f64::total_cmp);
            let cheapest: f64 = self.scratch[..need].iter().sum();
            total += cheapest;
            largest = largest.max(cheapest);
        }
        Some((total / self.max_set_size).max(largest))
    }

    fn dfs(&mut self, next: usize, cost: f64) -> Result<(), OfflineError> {
        self.nodes += 1;
        if self.nodes > EXACT_NODE_BUDGET {
            return Err(OfflineError::BudgetExceeded(format!(
                "more than {EXACT_NODE_BUDGET} nodes"
            )));
        }
        if self.residual.iter().all(|&r| r == 0) {
            let better = match &self.best {
                None => true,
                Some((best, _)) => cost < best - tie_tolerance(*best),
            };
            if better {
                self.best = Some((cost, self.chosen.clone()));
            }
            return Ok(());
        }
        if next == self.costs.len() {
            return Ok(());
        }
        let Some(bound) = self.lower_bound(next) else {
            return Ok(());
        };
        if let Some((best, _)) = &self.best {
            if cost + bound >= best - tie_tolerance(*best) {
                return Ok(());
            }
        }

        // Include first: the first optimum reached is then the
        // lexicographically smallest id list among optima.
        let touched: Vec<usize> = self.members[next]
            .iter()
            .copied()
            .filter(|&e| self.residual[e] > 0)
            .collect();
        if !touched.is_empty() {
            for &e in &touched {
                self.residual[e] -= 1;
            }
            self.chosen.push(next);
            let result = self.dfs(next + 1, cost + self.costs[next]);
            self.chosen.pop();
            for &e in &touched {
                self.residual[e] += 1;
            }
            result?;
        }
        self.dfs(next + 1, cost)
    }
}

/// Minimum-cost multicover of `presented` by branch and bound over set
/// inclusion in ascending id order. Ties go to the lexicographically
/// smallest id list.
pub fn exact_optimum(
    system: &SetSystem,
    presented: &[usize],
    k: usize,
) -> Result<Cover, OfflineError> {
    let elements = distinct_presented(system, presented)?;
    check_feasible(system, &elements, k)?;
    if elements.is_empty() {
        return Ok(Cover::from_ids(system, []));
    }

    let relevant: Vec<usize> = elements
        .iter()
        .flat_map(|&e| system.covering_sets(e).iter().copied())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if relevant.len() > EXACT_MAX_SETS {
        return Err(OfflineError::BudgetExceeded(format!(
            "{} relevant sets > {EXACT_MAX_SETS}",
            relevant.len()
        )));
    }
    let position = |set: usize| relevant.binary_search(&set).expect("relevant set");
    let element_index = |e: usize| elements.binary_search(&e).ok();

    let mut members = vec![Vec::new(); relevant.len()];
    let mut covering = vec![Vec::new(); elements.len()];
    for (ei, &e) in elements.iter().enumerate() {
        for &s in system.covering_sets(e) {
            let si = position(s);
            members[si].push(ei);
            covering[ei].push(si);
        }
    }
    let max_set_size = relevant
        .iter()
        .map(|&s| {
            system
                .set(s)
                .elements
                .iter()
                .filter(|&&e| element_index(e).is_some())
                .count()
        })
        .max()
        .unwrap_or(1)
        .max(1) as f64;

    let mut search = Search {
        costs: relevant.iter().map(|&s| system.cost(s)).collect(),
        members,
        covering,
        max_set_size,
        residual: vec![k; elements.len()],
        chosen: Vec::new(),
        best: None,
        nodes: 0,
        scratch: Vec::new(),
    };
    search.dfs(0, 0.0)?;
    let (_, chosen) = search
        .best
        .expect("feasibility was checked, so some cover exists");
    Ok(Cover::from_ids(
        system,
        chosen.into_iter().map(|i| relevant[i]),
    ))
}

/// Greedy multicover: repeatedly take the unselected set with the largest
/// number of still-deficient presented elements per unit cost (plain count
/// for unit costs), ties to the smaller id.
pub fn greedy_multicover(
    system: &SetSystem,
    presented: &[usize],
    k: usize,
) -> Result<Cover, OfflineError> {
    let elements = distinct_presented(system, presented)?;
    check_feasible(system, &elements, k)?;
    let mut residual = vec![0usize; system.universe_size()];
    for &e in &elements {
        residual[e] = k;
    }
    let mut remaining: usize = elements.len() * k;
    let mut selected = vec![false; system.num_sets()];
    let mut ids = Vec::new();
    while remaining > 0 {
        let mut best: Option<(usize, f64)> = None;
        for set in system.sets() {
            if selected[set.id] {
                continue;
            }
            let gain = set.elements.iter().filter(|&&e| residual[e] > 0).count();
            if gain == 0 {
                continue;
            }
            let score = gain as f64 / set.cost;
            if best.is_none_or(|(_, b)| score > b) {
                best = Some((set.id, score));
            }
        }
        let (id, _) = best.expect("feasible instances always have a useful set");
        selected[id] = true;
        ids.push(id);
        for &e in &system.set(id).elements {
            if residual[e] > 0 {
                residual[e] -= 1;
                remaining -= 1;
            }
        }
    }
    Ok(Cover::from_ids(system, ids))
}

/// `min over presented i and S ∈ S_i ∩ T*` of `c(S_i ∩ T*) / c_S`.
pub fn kappa(
    system: &SetSystem,
    optimum: &Cover,
    presented: &[usize],
) -> Result<f64, OfflineError> {
    let elements = distinct_presented(system, presented)?;
    if elements.is_empty() {
        return Err(OfflineError::NoPresentedElements);
    }
    let mut best = f64::INFINITY;
    for element in elements {
        let in_opt: Vec<f64> = system
            .covering_sets(element)
            .iter()
            .filter(|&&s| optimum.contains(s))
            .map(|&s| system.cost(s))
            .collect();
        if in_opt.is_empty() {
            return Err(OfflineError::InvalidCover {
                element,
                covered: 0,
                k: 1,
            });
        }
        let total: f64 = in_opt.iter().sum();
        let heaviest = in_opt.iter().copied().fold(f64::MIN, f64::max);
        best = best.min(total / heaviest);
    }
    Ok(best)
}
