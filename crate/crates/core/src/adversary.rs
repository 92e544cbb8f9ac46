//! Hard instances for the online problem.
//!
//! A [`BaseInstance`] is a single-coverage instance together with the order
//! in which its elements are presented. The lifts wrap it with a forced
//! element `x` and `k` extra sets so that every base element must be covered
//! `k` times. [`binary_split`] supplies a simple base family: elements are the
//! nodes of a complete binary tree and sets are root-to-leaf paths, so each
//! presented node halves the sets that can still be useful.

use serde::Serialize;
use thiserror::Error;

use crate::engine::{EngineError, OnlineRunner};
use crate::instance::{self, InstanceError, Sequence, SetSystem, Violation, WeightedSet};

#[derive(Debug, Error, PartialEq)]
pub enum AdversaryError {
    #[error("base instance must have coverage factor 1, found {0}")]
    BaseCoverage(usize),
    #[error("invalid base instance: {}", join(.0))]
    InvalidBase(Vec<Violation>),
    #[error("coverage factor must be at least 1")]
    ZeroCoverage,
    #[error("epsilon = {0} must be positive and finite")]
    BadEpsilon(f64),
    #[error("leaf {leaf} out of range for depth {depth}")]
    LeafOutOfRange { depth: u32, leaf: usize },
    #[error("depth {0} is too large")]
    DepthTooLarge(u32),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

fn join(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Single-coverage instance and its presentation order.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseInstance {
    system: SetSystem,
    seq: Sequence,
}

impl BaseInstance {
    pub fn new(system: SetSystem, seq: Sequence) -> Result<Self, AdversaryError> {
        if system.k() != 1 {
            return Err(AdversaryError::BaseCoverage(system.k()));
        }
        instance::validate(&system, &seq).map_err(AdversaryError::InvalidBase)?;
        Ok(Self { system, seq })
    }

    pub fn system(&self) -> &SetSystem {
        &self.system
    }

    pub fn sequence(&self) -> &Sequence {
        &self.seq
    }

    /// `m'`, the number of base sets.
    pub fn num_sets(&self) -> usize {
        self.system.num_sets()
    }

    /// `n'`, the size of the base universe.
    pub fn num_elements(&self) -> usize {
        self.system.universe_size()
    }
}

/// Complete binary tree of the given depth in heap order: node `v` has
/// children `2v + 1` and `2v + 2`. Set `s` is the path from the root to leaf
/// `2^depth - 1 + s`, and the sequence walks the path to `leaf`.
pub fn binary_split(depth: u32, leaf: usize) -> Result<BaseInstance, AdversaryError> {
    if depth > 20 {
        return Err(AdversaryError::DepthTooLarge(depth));
    }
    let leaves = 1usize << depth;
    if leaf >= leaves {
        return Err(AdversaryError::LeafOutOfRange { depth, leaf });
    }
    let nodes = 2 * leaves - 1;
    let path = |leaf_index: usize| {
        let mut v = leaves - 1 + leaf_index;
        let mut path = vec![v];
        while v > 0 {
            v = (v - 1) / 2;
            path.push(v);
        }
        path.reverse();
        path
    };
    let sets = (0..leaves)
        .map(|s| WeightedSet {
            id: s,
            cost: 1.0,
            elements: path(s),
        })
        .collect();
    let system = SetSystem::new(nodes, 1, sets)?;
    BaseInstance::new(system, Sequence::new(path(leaf)))
}

/// Output of a lift with the bookkeeping needed to check it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiftedInstance {
    #[serde(skip)]
    pub system: SetSystem,
    pub seq: Sequence,
    pub extra_set_ids: Vec<usize>,
    /// The forced element, contained in exactly the extra sets.
    pub x: usize,
    /// Elements used only to make the extra sets distinct; never presented.
    pub padding: Vec<usize>,
    pub copies: usize,
    /// Optimum cost `1 + eps` as stated for the weighted lift, assuming the
    /// base is covered by one set.
    pub stated_optimum: Option<f64>,
    /// `1 + k eps`: the cost once all `k` extra sets forced by `x` are paid.
    pub forced_optimum: Option<f64>,
}

/// `ceil(log2(k + 1))`, the number of padding elements.
pub fn padding_count(k: usize) -> usize {
    (usize::BITS - k.leading_zeros()) as usize
}

/// Unweighted lift: `k` renamed copies of the base, each base element also
/// joined to `k - 1` of the `k` unit-cost extra sets.
pub fn lift_osc_k(base: &BaseInstance, k: usize) -> Result<LiftedInstance, AdversaryError> {
    lift(base, k, k, 1.0, None)
}

/// Weighted lift: one copy of the base with unit-cost base sets and `k`
/// extra sets of cost `epsilon`.
pub fn lift_wosc_k(
    base: &BaseInstance,
    k: usize,
    epsilon: f64,
) -> Result<LiftedInstance, AdversaryError> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(AdversaryError::BadEpsilon(epsilon));
    }
    lift(base, k, 1, epsilon, Some(epsilon))
}

fn lift(
    base: &BaseInstance,
    k: usize,
    copies: usize,
    extra_cost: f64,
    epsilon: Option<f64>,
) -> Result<LiftedInstance, AdversaryError> {
    if k == 0 {
        return Err(AdversaryError::ZeroCoverage);
    }
    let n_base = base.num_elements();
    let m_base = base.num_sets();
    let pad = padding_count(k);
    let x = 0;
    let element = |copy: usize, e: usize| 1 + copy * n_base + e;
    let padding: Vec<usize> = (0..pad).map(|b| 1 + copies * n_base + b).collect();
    let universe = 1 + copies * n_base + pad;

    let mut extra: Vec<Vec<usize>> = (0..k)
        .map(|j| {
            let mut elements = vec![x];
            elements.extend((0..pad).filter(|b| j >> b & 1 == 1).map(|b| padding[b]));
            elements
        })
        .collect();
    for copy in 0..copies {
        for (j, members) in extra.iter_mut().enumerate() {
            if j != copy {
                members.extend((0..n_base).map(|e| element(copy, e)));
            }
        }
    }

    let mut sets: Vec<WeightedSet> = extra
        .into_iter()
        .enumerate()
        .map(|(id, mut elements)| {
            elements.sort_unstable();
            WeightedSet {
                id,
                cost: extra_cost,
                elements,
            }
        })
        .collect();
    for copy in 0..copies {
        for set in base.system().sets() {
            sets.push(WeightedSet {
                id: k + copy * m_base + set.id,
                cost: 1.0,
                elements: set.elements.iter().map(|&e| element(copy, e)).collect(),
            });
        }
    }
    let system = SetSystem::new(universe, k, sets)?;

    let mut seq = vec![x];
    for copy in 0..copies {
        seq.extend(base.sequence().elements().iter().map(|&e| element(copy, e)));
    }

    Ok(LiftedInstance {
        system,
        seq: Sequence::new(seq),
        extra_set_ids: (0..k).collect(),
        x,
        padding,
        copies,
        stated_optimum: epsilon.map(|eps| 1.0 + eps),
        forced_optimum: epsilon.map(|eps| 1.0 + k as f64 * eps),
    })
}

/// An online algorithm the stress adversary can watch.
pub trait Probe {
    fn is_selected(&self, set: usize) -> bool;
    fn present(&mut self, element: usize) -> Result<(), EngineError>;
}

impl Probe for OnlineRunner<'_> {
    fn is_selected(&self, set: usize) -> bool {
        self.state().is_selected(set)
    }

    fn present(&mut self, element: usize) -> Result<(), EngineError> {
        OnlineRunner::present(self, element).map(|_| ())
    }
}

/// Repeatedly presents the element with at least `k` covering sets whose
/// covering sets hold the fewest selected sets (smallest id on ties). Stops
/// once every such element is already covered `k` times or after `rounds`.
pub fn adaptive_stress<P: Probe>(
    system: &SetSystem,
    k: usize,
    probe: &mut P,
    rounds: usize,
) -> Result<Sequence, EngineError> {
    let mut emitted = Vec::new();
    for _ in 0..rounds {
        let pick = (0..system.universe_size())
            .filter(|&e| system.covering_sets(e).len() >= k)
            .map(|e| {
                let covered = system
                    .covering_sets(e)
                    .iter()
                    .filter(|&&s| probe.is_selected(s))
                    .count();
                (covered, e)
            })
            .min();
        match pick {
            Some((covered, e)) if covered < k => {
                probe.present(e)?;
                emitted.push(e);
            }
            _ => break,
        }
    }
    Ok(Sequence::new(emitted))
}
