//! Weighted set systems and online element sequences.
//!
//! A [`SetSystem`] is validated once at construction and is immutable
//! afterwards, so it can be shared freely between concurrent runs. The
//! element-to-sets index used by the engine is built at the same time.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::SplitMix64;

/// Attempts per element before `random_system` gives up.
pub const MAX_REGENERATION_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedSet {
    pub id: usize,
    pub cost: f64,
    pub elements: Vec<usize>,
}

/// One broken invariant of an instance. `Display` names the offending
/// element or set.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    UniverseEmpty,
    CoverageFactorZero,
    DuplicateSetId(usize),
    SetIdsNotDense {
        expected: usize,
        found: usize,
    },
    NonPositiveCost {
        set: usize,
        cost: f64,
    },
    ElementOutOfRange {
        set: usize,
        element: usize,
    },
    ElementsNotSorted {
        set: usize,
    },
    SequenceElementOutOfRange {
        position: usize,
        element: usize,
    },
    DuplicateSequenceElement {
        position: usize,
        element: usize,
    },
    InsufficientCoverage {
        element: usize,
        covering: usize,
        k: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UniverseEmpty => write!(f, "universe_size must be positive"),
            Self::CoverageFactorZero => write!(f, "coverage factor k must be positive"),
            Self::DuplicateSetId(id) => write!(f, "set id {id} appears more than once"),
            Self::SetIdsNotDense { expected, found } => {
                write!(
                    f,
                    "set ids must be dense: expected id {expected}, found {found}"
                )
            }
            Self::NonPositiveCost { set, cost } => {
                write!(f, "set {set} has non-positive cost {cost}")
            }
            Self::ElementOutOfRange { set, element } => {
                write!(
                    f,
                    "set {set} contains element {element} outside the universe"
                )
            }
            Self::ElementsNotSorted { set } => {
                write!(f, "elements of set {set} are not strictly ascending")
            }
            Self::SequenceElementOutOfRange { position, element } => {
                write!(
                    f,
                    "sequence position {position}: element {element} outside the universe"
                )
            }
            Self::DuplicateSequenceElement { position, element } => {
                write!(
                    f,
                    "sequence position {position}: element {element} presented twice"
                )
            }
            Self::InsufficientCoverage {
                element,
                covering,
                k,
            } => {
                write!(f, "element {element} in {covering} < {k} sets")
            }
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum InstanceError {
    #[error("invalid instance: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("set family is empty")]
    EmptyFamily,
    #[error("invalid generator parameter: {0}")]
    BadParameter(String),
    #[error("coverage k = {k} infeasible for element {element} after {attempts} attempts")]
    CoverageInfeasible {
        k: usize,
        element: usize,
        attempts: usize,
    },
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, PartialEq)]
pub struct SetSystem {
    universe_size: usize,
    k: usize,
    sets: Vec<WeightedSet>,
    covering: Vec<Vec<usize>>,
}

impl SetSystem {
    /// Builds a system from sets in any order; ids must be a permutation of
    /// `0..sets.len()`. All violations are collected before failing.
    pub fn new(
        universe_size: usize,
        k: usize,
        mut sets: Vec<WeightedSet>,
    ) -> Result<Self, InstanceError> {
        let mut violations = Vec::new();
        if universe_size == 0 {
            violations.push(Violation::UniverseEmpty);
        }
        if k == 0 {
            violations.push(Violation::CoverageFactorZero);
        }
        sets.sort_by_key(|s| s.id);
        for (expected, pair) in sets.iter().enumerate() {
            if expected > 0 && sets[expected - 1].id == pair.id {
                violations.push(Violation::DuplicateSetId(pair.id));
            } else if pair.id != expected
                && !violations
                    .iter()
                    .any(|v| matches!(v, Violation::SetIdsNotDense { .. }))
            {
                violations.push(Violation::SetIdsNotDense {
                    expected,
                    found: pair.id,
                });
            }
        }
        for set in &sets {
            if !(set.cost > 0.0 && set.cost.is_finite()) {
                violations.push(Violation::NonPositiveCost {
                    set: set.id,
                    cost: set.cost,
                });
            }
            if set.elements.windows(2).any(|w| w[0] >= w[1]) {
                violations.push(Violation::ElementsNotSorted { set: set.id });
            }
            if let Some(&element) = set.elements.iter().find(|&&e| e >= universe_size) {
                violations.push(Violation::ElementOutOfRange {
                    set: set.id,
                    element,
                });
            }
        }
        if !violations.is_empty() {
            return Err(InstanceError::Invalid(violations));
        }

        let mut covering = vec![Vec::new(); universe_size];
        for set in &sets {
            for &e in &set.elements {
                covering[e].push(set.id);
            }
        }
        Ok(Self {
            universe_size,
            k,
            sets,
            covering,
        })
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_sets(&self) -> usize {
        self.sets.len()
    }

    pub fn sets(&self) -> &[WeightedSet] {
        &self.sets
    }

    pub fn set(&self, id: usize) -> &WeightedSet {
        &self.sets[id]
    }

    pub fn cost(&self, id: usize) -> f64 {
        self.sets[id].cost
    }

    /// Ids of the sets containing `element`, ascending.
    pub fn covering_sets(&self, element: usize) -> &[usize] {
        &self.covering[element]
    }

    pub fn is_unit_cost(&self) -> bool {
        self.sets.iter().all(|s| s.cost == 1.0)
    }

    /// Same family with a different coverage factor.
    pub fn with_k(&self, k: usize) -> Result<Self, InstanceError> {
        Self::new(self.universe_size, k, self.sets.clone())
    }
}

/// Online presentation order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Sequence(pub Vec<usize>);

impl Sequence {
    pub fn new(elements: Vec<usize>) -> Self {
        Self(elements)
    }

    pub fn elements(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Distinct elements, ascending.
    pub fn distinct(&self) -> Vec<usize> {
        self.0
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ValidateOptions {
    /// Accept repeated sequence elements (they are no-ops for the engine).
    pub allow_duplicates: bool,
}

/// Checks the sequence against the system. Type invariants of the system are
/// enforced by [`SetSystem::new`], so only sequence-level problems remain.
pub fn validate(system: &SetSystem, seq: &Sequence) -> Result<(), Vec<Violation>> {
    validate_with(system, seq, ValidateOptions::default())
}

pub fn validate_with(
    system: &SetSystem,
    seq: &Sequence,
    options: ValidateOptions,
) -> Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    let mut seen = vec![false; system.universe_size()];
    for (position, &element) in seq.elements().iter().enumerate() {
        if element >= system.universe_size() {
            violations.push(Violation::SequenceElementOutOfRange { position, element });
            continue;
        }
        if seen[element] {
            if !options.allow_duplicates {
                violations.push(Violation::DuplicateSequenceElement { position, element });
            }
            continue;
        }
        seen[element] = true;
        let covering = system.covering_sets(element).len();
        if covering < system.k() {
            violations.push(Violation::InsufficientCoverage {
                element,
                covering,
                k: system.k(),
            });
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct InstanceStats {
    /// Maximum frequency of an element.
    pub m: usize,
    /// Maximum set size.
    pub d: usize,
}

pub fn stats(system: &SetSystem) -> Result<InstanceStats, InstanceError> {
    if system.num_sets() == 0 {
        return Err(InstanceError::EmptyFamily);
    }
    let m = system.covering.iter().map(Vec::len).max().unwrap_or(0);
    let d = system
        .sets
        .iter()
        .map(|s| s.elements.len())
        .max()
        .unwrap_or(0);
    Ok(InstanceStats { m, d })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostModel {
    Unit,
    Uniform { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomSystemParams {
    pub n: usize,
    pub num_sets: usize,
    pub density: f64,
    pub cost_model: CostModel,
    pub k: usize,
}

/// Random instance in which every element lies in at least `k` sets.
///
/// Membership of each element is drawn independently per set with
/// probability `density`; an element whose column falls short of `k` sets is
/// redrawn, up to [`MAX_REGENERATION_ATTEMPTS`] times. The sequence is a
/// uniformly random permutation of the universe.
pub fn random_system(
    params: RandomSystemParams,
    seed: u64,
) -> Result<(SetSystem, Sequence), InstanceError> {
    let RandomSystemParams {
        n,
        num_sets,
        density,
        cost_model,
        k,
    } = params;
    if n == 0 || num_sets == 0 || k == 0 {
        return Err(InstanceError::BadParameter(
            "n, num_sets and k must be positive".into(),
        ));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(InstanceError::BadParameter(format!(
            "density {density} outside (0, 1]"
        )));
    }
    if let CostModel::Uniform { lo, hi } = cost_model {
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return Err(InstanceError::BadParameter(format!(
                "uniform cost range [{lo}, {hi}) must be positive and ordered"
            )));
        }
    }
    if k > num_sets {
        return Err(InstanceError::CoverageInfeasible {
            k,
            element: 0,
            attempts: 0,
        });
    }

    let mut rng = SplitMix64::new(seed);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); num_sets];
    let mut column = Vec::with_capacity(num_sets);
    for element in 0..n {
        let mut attempts = 0;
        loop {
            attempts += 1;
            column.clear();
            column.extend((0..num_sets).filter(|_| rng.next_f64() < density));
            if column.len() >= k {
                break;
            }
            if attempts == MAX_REGENERATION_ATTEMPTS {
                return Err(InstanceError::CoverageInfeasible {
                    k,
                    element,
                    attempts,
                });
            }
        }
        for &s in &column {
            members[s].push(element);
        }
    }
    let sets = members
        .into_iter()
        .enumerate()
        .map(|(id, elements)| {
            let cost = match cost_model {
                CostModel::Unit => 1.0,
                CostModel::Uniform { lo, hi } => rng.next_range_f64(lo, hi),
            };
            WeightedSet { id, cost, elements }
        })
        .collect();
    let system = SetSystem::new(n, k, sets)?;
    let mut order: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut order);
    Ok((system, Sequence(order)))
}

#[derive(Debug, Serialize, Deserialize)]
struct InstanceDocument {
    universe_size: usize,
    k: usize,
    sets: Vec<WeightedSet>,
    sequence: Vec<usize>,
}

/// Parses the JSON instance document. Parse errors carry line and column;
/// invariant violations come back as [`InstanceError::Invalid`].
pub fn read_instance(bytes: &[u8]) -> Result<(SetSystem, Sequence), InstanceError> {
    let doc: InstanceDocument =
        serde_json::from_slice(bytes).map_err(|e| InstanceError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
    let system = SetSystem::new(doc.universe_size, doc.k, doc.sets)?;
    Ok((system, Sequence(doc.sequence)))
}

pub fn write_instance(system: &SetSystem, seq: &Sequence) -> Vec<u8> {
    let doc = InstanceDocument {
        universe_size: system.universe_size,
        k: system.k,
        sets: system.sets.clone(),
        sequence: seq.0.clone(),
    };
    let mut out = serde_json::to_vec_pretty(&doc).expect("instance documents always serialize");
    out.push(b'\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ws(id: usize, cost: f64, elements: &[usize]) -> WeightedSet {
        WeightedSet {
            id,
            cost,
            elements: elements.to_vec(),
        }
    }

    fn ab(k: usize) -> SetSystem {
        SetSystem::new(2, k, vec![ws(0, 1.0, &[0, 1]), ws(1, 1.0, &[1])]).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(validate(&ab(1), &Sequence(vec![0, 1])).is_ok());
        let err = validate(&ab(2), &Sequence(vec![0])).unwrap_err();
        assert_eq!(err.len(), 1);
        assert_eq!(err[0].to_string(), "element 0 in 1 < 2 sets");
        assert!(validate(&ab(3), &Sequence::default()).is_ok());
    }

    #[test]
    fn duplicates_need_the_permissive_flag() {
        let seq = Sequence(vec![1, 0, 1]);
        let err = validate(&ab(1), &seq).unwrap_err();
        assert_eq!(
            err,
            vec![Violation::DuplicateSequenceElement {
                position: 2,
                element: 1
            }]
        );
        let opts = ValidateOptions {
            allow_duplicates: true,
        };
        assert!(validate_with(&ab(1), &seq, opts).is_ok());
    }

    #[test]
    fn out_of_range_sequence_element() {
        let err = validate(&ab(1), &Sequence(vec![5])).unwrap_err();
        assert!(matches!(
            err[0],
            Violation::SequenceElementOutOfRange { element: 5, .. }
        ));
    }

    #[test]
    fn stats_examples() {
        assert_eq!(stats(&ab(1)).unwrap(), InstanceStats { m: 2, d: 2 });
        let single = SetSystem::new(1, 1, vec![ws(0, 1.0, &[0])]).unwrap();
        assert_eq!(stats(&single).unwrap(), InstanceStats { m: 1, d: 1 });
        let three = SetSystem::new(
            3,
            1,
            vec![ws(0, 1.0, &[0, 1, 2]), ws(1, 1.0, &[2]), ws(2, 1.0, &[2])],
        )
        .unwrap();
        assert_eq!(stats(&three).unwrap(), InstanceStats { m: 3, d: 3 });
        let empty = SetSystem::new(3, 1, vec![]).unwrap();
        assert!(matches!(stats(&empty), Err(InstanceError::EmptyFamily)));
    }

    #[test]
    fn constructor_rejects_broken_families() {
        let err = SetSystem::new(
            2,
            1,
            vec![ws(0, -1.0, &[0]), ws(2, 1.0, &[1, 0]), ws(2, 1.0, &[7])],
        )
        .unwrap_err();
        let InstanceError::Invalid(v) = err else {
            panic!("expected violations");
        };
        assert!(v.contains(&Violation::NonPositiveCost { set: 0, cost: -1.0 }));
        assert!(v.contains(&Violation::DuplicateSetId(2)));
        assert!(v.contains(&Violation::SetIdsNotDense {
            expected: 1,
            found: 2
        }));
        assert!(v.contains(&Violation::ElementsNotSorted { set: 2 }));
        assert!(v.contains(&Violation::ElementOutOfRange { set: 2, element: 7 }));
    }

    #[test]
    fn random_system_full_density() {
        let params = RandomSystemParams {
            n: 2,
            num_sets: 3,
            density: 1.0,
            cost_model: CostModel::Unit,
            k: 3,
        };
        let (system, seq) = random_system(params, 9).unwrap();
        assert_eq!(stats(&system).unwrap().m, 3);
        for e in 0..2 {
            assert_eq!(system.covering_sets(e), &[0, 1, 2]);
        }
        assert_eq!(seq.distinct(), vec![0, 1]);
    }

    #[test]
    fn random_system_is_deterministic_and_rejects_infeasible_k() {
        let params = RandomSystemParams {
            n: 20,
            num_sets: 8,
            density: 0.3,
            cost_model: CostModel::Uniform { lo: 0.5, hi: 4.0 },
            k: 2,
        };
        assert_eq!(
            random_system(params, 5).unwrap(),
            random_system(params, 5).unwrap()
        );
        assert_ne!(
            random_system(params, 5).unwrap().0,
            random_system(params, 6).unwrap().0
        );
        let infeasible = RandomSystemParams {
            k: 5,
            num_sets: 3,
            ..params
        };
        assert!(matches!(
            random_system(infeasible, 1),
            Err(InstanceError::CoverageInfeasible { .. })
        ));
    }

    #[test]
    fn random_system_gives_up_on_hopeless_density() {
        let params = RandomSystemParams {
            n: 5,
            num_sets: 40,
            density: 1e-6,
            cost_model: CostModel::Unit,
            k: 3,
        };
        assert!(matches!(
            random_system(params, 1),
            Err(InstanceError::CoverageInfeasible { attempts: 100, .. })
        ));
    }

    #[test]
    fn read_minimal_document() {
        let doc = br#"{"universe_size": 1, "k": 1,
            "sets": [{"id": 0, "cost": 2.5, "elements": [0]}],
            "sequence": [0]}"#;
        let (system, seq) = read_instance(doc).unwrap();
        assert_eq!(system.num_sets(), 1);
        assert_eq!(system.cost(0), 2.5);
        assert_eq!(seq.elements(), &[0]);
    }

    #[test]
    fn read_rejects_negative_cost_and_reports_parse_location() {
        let doc = br#"{"universe_size": 1, "k": 1,
            "sets": [{"id": 0, "cost": -1, "elements": [0]}], "sequence": []}"#;
        assert!(matches!(read_instance(doc), Err(InstanceError::Invalid(_))));

        let broken = b"{\n  \"universe_size\": 1,\n  \"k\": oops\n}";
        match read_instance(broken) {
            Err(InstanceError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
