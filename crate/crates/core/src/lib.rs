//! Online set multicover by randomized winnowing.
//!
//! The crate is organised around the life of an experiment:
//!
//! * [`instance`] builds, validates and serializes weighted set systems and
//!   the online order in which elements arrive.
//! * [`engine`] runs the online algorithm (and its unweighted multicover
//!   variant) one element at a time, recording a replayable trace.
//! * [`offline`] supplies the offline baselines: an exact branch-and-bound
//!   optimum, the classic greedy multicover and the `kappa` statistic.
//! * [`bounds`] evaluates the closed-form competitive-ratio bounds.
//! * [`prob`] is an exact Poisson-binomial oracle plus the numeric checks
//!   built on it (tail statements, the `C(psi, l, x)` table, the `F(z)` recursion).
//! * [`adversary`] constructs lifted hard instances and an adaptive stress
//!   adversary.
//! * [`harness`] runs seeded Monte-Carlo trials and parameter sweeps.

pub mod adversary;
pub mod bounds;
pub mod engine;
pub mod harness;
pub mod instance;
pub mod offline;
pub mod prob;
pub mod rng;

#[cfg(test)]
mod tests;

pub use engine::{run, OnlineState, RunResult, StepRecord, Variant};
pub use instance::{InstanceStats, Sequence, SetSystem, WeightedSet};
pub use offline::Cover;
pub use rng::SplitMix64;
