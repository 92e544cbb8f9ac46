use super::oracles as common;

use std::io::BufReader;

use crate::adversary::{self, adaptive_stress};
use crate::engine::{self, OnlineRunner, Variant};
use crate::harness::{self, compare_to_bounds, Verdict};
use crate::instance::{self, CostModel, RandomSystemParams};
use crate::offline;

fn unit_instance(
    n: usize,
    num_sets: usize,
    density: f64,
    k: usize,
    seed: u64,
) -> (crate::SetSystem, crate::Sequence) {
    instance::random_system(
        RandomSystemParams {
            n,
            num_sets,
            density,
            cost_model: CostModel::Unit,
            k,
        },
        seed,
    )
    .unwrap()
}

#[test]
fn ratio_trend_against_log_d_over_k() {
    // Same sets throughout, so m and d stay fixed while k grows.
    let (base, seq) = unit_instance(24, 14, 0.55, 1, 41);
    let (m, d) = common::max_freq_and_size(&base);
    let min_freq = (0..base.universe_size())
        .map(|e| base.covering_sets(e).len())
        .min()
        .unwrap();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in 1..=min_freq.min(6) {
        let system = base.with_k(k).unwrap();
        let s = harness::empirical_ratio(&system, &seq, Variant::Universal, 400, 100 + k as u64)
            .unwrap();
        xs.push((d as f64 / k as f64).ln());
        ys.push(s.empirical_ratio);
    }
    assert!(xs.len() >= 3, "m = {m}, min frequency {min_freq}");
    let (slope, se) = harness::trend_slope(&xs, &ys).unwrap();
    assert!(
        slope + 2.0 * se >= 0.0,
        "slope {slope} +- {se}, ratios {ys:?}"
    );
}

#[test]
fn trace_file_round_trip_replays_the_run() {
    let (system, seq) = unit_instance(30, 12, 0.3, 2, 5);
    let result = engine::run(&system, &seq, Variant::UnweightedK, 77).unwrap();
    let dir = tempdir();
    let path = dir.join("trace.jsonl");
    engine::write_trace(&result.trace, std::fs::File::create(&path).unwrap()).unwrap();
    let back = engine::read_trace(BufReader::new(std::fs::File::open(&path).unwrap())).unwrap();
    assert_eq!(back, result.trace);
    let (ids, cost) = engine::replay_selection(&system, &back);
    assert_eq!(ids, result.final_state.selected_ids());
    assert_eq!(cost, result.total_cost);
    std::fs::remove_dir_all(dir).unwrap();
}

fn tempdir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("multicover-scenarios-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn diagnostics_track_state_against_optimum() {
    let (system, seq) = unit_instance(16, 10, 0.35, 1, 9);
    let result = engine::run(&system, &seq, Variant::Universal, 3).unwrap();
    let opt = offline::exact_optimum(&system, seq.elements(), 1).unwrap();
    let ids: Vec<usize> = opt.set_ids.iter().copied().collect();
    let diag = engine::diagnostics(&result, &system, &ids).unwrap();
    assert_eq!(diag.xi.len(), seq.len());
    assert_eq!(diag.lambda.len(), seq.len() + 1);
    assert!(diag.lambda[0].iter().all(|&l| l == 0.0));
    let (m, _) = common::max_freq_and_size(&system);
    for (last, &a) in diag
        .lambda
        .last()
        .unwrap()
        .iter()
        .zip(result.final_state.alpha_p())
    {
        assert!((last - (m as f64 * a + 1.0).log2()).abs() < 1e-12);
    }
    for pair in diag.lambda.windows(2) {
        assert!(pair[0].iter().zip(&pair[1]).all(|(a, b)| a <= b));
    }
    assert!(engine::diagnostics(&result, &system, &[]).is_err());
}

#[test]
fn stress_on_lifted_instance_stays_within_coverage() {
    let base = adversary::binary_split(3, 2).unwrap();
    let lifted = adversary::lift_osc_k(&base, 2).unwrap();
    let mut runner = OnlineRunner::new(&lifted.system, Variant::Universal, 12).unwrap();
    let seq = adaptive_stress(&lifted.system, 2, &mut runner, 1000).unwrap();
    assert!(!seq.is_empty());
    assert_eq!(seq.elements()[0], 0);
    let selected = runner.state().selected_ids();
    assert!(common::covers(&lifted.system, &selected, seq.elements(), 2));
    let distinct = seq.distinct();
    assert_eq!(distinct.len(), seq.len());
}

#[test]
fn unit_runs_respect_theorem_bounds() {
    for seed in 0..6 {
        let k = 1 + seed as usize % 3;
        let (system, seq) = unit_instance(20, 16, 0.35, k, 200 + seed);
        for variant in [Variant::Universal, Variant::UnweightedK] {
            let s = harness::empirical_ratio(&system, &seq, variant, 200, seed).unwrap();
            let opt = offline::exact_optimum(&system, seq.elements(), k).unwrap();
            let b = harness::applicable_bounds(&system, &seq, variant, &opt, true).unwrap();
            assert_eq!(b.kappa, k as f64);
            assert_eq!(b.theorem10.is_some(), variant == Variant::UnweightedK);
            assert_eq!(b.theorem7.is_some(), k == 1);
            assert_eq!(
                compare_to_bounds(&s, &b.values()),
                Verdict::Pass,
                "{s:?} {b:?}"
            );
        }
    }
}

#[test]
fn weighted_kappa_uses_exact_optimum() {
    let (system, seq) = instance::random_system(
        RandomSystemParams {
            n: 12,
            num_sets: 10,
            density: 0.4,
            cost_model: CostModel::Uniform { lo: 1.0, hi: 8.0 },
            k: 2,
        },
        17,
    )
    .unwrap();
    let opt = offline::exact_optimum(&system, seq.elements(), 2).unwrap();
    let b = harness::applicable_bounds(&system, &seq, Variant::Universal, &opt, true).unwrap();
    let measured = offline::kappa(&system, &opt, seq.elements()).unwrap();
    assert_eq!(b.kappa, measured.max(1.0));
    assert!(b.theorem7.is_none() && b.theorem10.is_none());
    let fallback =
        harness::applicable_bounds(&system, &seq, Variant::Universal, &opt, false).unwrap();
    assert_eq!(fallback.kappa, 1.0);
}
