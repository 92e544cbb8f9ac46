//! Monte-Carlo experiments: repeated seeded runs, comparison against the
//! closed-form bounds and grid sweeps written as CSV.

use std::fmt;
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds;
use crate::engine::{self, EngineError, Variant};
use crate::instance::{self, CostModel, InstanceError, RandomSystemParams, Sequence, SetSystem};
use crate::offline::{self, Cover, OfflineError};
use crate::rng::derive_seed;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("trial count must be positive")]
    NoTrials,
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Offline(#[from] OfflineError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("sweep config: {0}")]
    Config(#[from] serde_json::Error),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// Aggregate of `trials` independent runs. `std_err` is the standard error
/// of `mean_cost`, in cost units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialSummary {
    pub trials: usize,
    pub mean_cost: f64,
    pub opt_cost: f64,
    pub empirical_ratio: f64,
    pub std_err: f64,
    pub seed: u64,
}

impl TrialSummary {
    /// Standard error of `empirical_ratio`.
    pub fn ratio_std_err(&self) -> f64 {
        self.std_err / self.opt_cost
    }

    fn from_costs(costs: &[f64], opt_cost: f64, seed: u64) -> Self {
        let n = costs.len() as f64;
        let mean = costs.iter().sum::<f64>() / n;
        let std_err = if costs.len() > 1 {
            let var = costs.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        Self {
            trials: costs.len(),
            mean_cost: mean,
            opt_cost,
            empirical_ratio: mean / opt_cost,
            std_err,
            seed,
        }
    }
}

/// Costs of `trials` runs; trial `i` is seeded with `derive_seed(master_seed, i)`.
/// Trials run in parallel and are returned in index order.
pub fn trial_costs(
    system: &SetSystem,
    seq: &Sequence,
    variant: Variant,
    trials: usize,
    master_seed: u64,
) -> Result<Vec<f64>, HarnessError> {
    if trials == 0 {
        return Err(HarnessError::NoTrials);
    }
    instance::validate(system, seq).map_err(EngineError::Invalid)?;
    (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut runner =
                engine::OnlineRunner::new(system, variant, derive_seed(master_seed, i))?;
            for &e in seq.elements() {
                runner.present(e)?;
            }
            Ok(runner.finish().total_cost)
        })
        .collect()
}

/// Mean cost over `trials` seeded runs divided by the exact offline optimum
/// of the presented elements.
pub fn empirical_ratio(
    system: &SetSystem,
    seq: &Sequence,
    variant: Variant,
    trials: usize,
    master_seed: u64,
) -> Result<TrialSummary, HarnessError> {
    let costs = trial_costs(system, seq, variant, trials, master_seed)?;
    let opt = offline::exact_optimum(system, seq.elements(), system.k())?;
    Ok(TrialSummary::from_costs(&costs, opt.cost, master_seed))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

/// `PASS` iff `empirical_ratio - 3 * ratio_std_err <= b` for every bound `b`.
pub fn compare_to_bounds(summary: &TrialSummary, bounds: &[f64]) -> Verdict {
    let low = summary.empirical_ratio - 3.0 * summary.ratio_std_err();
    if bounds.iter().all(|&b| low <= b) {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// Sweep grid. Every combination of the listed values is one row, generated
/// in the order the fields are declared here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub n: Vec<usize>,
    pub num_sets: Vec<usize>,
    pub density: Vec<f64>,
    pub k: Vec<usize>,
    #[serde(default = "default_cost_models")]
    pub cost_model: Vec<CostModel>,
    pub variant: Vec<Variant>,
    pub trials: Vec<usize>,
    pub seed: Vec<u64>,
}

fn default_cost_models() -> Vec<CostModel> {
    vec![CostModel::Unit]
}

impl SweepConfig {
    pub fn from_json(input: impl Read) -> Result<Self, HarnessError> {
        Ok(serde_json::from_reader(input)?)
    }

    fn points(&self) -> Vec<GridPoint> {
        let mut out = Vec::new();
        for &n in &self.n {
            for &num_sets in &self.num_sets {
                for &density in &self.density {
                    for &k in &self.k {
                        for &cost_model in &self.cost_model {
                            for &variant in &self.variant {
                                for &trials in &self.trials {
                                    for &seed in &self.seed {
                                        out.push(GridPoint {
                                            params: RandomSystemParams {
                                                n,
                                                num_sets,
                                                density,
                                                cost_model,
                                                k,
                                            },
                                            variant,
                                            trials,
                                            seed,
                                        });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
struct GridPoint {
    params: RandomSystemParams,
    variant: Variant,
    trials: usize,
    seed: u64,
}

/// One sweep result. `std_err` is on the ratio scale. Bound columns are
/// empty where the bound does not apply; `opt_kind` is `exact` or `greedy`
/// (the latter when the exact solver's limits are exceeded).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub num_sets: usize,
    pub density: f64,
    pub cost_model: String,
    pub trials: usize,
    pub seed: u64,
    pub m: Option<usize>,
    pub d: Option<usize>,
    pub k: usize,
    pub variant: Variant,
    pub kappa: Option<f64>,
    pub opt_kind: Option<&'static str>,
    pub opt_cost: Option<f64>,
    pub empirical_ratio: Option<f64>,
    pub std_err: Option<f64>,
    pub theorem1: Option<f64>,
    pub theorem7: Option<f64>,
    pub theorem10: Option<f64>,
    pub verdict: Option<Verdict>,
    pub error: Option<String>,
}

fn cost_model_label(model: CostModel) -> String {
    match model {
        CostModel::Unit => "unit".into(),
        CostModel::Uniform { lo, hi } => format!("uniform[{lo},{hi}]"),
    }
}

/// Runs every grid point; rows come back in grid order and a failing point
/// fills the `error` column instead of aborting the sweep.
pub fn sweep(config: &SweepConfig) -> Vec<SweepRow> {
    config.points().par_iter().map(sweep_point).collect()
}

fn sweep_point(point: &GridPoint) -> SweepRow {
    let p = point.params;
    let mut row = SweepRow {
        n: p.n,
        num_sets: p.num_sets,
        density: p.density,
        cost_model: cost_model_label(p.cost_model),
        trials: point.trials,
        seed: point.seed,
        m: None,
        d: None,
        k: p.k,
        variant: point.variant,
        kappa: None,
        opt_kind: None,
        opt_cost: None,
        empirical_ratio: None,
        std_err: None,
        theorem1: None,
        theorem7: None,
        theorem10: None,
        verdict: None,
        error: None,
    };
    if let Err(e) = fill_row(point, &mut row) {
        row.error = Some(e.to_string());
    }
    row
}

fn fill_row(point: &GridPoint, row: &mut SweepRow) -> Result<(), HarnessError> {
    let (system, seq) = instance::random_system(point.params, point.seed)?;
    let st = instance::stats(&system)?;
    row.m = Some(st.m);
    row.d = Some(st.d);

    let costs = trial_costs(&system, &seq, point.variant, point.trials, point.seed)?;
    let k = system.k();
    let (opt, kind) = match offline::exact_optimum(&system, seq.elements(), k) {
        Ok(cover) => (cover, "exact"),
        Err(OfflineError::BudgetExceeded(_)) => (
            offline::greedy_multicover(&system, seq.elements(), k)?,
            "greedy",
        ),
        Err(e) => return Err(e.into()),
    };
    let summary = TrialSummary::from_costs(&costs, opt.cost, point.seed);
    row.opt_kind = Some(kind);
    row.opt_cost = Some(opt.cost);
    row.empirical_ratio = Some(summary.empirical_ratio);
    row.std_err = Some(summary.ratio_std_err());

    let b = applicable_bounds(&system, &seq, point.variant, &opt, kind == "exact")?;
    row.kappa = Some(b.kappa);
    row.theorem1 = b.theorem1;
    row.theorem7 = b.theorem7;
    row.theorem10 = b.theorem10;
    let applicable = b.values();
    row.verdict = Some(compare_to_bounds(&summary, &applicable));
    Ok(())
}

/// Upper bounds that apply to one instance and variant. `None` marks a
/// bound whose preconditions do not hold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApplicableBounds {
    pub m: usize,
    pub d: usize,
    pub k: usize,
    pub kappa: f64,
    pub theorem1: Option<f64>,
    pub theorem7: Option<f64>,
    pub theorem10: Option<f64>,
}

impl ApplicableBounds {
    pub fn values(&self) -> Vec<f64> {
        [self.theorem1, self.theorem7, self.theorem10]
            .into_iter()
            .flatten()
            .collect()
    }
}

/// Picks `kappa` and the bounds for `system`. `kappa` is `k` for unit costs,
/// the measured value against `opt` when `opt_is_exact`, and `1` otherwise;
/// each choice is at most the true value, so no bound gets tighter than it
/// should. The single-coverage bound needs unit costs and `k = 1`; the
/// deficit-scaled bound needs unit costs and [`Variant::UnweightedK`].
pub fn applicable_bounds(
    system: &SetSystem,
    seq: &Sequence,
    variant: Variant,
    opt: &Cover,
    opt_is_exact: bool,
) -> Result<ApplicableBounds, HarnessError> {
    let st = instance::stats(system)?;
    let unit = system.is_unit_cost();
    let k = system.k();
    let kappa = if unit {
        k as f64
    } else if opt_is_exact {
        offline::kappa(system, opt, seq.elements())?.max(1.0)
    } else {
        1.0
    };
    let (m, d) = (st.m as f64, st.d as f64);
    Ok(ApplicableBounds {
        m: st.m,
        d: st.d,
        k,
        kappa,
        theorem1: bounds::theorem1_bound(m, d, kappa).ok(),
        theorem7: (unit && k == 1)
            .then(|| bounds::theorem7_bound(m, d).ok())
            .flatten(),
        theorem10: (unit && variant == Variant::UnweightedK)
            .then(|| bounds::theorem10_bound(m, d, k as f64).ok())
            .flatten(),
    })
}

/// Writes rows with a header line.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<(), HarnessError> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Least-squares slope of `ys` against `xs` with its standard error.
/// Needs at least three points and some spread in `xs`.
pub fn trend_slope(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len();
    if n < 3 || ys.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Some((slope, (ssr / (nf - 2.0) / sxx).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::WeightedSet;

    fn toy() -> (SetSystem, Sequence) {
        let sets = (0..2)
            .map(|id| WeightedSet {
                id,
                cost: 1.0,
                elements: vec![0],
            })
            .collect();
        (SetSystem::new(1, 1, sets).unwrap(), Sequence::new(vec![0]))
    }

    #[test]
    fn toy_ratio() {
        let (sys, seq) = toy();
        let s = empirical_ratio(&sys, &seq, Variant::Universal, 20_000, 7).unwrap();
        assert_eq!(s.opt_cost, 1.0);
        assert!((s.empirical_ratio - 1.25).abs() < 0.02, "{s:?}");
        assert_eq!(compare_to_bounds(&s, &[6.0]), Verdict::Pass);
    }

    #[test]
    fn deterministic_instance_has_zero_spread() {
        let (sys, seq) = toy();
        let sys = sys.with_k(2).unwrap();
        let s = empirical_ratio(&sys, &seq, Variant::Universal, 50, 1).unwrap();
        assert_eq!(s.std_err, 0.0);
        assert_eq!(s.empirical_ratio, 1.0);
    }

    #[test]
    fn repeated_seed_is_identical() {
        let (sys, seq) = instance::random_system(
            RandomSystemParams {
                n: 12,
                num_sets: 8,
                density: 0.4,
                cost_model: CostModel::Uniform { lo: 1.0, hi: 4.0 },
                k: 2,
            },
            5,
        )
        .unwrap();
        let a = empirical_ratio(&sys, &seq, Variant::Universal, 64, 99).unwrap();
        let b = empirical_ratio(&sys, &seq, Variant::Universal, 64, 99).unwrap();
        assert_eq!(a, b);
        assert!(a.empirical_ratio >= 1.0);
    }

    #[test]
    fn zero_trials_rejected() {
        let (sys, seq) = toy();
        assert!(matches!(
            empirical_ratio(&sys, &seq, Variant::Universal, 0, 1),
            Err(HarnessError::NoTrials)
        ));
    }

    fn summary(ratio: f64, std_err: f64) -> TrialSummary {
        TrialSummary {
            trials: 10,
            mean_cost: ratio,
            opt_cost: 1.0,
            empirical_ratio: ratio,
            std_err,
            seed: 0,
        }
    }

    #[test]
    fn verdict_contract() {
        assert_eq!(compare_to_bounds(&summary(7.0, 0.1), &[6.0]), Verdict::Fail);
        assert_eq!(compare_to_bounds(&summary(6.0, 0.0), &[6.0]), Verdict::Pass);
        assert_eq!(compare_to_bounds(&summary(6.2, 0.1), &[6.0]), Verdict::Pass);
        assert_eq!(
            compare_to_bounds(&summary(3.0, 0.0), &[6.0, 2.0]),
            Verdict::Fail
        );
    }

    fn config(cost_model: CostModel, variant: Variant) -> SweepConfig {
        SweepConfig {
            n: vec![10],
            num_sets: vec![8],
            density: vec![0.4],
            k: vec![2],
            cost_model: vec![cost_model],
            variant: vec![variant],
            trials: vec![40],
            seed: vec![3],
        }
    }

    #[test]
    fn sweep_single_point() {
        let rows = sweep(&config(CostModel::Unit, Variant::UnweightedK));
        assert_eq!(rows.len(), 1);
        let row = &rows[0];
        assert_eq!(row.error, None);
        assert!(row.theorem10.is_some());
        assert_eq!(row.kappa, Some(2.0));
        assert_eq!(
            row.theorem1,
            bounds::theorem1_bound(row.m.unwrap() as f64, row.d.unwrap() as f64, 2.0).ok()
        );
        assert_eq!(row.theorem7, None);
    }

    #[test]
    fn weighted_sweep_gates_unit_bounds() {
        let rows = sweep(&config(
            CostModel::Uniform { lo: 1.0, hi: 3.0 },
            Variant::Universal,
        ));
        let row = &rows[0];
        assert_eq!(row.error, None);
        assert!(row.theorem1.is_some());
        assert_eq!(row.theorem7, None);
        assert_eq!(row.theorem10, None);
    }

    #[test]
    fn sweep_records_errors_and_continues() {
        let mut cfg = config(
            CostModel::Uniform { lo: 1.0, hi: 3.0 },
            Variant::UnweightedK,
        );
        cfg.variant.push(Variant::Universal);
        let rows = sweep(&cfg);
        assert_eq!(rows.len(), 2);
        assert!(rows[0].error.is_some());
        assert_eq!(rows[0].verdict, None);
        assert_eq!(rows[1].error, None);
    }

    #[test]
    fn sweep_csv_is_reproducible() {
        let mut cfg = config(CostModel::Unit, Variant::Universal);
        cfg.k = vec![1, 2];
        cfg.seed = vec![1, 2];
        let render = || {
            let mut out = Vec::new();
            write_sweep_csv(&sweep(&cfg), &mut out).unwrap();
            out
        };
        let first = render();
        assert_eq!(first, render());
        let text = String::from_utf8(first).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.starts_with("n,num_sets,density,cost_model,trials,seed,m,d,k,variant,kappa"));
    }

    #[test]
    fn config_parses_json() {
        let json = r#"{"n":[10],"num_sets":[8],"density":[0.3],"k":[1],
            "variant":["universal","unweighted-k"],"trials":[10],"seed":[1]}"#;
        let cfg = SweepConfig::from_json(json.as_bytes()).unwrap();
        assert_eq!(cfg.cost_model, vec![CostModel::Unit]);
        assert_eq!(cfg.points().len(), 2);
    }

    #[test]
    fn slope_of_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        let (slope, se) = trend_slope(&xs, &ys).unwrap();
        assert!((slope - 2.0).abs() < 1e-12);
        assert!(se < 1e-12);
        assert!(trend_slope(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_none());
    }
}
