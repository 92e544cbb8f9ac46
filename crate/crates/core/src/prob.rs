//! Exact Poisson-binomial distribution and the numeric checks built on it.
//!
//! Besides the distribution itself this module evaluates
//!
//! * the two tail statements about sums of independent trials,
//! * the charge estimate `C(psi, l, x)` together with the root `x0(l)` at
//!   which it peaks, and the published table of `C(2, l, x0)`,
//! * the expected-potential recursion `F(z, p)` and its worst case `F(z)`.

use serde::Serialize;
use thiserror::Error;

use crate::rng::SplitMix64;

#[derive(Debug, Error, PartialEq)]
pub enum ProbError {
    #[error("probability {value} at index {index} is outside [0, 1]")]
    OutOfRange { index: usize, value: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("sequence is not z-legal at term {index}: {reason}")]
    NotLegal { index: usize, reason: String },
}

/// Success probabilities of independent 0-1 trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialVector(Vec<f64>);

impl TrialVector {
    pub fn new(probs: Vec<f64>) -> Result<Self, ProbError> {
        if let Some((index, &value)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !(0.0..=1.0).contains(*p))
        {
            return Err(ProbError::OutOfRange { index, value });
        }
        Ok(Self(probs))
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `X`, the expected number of successes.
    pub fn mean(&self) -> f64 {
        self.0.iter().sum()
    }

    fn has_fractional(&self) -> bool {
        self.0.iter().any(|&p| p > 0.0 && p < 1.0)
    }
}

/// Probability mass function over `0..=N` successes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pmf(Vec<f64>);

impl Pmf {
    pub fn mass(&self) -> &[f64] {
        &self.0
    }

    pub fn at(&self, successes: usize) -> f64 {
        self.0.get(successes).copied().unwrap_or(0.0)
    }

    pub fn cdf(&self, successes: usize) -> f64 {
        self.0.iter().take(successes + 1).sum()
    }
}

/// Exact distribution of the number of successes, `O(N^2)`.
pub fn poisson_binomial(tv: &TrialVector) -> Pmf {
    let mut mass = Vec::with_capacity(tv.len() + 1);
    mass.push(1.0);
    for &p in tv.probs() {
        mass.push(0.0);
        for j in (1..mass.len()).rev() {
            mass[j] = mass[j] * (1.0 - p) + mass[j - 1] * p;
        }
        mass[0] *= 1.0 - p;
    }
    Pmf(mass)
}

/// Reference distribution by summing over all `2^N` outcomes.
///
/// # Panics
///
/// Panics for more than 24 trials.
pub fn enumerate_pmf(tv: &TrialVector) -> Pmf {
    let n = tv.len();
    assert!(n <= 24, "enumeration is limited to 24 trials");
    let mut mass = vec![0.0; n + 1];
    for outcome in 0u32..(1u32 << n) {
        let mut prob = 1.0;
        for (i, &p) in tv.probs().iter().enumerate() {
            prob *= if outcome >> i & 1 == 1 { p } else { 1.0 - p };
        }
        mass[outcome.count_ones() as usize] += prob;
    }
    Pmf(mass)
}

/// Mode comparison `Pr[s = a] > Pr[s = a - 1]`, asserted for `0 < 2a <= X + 1`.
pub fn check_lemma12(tv: &TrialVector, a: usize) -> Result<bool, ProbError> {
    let x = tv.mean();
    if a == 0 || 2.0 * a as f64 > x + 1.0 {
        return Err(ProbError::Precondition(format!(
            "need 0 < 2a <= X + 1, got a = {a}, X = {x}"
        )));
    }
    if !tv.has_fractional() {
        return Err(ProbError::Precondition(
            "need at least one probability strictly between 0 and 1".into(),
        ));
    }
    let pmf = poisson_binomial(tv);
    Ok(pmf.at(a) > pmf.at(a - 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Lower tail `Pr[s <= a]` against the single Poisson term `e^-X X^a / a!`,
/// asserted for `0 <= a <= X/2`.
pub fn check_lemma13(tv: &TrialVector, a: usize) -> Result<TailCheck, ProbError> {
    let x = tv.mean();
    if a as f64 > x / 2.0 {
        return Err(ProbError::Precondition(format!(
            "need 0 <= a <= X/2, got a = {a}, X = {x}"
        )));
    }
    let lhs = poisson_binomial(tv).cdf(a);
    let rhs = poisson_term(x, a);
    Ok(TailCheck {
        lhs,
        rhs,
        holds: lhs < rhs,
    })
}

/// `e^-x x^j / j!` computed as a running product.
fn poisson_term(x: f64, j: usize) -> f64 {
    (1..=j).fold((-x).exp(), |acc, i| acc * x / i as f64)
}

/// `C(psi, l, x) = e^-x ( x^(l-1)/(l-1)! (x - l psi) + psi sum_{j<=l-2} x^j/j! )`.
///
/// # Panics
///
/// Panics if `ell == 0`.
pub fn c_function(psi: f64, ell: usize, x: f64) -> f64 {
    assert!(ell >= 1, "ell must be at least 1");
    let mut term = 1.0;
    let mut partial = 0.0;
    for j in 0..ell - 1 {
        partial += term;
        term *= x / (j + 1) as f64;
    }
    // `term` is now x^(l-1)/(l-1)!.
    (-x).exp() * (term * (x - ell as f64 * psi) + psi * partial)
}

/// Root of `-x^2 + 3 l x - 2(l^2 - 1)` in `(2l, 2l + 2/l)`.
///
/// # Panics
///
/// Panics if `ell < 2`.
pub fn x0_root(ell: usize) -> f64 {
    assert!(ell >= 2, "ell must be at least 2");
    let l = ell as f64;
    let root = (3.0 * l + (l * l + 8.0).sqrt()) / 2.0;
    debug_assert!(root > 2.0 * l && root < 2.0 * l + 2.0 / l);
    root
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Table1Row {
    pub ell: usize,
    pub x0: f64,
    pub c: f64,
}

/// `(l, x0(l), C(2, l, x0(l)))` for `l = 40` down to `2`.
pub fn reproduce_table1() -> Vec<Table1Row> {
    (2..=40)
        .rev()
        .map(|ell| {
            let x0 = x0_root(ell);
            Table1Row {
                ell,
                x0,
                c: c_function(2.0, ell, x0),
            }
        })
        .collect()
}

/// Published `(l, x0, C(2, l, x0))` rows, `l = 40` down to `2`.
#[allow(clippy::excessive_precision)]
pub const PUBLISHED_TABLE1: [(usize, f64, f64); 39] = [
    (40, 80.049938, 0.000000267802482750),
    (39, 78.051215, 0.000000367770130466),
    (38, 76.052559, 0.000000505162841918),
    (37, 74.053975, 0.000000694037963620),
    (36, 72.055470, 0.000000953753092710),
    (35, 70.057050, 0.000001310973313578),
    (34, 68.058722, 0.000001802442476141),
    (33, 66.060495, 0.000002478811076980),
    (32, 64.062378, 0.000003409926108503),
    (31, 62.064382, 0.000004692144890365),
    (30, 60.066519, 0.000006458452590756),
    (29, 58.068802, 0.000008892465898008),
    (28, 56.071247, 0.000012247826675415),
    (27, 54.073872, 0.000016875076361489),
    (26, 52.076697, 0.000023258920058581),
    (25, 50.079746, 0.000032069930688629),
    (24, 48.083046, 0.000044236337186173),
    (23, 46.086630, 0.000061043767052413),
    (22, 44.090537, 0.000084273925651732),
    (21, 42.094810, 0.000116397546202183),
    (20, 40.099505, 0.000160843029165595),
    (19, 38.104686, 0.000222370693445282),
    (18, 36.110434, 0.000307594429791974),
    (17, 34.116844, 0.000425709065373619),
    (16, 32.124038, 0.000589504628397967),
    (15, 30.132169, 0.000816780125566277),
    (14, 28.141428, 0.001132311971151022),
    (13, 26.152067, 0.001570588251431389),
    (12, 24.164414, 0.002179590204991318),
    (11, 22.178908, 0.003025980931596380),
    (10, 20.196152, 0.004202124182703906),
    (9, 18.216991, 0.005835328094363729),
    (8, 16.242641, 0.008099376451161879),
    (7, 14.274917, 0.011227174827357965),
    (6, 12.316625, 0.015519482245119539),
    (5, 10.372281, 0.021333034990024608),
    (4, 8.449490, 0.028995023101223379),
    (3, 6.561553, 0.038468799615120751),
    (2, 4.732051, 0.048129928161242959),
];

/// Published `F(1/m)` for `m = 1..=8`.
pub const PUBLISHED_F_TABLE: [(u32, f64); 8] = [
    (1, 1.086),
    (2, 0.543),
    (3, 0.397),
    (4, 0.157),
    (5, 0.120),
    (6, 0.067),
    (7, -0.016),
    (8, -0.112),
];

/// Worst-case expected potential `F(z)` by the doubling recursion:
/// `1 + log2 z` for `z >= log2 e`, `log2 log2 e + 1 - log2 e + z` on
/// `[log2 e / 2, log2 e]`, and `z log2(2z) + (1 - z) F(2z)` below.
///
/// # Panics
///
/// Panics unless `z > 0`.
pub fn f_worst_case(z: f64) -> f64 {
    assert!(z > 0.0 && z.is_finite(), "z must be positive");
    let log2e = std::f64::consts::LOG2_E;
    if z >= log2e {
        1.0 + z.log2()
    } else if z >= log2e / 2.0 {
        log2e.log2() + 1.0 - log2e + z
    } else {
        z * (2.0 * z).log2() + (1.0 - z) * f_worst_case(2.0 * z)
    }
}

/// `F(z, p)`: each term `p_i` selects with probability `min(p_i, 1)` and
/// contributes `log2(p_i + beta_i)` where `beta_i = z + sum_{j<i} p_j`.
pub fn f_sequence(z: f64, p: &[f64]) -> Result<f64, ProbError> {
    if z.is_nan() || z <= 0.0 {
        return Err(ProbError::Precondition(format!("z = {z} must be positive")));
    }
    let mut beta = z;
    for (index, &term) in p.iter().enumerate() {
        if !(term >= 0.0 && term <= beta) {
            return Err(ProbError::NotLegal {
                index,
                reason: format!("term {term} outside [0, {beta}]"),
            });
        }
        if term >= 1.0 && index + 1 != p.len() {
            return Err(ProbError::NotLegal {
                index,
                reason: format!("term {term} >= 1 must be last"),
            });
        }
        beta += term;
    }
    // Fold from the back: F(z, p) = p1 log2(p1 + z) + (1 - p1) F(z + p1, tail).
    let mut betas = Vec::with_capacity(p.len());
    let mut b = z;
    for &term in p {
        betas.push(b);
        b += term;
    }
    let value = p
        .iter()
        .zip(&betas)
        .rev()
        .fold(0.0, |rest, (&term, &beta)| {
            let weight = term.min(1.0);
            weight * (term + beta).log2() + (1.0 - weight) * rest
        });
    Ok(value)
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub checks: Vec<CheckOutcome>,
    pub table1: Vec<Table1Row>,
    pub f_table: Vec<(u32, f64)>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Sizes of the randomized parts of [`run_suite`].
#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub seed: u64,
    pub oracle_vectors: usize,
    pub oracle_max_trials: usize,
    pub tail_inputs: usize,
    pub tail_max_trials: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 2005,
            oracle_vectors: 500,
            oracle_max_trials: 15,
            tail_inputs: 10_000,
            tail_max_trials: 30,
        }
    }
}

/// Random trial vector with length in `1..=max_len` and probabilities drawn
/// uniformly from the open unit interval.
pub fn random_trial_vector(rng: &mut SplitMix64, max_len: usize) -> TrialVector {
    let len = 1 + rng.next_below(max_len as u64) as usize;
    let probs = (0..len)
        .map(|_| loop {
            let p = rng.next_f64();
            if p > 0.0 {
                break p;
            }
        })
        .collect();
    TrialVector(probs)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct SweepTally {
    pub tested: usize,
    pub failures: usize,
    /// Largest `lhs / rhs` seen (tail sweep only).
    pub worst_ratio: f64,
}

/// Draws vectors until `inputs` of them admit a valid `a`, then checks the
/// mode comparison with `a` uniform over its valid range.
pub fn sweep_lemma12(rng: &mut SplitMix64, inputs: usize, max_len: usize) -> SweepTally {
    let mut tally = SweepTally::default();
    while tally.tested < inputs {
        let tv = random_trial_vector(rng, max_len);
        let a_max = ((tv.mean() + 1.0) / 2.0).floor() as u64;
        if a_max == 0 {
            continue;
        }
        let a = 1 + rng.next_below(a_max) as usize;
        tally.tested += 1;
        if !check_lemma12(&tv, a).expect("precondition holds by construction") {
            tally.failures += 1;
        }
    }
    tally
}

/// Same protocol for the lower-tail statement with `a` uniform in `0..=X/2`.
pub fn sweep_lemma13(rng: &mut SplitMix64, inputs: usize, max_len: usize) -> SweepTally {
    let mut tally = SweepTally::default();
    for _ in 0..inputs {
        let tv = random_trial_vector(rng, max_len);
        let a_max = (tv.mean() / 2.0).floor() as u64;
        let a = rng.next_below(a_max + 1) as usize;
        let check = check_lemma13(&tv, a).expect("precondition holds by construction");
        tally.tested += 1;
        tally.worst_ratio = tally.worst_ratio.max(check.lhs / check.rhs);
        if !check.holds {
            tally.failures += 1;
        }
    }
    tally
}

/// Runs the whole numeric verification: the table of `C(2, l, x0)`, the
/// dyadic `F(1/m)` entries, DP-versus-enumeration agreement and both
/// tail-statement sweeps.
pub fn run_suite(config: SuiteConfig) -> SuiteReport {
    let mut checks = Vec::new();
    let table1 = reproduce_table1();

    let mut worst_x0: f64 = 0.0;
    let mut worst_c: f64 = 0.0;
    let mut max_c: f64 = 0.0;
    for (row, &(ell, x0, c)) in table1.iter().zip(PUBLISHED_TABLE1.iter()) {
        debug_assert_eq!(row.ell, ell);
        worst_x0 = worst_x0.max((row.x0 - x0).abs());
        worst_c = worst_c.max(((row.c - c) / c).abs());
        max_c = max_c.max(row.c);
    }
    checks.push(CheckOutcome {
        name: "table1".into(),
        passed: worst_x0 <= 1e-5 && worst_c <= 1e-9 && max_c < 0.049,
        detail: format!(
            "max |dx0| = {worst_x0:.2e}, max rel dC = {worst_c:.2e}, max C = {max_c:.6}"
        ),
    });

    let f_table: Vec<(u32, f64)> = (1..=8).map(|m| (m, f_worst_case(1.0 / m as f64))).collect();
    let dyadic_err = PUBLISHED_F_TABLE
        .iter()
        .filter(|(m, _)| m.is_power_of_two())
        .map(|&(m, published)| (f_worst_case(1.0 / m as f64) - published).abs())
        .fold(0.0, f64::max);
    checks.push(CheckOutcome {
        name: "f_table_dyadic".into(),
        passed: dyadic_err <= 1e-3,
        detail: format!("max |F(1/m) - published| over m in {{1,2,4,8}} = {dyadic_err:.2e}"),
    });

    let mut rng = SplitMix64::new(config.seed);
    let mut worst_pmf: f64 = 0.0;
    for _ in 0..config.oracle_vectors {
        let tv = random_trial_vector(&mut rng, config.oracle_max_trials);
        let dp = poisson_binomial(&tv);
        let brute = enumerate_pmf(&tv);
        for (a, b) in dp.mass().iter().zip(brute.mass()) {
            worst_pmf = worst_pmf.max((a - b).abs());
        }
    }
    checks.push(CheckOutcome {
        name: "poisson_binomial_oracle".into(),
        passed: worst_pmf <= 1e-12,
        detail: format!(
            "{} vectors, max |dp - enumeration| = {worst_pmf:.2e}",
            config.oracle_vectors
        ),
    });

    let l12 = sweep_lemma12(&mut rng, config.tail_inputs, config.tail_max_trials);
    checks.push(CheckOutcome {
        name: "lemma12_sweep".into(),
        passed: l12.failures == 0,
        detail: format!("{} failures in {} inputs", l12.failures, l12.tested),
    });
    let l13 = sweep_lemma13(&mut rng, config.tail_inputs, config.tail_max_trials);
    checks.push(CheckOutcome {
        name: "lemma13_sweep".into(),
        passed: l13.failures == 0,
        detail: format!(
            "{} failures in {} inputs, worst lhs/rhs = {:.4}",
            l13.failures, l13.tested, l13.worst_ratio
        ),
    });

    SuiteReport {
        checks,
        table1,
        f_table,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tv(p: &[f64]) -> TrialVector {
        TrialVector::new(p.to_vec()).unwrap()
    }

    fn assert_mass(pmf: &Pmf, expected: &[f64]) {
        assert_eq!(pmf.mass().len(), expected.len());
        for (a, b) in pmf.mass().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15, "{:?} vs {expected:?}", pmf.mass());
        }
    }

    #[test]
    fn pmf_examples() {
        assert_mass(&poisson_binomial(&tv(&[0.5, 0.5])), &[0.25, 0.5, 0.25]);
        assert_mass(&poisson_binomial(&tv(&[1.0])), &[0.0, 1.0]);
        // Enumeration: (0.8)(0.3), 0.2*0.3 + 0.8*0.7, 0.2*0.7.
        assert_mass(&poisson_binomial(&tv(&[0.2, 0.7])), &[0.24, 0.62, 0.14]);
        assert_mass(&poisson_binomial(&tv(&[])), &[1.0]);
    }

    #[test]
    fn trial_vector_rejects_out_of_range() {
        assert_eq!(
            TrialVector::new(vec![0.3, 1.2]),
            Err(ProbError::OutOfRange {
                index: 1,
                value: 1.2
            })
        );
        assert!(TrialVector::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn lemma12_examples() {
        // Binomial(4, 1/2): Pr[1] = 0.25 > Pr[0] = 0.0625.
        assert_eq!(check_lemma12(&tv(&[0.5; 4]), 1), Ok(true));
        assert!(matches!(
            check_lemma12(&tv(&[0.9]), 1),
            Err(ProbError::Precondition(_))
        ));
        assert!(check_lemma12(&tv(&[0.5; 4]), 0).is_err());
        assert!(check_lemma12(&tv(&[1.0, 1.0, 0.0]), 1).is_err());
    }

    #[test]
    fn lemma13_examples() {
        let c = check_lemma13(&tv(&[0.5, 0.5]), 0).unwrap();
        assert_eq!(c.lhs, 0.25);
        assert!((c.rhs - (-1.0f64).exp()).abs() < 1e-15);
        assert!(c.holds);

        let c = check_lemma13(&tv(&[1.0; 4]), 1).unwrap();
        assert_eq!(c.lhs, 0.0);
        assert!((c.rhs - 4.0 * (-4.0f64).exp()).abs() < 1e-15);
        assert!(c.holds);

        assert!(check_lemma13(&tv(&[0.5, 0.5]), 1).is_err());
    }

    #[test]
    fn lemma13_fails_for_binomial_sixteen_quarter() {
        // Pr[s <= 2] for Binomial(16, 1/4) is 0.19711..., while
        // e^-4 4^2 / 2! = 0.14652...; a = 2 = X/2 satisfies the precondition.
        let c = check_lemma13(&tv(&[0.25; 16]), 2).unwrap();
        let q = 0.75f64;
        let lhs = q.powi(16) + 16.0 * 0.25 * q.powi(15) + 120.0 * 0.0625 * q.powi(14);
        assert!((c.lhs - lhs).abs() < 1e-14);
        assert!((c.rhs - 8.0 * (-4.0f64).exp()).abs() < 1e-15);
        assert!(!c.holds);
    }

    #[test]
    fn c_function_examples() {
        let c = c_function(2.0, 2, 4.732051);
        assert!((c - 0.048129928).abs() < 1e-8);
        let c = c_function(2.0, 20, 40.099505);
        assert!(((c - 0.000160843029165595) / 0.000160843029165595).abs() < 1e-6);
        let c = c_function(2.0, 1, 3.0);
        assert!((c - (-3.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn x0_examples() {
        assert!((x0_root(2) - (3.0 + 3f64.sqrt())).abs() < 1e-14);
        assert!((x0_root(3) - (9.0 + 17f64.sqrt()) / 2.0).abs() < 1e-14);
        assert!((x0_root(40) - (60.0 + 402f64.sqrt())).abs() < 1e-12);
        for ell in 2..=40 {
            let l = ell as f64;
            let x = x0_root(ell);
            assert!(x > 2.0 * l && x < 2.0 * l + 2.0 / l);
            assert!((-x * x + 3.0 * l * x - 2.0 * (l * l - 1.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn table1_rows() {
        let rows = reproduce_table1();
        assert_eq!(rows.len(), 39);
        assert_eq!(rows[0].ell, 40);
        assert!((rows[0].x0 - 80.049938).abs() < 1e-5);
        assert!(((rows[0].c - 2.67802482750e-7) / 2.67802482750e-7).abs() < 1e-9);
        let five = rows.iter().find(|r| r.ell == 5).unwrap();
        assert!((five.x0 - 10.372281).abs() < 1e-5);
        assert!(((five.c - 0.021333034990024608) / 0.021333034990024608).abs() < 1e-9);
        assert!(rows.iter().all(|r| r.c < 0.049));
    }

    #[test]
    fn f_worst_case_dyadic_entries() {
        assert!((f_worst_case(1.0) - 1.086).abs() < 1e-3);
        assert!((f_worst_case(0.25) - 0.157).abs() < 1e-3);
        assert!((f_worst_case(0.125) + 0.112).abs() < 1e-3);
        assert!(f_worst_case(1.0 / 128.0) <= 0.0);
        assert!(f_worst_case(1.0 / 256.0) <= 0.0);
    }

    #[test]
    fn f_sequence_examples() {
        let z = std::f64::consts::LOG2_E;
        let v = f_sequence(z, &[z]).unwrap();
        assert!((v - (1.0 + z.log2())).abs() < 1e-12);
        assert!((v - 1.5288).abs() < 1e-4);
        assert_eq!(f_sequence(0.3, &[]).unwrap(), 0.0);
        assert_eq!(f_sequence(0.5, &[0.5, 1.0]).unwrap(), 0.5);
    }

    #[test]
    fn f_sequence_rejects_illegal_sequences() {
        assert!(matches!(
            f_sequence(0.25, &[0.5]),
            Err(ProbError::NotLegal { index: 0, .. })
        ));
        assert!(matches!(
            f_sequence(2.0, &[1.5, 0.1]),
            Err(ProbError::NotLegal { index: 0, .. })
        ));
        assert!(f_sequence(0.0, &[]).is_err());
    }

    #[test]
    fn doubling_sequence_reproduces_recursion_below_middle_band() {
        // From z = 1/8 the worst case doubles to 1 then follows the
        // two-term closed form (log2 e - 1, log2 e).
        let log2e = std::f64::consts::LOG2_E;
        let seq = [0.125, 0.25, 0.5, log2e - 1.0, log2e];
        let v = f_sequence(0.125, &seq).unwrap();
        assert!((v - f_worst_case(0.125)).abs() < 1e-12);
    }

    #[test]
    fn suite_runs_on_small_config() {
        let report = run_suite(SuiteConfig {
            seed: 1,
            oracle_vectors: 20,
            oracle_max_trials: 8,
            tail_inputs: 200,
            tail_max_trials: 10,
        });
        let passed = |name: &str| {
            report
                .checks
                .iter()
                .find(|c| c.name == name)
                .unwrap()
                .passed
        };
        assert!(passed("table1"));
        assert!(passed("f_table_dyadic"));
        assert!(passed("poisson_binomial_oracle"));
        assert!(passed("lemma12_sweep"));
        assert_eq!(report.table1.len(), 39);
        assert_eq!(report.f_table.len(), 8);
    }
}
