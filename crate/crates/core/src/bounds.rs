//! Closed-form competitive-ratio bounds and lower-bound reference curves.
//!
//! `m` is the maximum element frequency, `d` the maximum set size, `k` the
//! coverage factor and `kappa` the cost-concentration statistic from
//! [`crate::offline::kappa`]. Logarithms of `m` are real-valued base 2.

use std::f64::consts::E;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BoundsError {
    #[error("m = {0} must be at least 2")]
    FrequencyTooSmall(f64),
    #[error("d = {0} must be at least 1")]
    SetSizeTooSmall(f64),
    #[error("k = {0} must be at least 1")]
    CoverageTooSmall(f64),
    #[error("kappa = {0} must be at least 1")]
    KappaTooSmall(f64),
    #[error("c_ratio = {0} must be at least 1")]
    CostRatioTooSmall(f64),
    #[error("lower-bound expression undefined: {0}")]
    Undefined(String),
}

/// Validated parameters for the whole bound family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundInputs {
    pub m: f64,
    pub d: f64,
    pub k: f64,
    pub kappa: f64,
    pub c_ratio: f64,
}

impl BoundInputs {
    pub fn new(m: f64, d: f64, k: f64, kappa: f64, c_ratio: f64) -> Result<Self, BoundsError> {
        check_m(m)?;
        check_d(d)?;
        if !at_least(k, 1.0) {
            return Err(BoundsError::CoverageTooSmall(k));
        }
        if !at_least(kappa, 1.0) {
            return Err(BoundsError::KappaTooSmall(kappa));
        }
        if !at_least(c_ratio, 1.0) {
            return Err(BoundsError::CostRatioTooSmall(c_ratio));
        }
        Ok(Self {
            m,
            d,
            k,
            kappa,
            c_ratio,
        })
    }

    /// `D = d / (kappa * log2 m)`.
    pub fn d_ratio(&self) -> f64 {
        self.d / (self.kappa * self.m.log2())
    }
}

/// `x >= lo`, false for NaN.
fn at_least(x: f64, lo: f64) -> bool {
    x >= lo
}

fn check_m(m: f64) -> Result<(), BoundsError> {
    if m >= 2.0 && m.is_finite() {
        Ok(())
    } else {
        Err(BoundsError::FrequencyTooSmall(m))
    }
}

fn check_d(d: f64) -> Result<(), BoundsError> {
    if d >= 1.0 && d.is_finite() {
        Ok(())
    } else {
        Err(BoundsError::SetSizeTooSmall(d))
    }
}

/// `1 + log2 m * max(5, 2 + ln(d / (kappa log2 m)))`.
pub fn theorem1_bound(m: f64, d: f64, kappa: f64) -> Result<f64, BoundsError> {
    check_m(m)?;
    check_d(d)?;
    if !at_least(kappa, 1.0) {
        return Err(BoundsError::KappaTooSmall(kappa));
    }
    let log_m = m.log2();
    let d_ratio = d / (kappa * log_m);
    Ok(1.0 + log_m * f64::max(5.0, 2.0 + d_ratio.ln()))
}

/// The general bound with `kappa = max(1, k / c_ratio)`.
pub fn corollary2_bound(m: f64, d: f64, k: f64, c_ratio: f64) -> Result<f64, BoundsError> {
    if !at_least(k, 1.0) {
        return Err(BoundsError::CoverageTooSmall(k));
    }
    if !at_least(c_ratio, 1.0) {
        return Err(BoundsError::CostRatioTooSmall(c_ratio));
    }
    theorem1_bound(m, d, f64::max(1.0, k / c_ratio))
}

/// Unweighted single coverage: `log2 m ln d` when `m > 15`, otherwise
/// `(1/2 + log2 m)(1 + ln d)`.
pub fn theorem7_bound(m: f64, d: f64) -> Result<f64, BoundsError> {
    check_m(m)?;
    check_d(d)?;
    let log_m = m.log2();
    Ok(if m > 15.0 {
        log_m * d.ln()
    } else {
        (0.5 + log_m) * (1.0 + d.ln())
    })
}

/// Unweighted multicover with the deficit-scaled step probability. The
/// first branch is taken when `k <= 2e * d`.
pub fn theorem10_bound(m: f64, d: f64, k: f64) -> Result<f64, BoundsError> {
    check_m(m)?;
    check_d(d)?;
    if !at_least(k, 1.0) {
        return Err(BoundsError::CoverageTooSmall(k));
    }
    let log_m = m.log2();
    let tail = 1.0 + 2.0 * log_m;
    Ok(if k <= 2.0 * E * d {
        (0.5 + log_m) * (2.0 * (d / k).ln() + 3.4) + tail
    } else {
        tail
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerExpr {
    pub value: f64,
    pub in_range: bool,
}

/// Slack used in the parameter windows of the lower-bound constructions.
pub const LOWER_BOUND_DELTA: f64 = 0.1;

/// `log a log b / (log log a + log log b)` with base-2 logs and hidden
/// constant 1, where `(a, b) = (m/k, n/k)` unweighted and `(m, n)` weighted.
/// `in_range` reports whether `(m, n, k)` sits in the construction's window.
pub fn lemma11_lower_expr(
    m: f64,
    n: f64,
    k: f64,
    weighted: bool,
) -> Result<LowerExpr, BoundsError> {
    if !at_least(k, 1.0) {
        return Err(BoundsError::CoverageTooSmall(k));
    }
    let (a, b) = if weighted { (m, n) } else { (m / k, n / k) };
    if !(at_least(a, 2.0) && at_least(b, 2.0)) {
        return Err(BoundsError::Undefined(format!(
            "arguments ({a}, {b}) must both be at least 2"
        )));
    }
    let (la, lb) = (a.log2(), b.log2());
    let denom = la.log2() + lb.log2();
    if denom.is_nan() || denom <= 0.0 {
        return Err(BoundsError::Undefined(format!(
            "log log terms sum to {denom}"
        )));
    }
    let value = la * lb / denom;
    let exponent = 0.5 - LOWER_BOUND_DELTA;
    let in_range = if weighted {
        let pad = (k + 1.0).log2().ceil();
        let base_n = n - 1.0 - pad;
        base_n > 0.0
            && k + base_n.log2() <= m
            && m <= k + base_n.powf(exponent).exp()
            && k < 0.5 * m.min(2f64.powf(n - 1.0))
    } else {
        k * (n / (k + 1.0)).log2() <= m
            && m <= (k + 1.0) * (n / k).powf(exponent).exp()
            && k < m.min(n)
    };
    Ok(LowerExpr { value, in_range })
}
