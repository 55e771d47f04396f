//! Trace distance, the information-flow rate `σ(t)` and the BLP measure.
//!
//! The optimal pair `|±><±|` evolved with the uncorrelated dynamics has
//! distinguishability `|κ₀(t)|^e = e^(-e r(t))`, so `σ(t) = -e ṙ e^(-e r)`
//! and information flows back exactly where `ṙ < 0`. The measure is summed
//! interval by interval between the zeros of `ṙ`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::QubitDensityMatrix;
use crate::error::{check_time, Error, Result};
use crate::kernels::{r_dot, r_only, ModelParams};

/// Maximum number of horizon doublings before giving up.
const MAX_DOUBLINGS: usize = 4;

/// Power applied to `|κ₀(t)|` when forming the pair distance.
///
/// `Two` matches the printed pair distance `|κ₀|²`; `One` is the trace
/// distance `½ tr|ρ₊(t) - ρ₋(t)| = |κ₀|` of the evolved pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Exponent {
    #[serde(rename = "1")]
    One,
    #[default]
    #[serde(rename = "2")]
    Two,
}

impl Exponent {
    pub fn value(self) -> f64 {
        match self {
            Exponent::One => 1.0,
            Exponent::Two => 2.0,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Exponent::One => "1",
            Exponent::Two => "2",
        })
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" => Ok(Exponent::One),
            "2" => Ok(Exponent::Two),
            other => Err(Error::domain(
                "exponent",
                format!("expected 1 or 2, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonMarkovReport {
    pub n_value: f64,
    /// Maximal intervals on which the pair distance increases.
    pub intervals: Vec<(f64, f64)>,
    pub horizon: f64,
    pub exponent: Exponent,
    pub converged: bool,
}

/// `½ tr|a - b|`; for qubits `sqrt(d² + |c|²)` with `d` the population
/// difference and `c` the coherence difference.
pub fn trace_distance(a: &QubitDensityMatrix, b: &QubitDensityMatrix) -> f64 {
    let d = a.p_ee - b.p_ee;
    (d * d + (a.coh - b.coh).norm_sqr()).sqrt()
}

/// Distance of the evolved optimal pair, `e^(-e r(t))`.
pub fn optimal_pair_distance(params: &ModelParams, t: f64, exponent: Exponent) -> Result<f64> {
    check_time("optimal_pair_distance", t)?;
    Ok(pair_distance(params, t, exponent))
}

fn pair_distance(params: &ModelParams, t: f64, exponent: Exponent) -> f64 {
    (-exponent.value() * r_only(params, t)).exp()
}

/// Time derivative of the pair distance.
pub fn sigma(params: &ModelParams, t: f64, exponent: Exponent) -> Result<f64> {
    check_time("sigma", t)?;
    let e = exponent.value();
    Ok(-e * r_dot(params, t) * (-e * r_only(params, t)).exp())
}

fn grid_step(params: &ModelParams, horizon: f64) -> f64 {
    (0.01 / params.omega_c()).min(horizon / 1e4)
}

/// Refines a sign change of `ṙ` inside `[lo, hi]` down to adjacent floats.
fn bisect_root(params: &ModelParams, mut lo: f64, mut hi: f64) -> f64 {
    let negative_lo = r_dot(params, lo) < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (r_dot(params, mid) < 0.0) == negative_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sign changes of `ṙ` in `(0, horizon)`, sorted.
pub fn decay_rate_zeros(params: &ModelParams, horizon: f64) -> Vec<f64> {
    if horizon.is_nan() || horizon <= 0.0 || params.alpha() == 0.0 {
        return Vec::new();
    }
    let n = (horizon / grid_step(params, horizon)).ceil() as usize;
    let mut zeros = Vec::new();
    let mut prev_t = 0.0;
    let mut prev_neg = false;
    for i in 1..=n {
        let t = horizon * i as f64 / n as f64;
        let neg = r_dot(params, t) < 0.0;
        if neg != prev_neg {
            zeros.push(bisect_root(params, prev_t, t));
        }
        prev_t = t;
        prev_neg = neg;
    }
    zeros
}

/// Maximal sub-intervals of `[0, horizon]` on which `σ > 0`.
pub fn increasing_intervals(params: &ModelParams, horizon: f64) -> Vec<(f64, f64)> {
    let zeros = decay_rate_zeros(params, horizon);
    // ṙ > 0 just after t = 0, so sign changes alternate into and out of σ > 0.
    let mut intervals = Vec::with_capacity(zeros.len() / 2 + 1);
    let mut iter = zeros.into_iter();
    while let Some(start) = iter.next() {
        let end = iter.next().unwrap_or(horizon);
        intervals.push((start, end));
    }
    intervals
}

fn interval_sum(params: &ModelParams, intervals: &[(f64, f64)], exponent: Exponent) -> f64 {
    intervals
        .iter()
        .map(|&(a, b)| {
            (pair_distance(params, b, exponent) - pair_distance(params, a, exponent)).max(0.0)
        })
        .fold(0.0, |acc, d| acc + d)
}

/// BLP measure restricted to `[0, tau]`.
pub fn non_markovianity_partial(params: &ModelParams, tau: f64, exponent: Exponent) -> Result<f64> {
    check_time("non_markovianity_partial", tau)?;
    if tau == 0.0 {
        return Ok(0.0);
    }
    Ok(interval_sum(
        params,
        &increasing_intervals(params, tau),
        exponent,
    ))
}

/// BLP measure of the optimal pair, with horizon doubling until the value
/// changes by less than `tol`.
pub fn non_markovianity(
    params: &ModelParams,
    horizon: f64,
    exponent: Exponent,
    tol: f64,
) -> Result<NonMarkovReport> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::domain(
            "non_markovianity",
            format!("horizon must be > 0, got {horizon}"),
        ));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::domain(
            "non_markovianity",
            format!("tol must be > 0, got {tol}"),
        ));
    }
    let evaluate = |h: f64| {
        let intervals = increasing_intervals(params, h);
        let n = interval_sum(params, &intervals, exponent);
        (n, intervals)
    };

    let mut h = horizon;
    let (mut n, mut intervals) = evaluate(h);
    let mut converged = false;
    for _ in 0..MAX_DOUBLINGS {
        let (n2, intervals2) = evaluate(2.0 * h);
        let delta = (n2 - n).abs();
        h *= 2.0;
        n = n2;
        intervals = intervals2;
        if delta < tol {
            converged = true;
            break;
        }
    }
    Ok(NonMarkovReport {
        n_value: n,
        intervals,
        horizon: h,
        exponent,
        converged,
    })
}
