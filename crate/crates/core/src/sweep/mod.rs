//! Parameter-grid experiments.
//!
//! A [`SweepSpec`] names a metric, one or two axes and the fixed values of
//! everything else. [`run_sweep`] evaluates every grid point (in parallel by
//! default) and returns rows ordered by grid index, so the output does not
//! depend on scheduling.

mod presets;

pub use presets::{figure_preset, FigureId};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distinguishability::{
    non_markovianity, non_markovianity_partial, optimal_pair_distance, Exponent,
};
use crate::dynamics::{coherence_l1, reduced_state};
use crate::error::{Error, Result};
use crate::kernels::{ModelParams, Param};
use crate::qsl::{qsl_correlated, Convention};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    NonMarkovianity,
    QslCorrelated,
    CoherenceInitial,
    TraceDistancePair,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::NonMarkovianity => "non_markovianity",
            Metric::QslCorrelated => "qsl_correlated",
            Metric::CoherenceInitial => "coherence_initial",
            Metric::TraceDistancePair => "trace_distance_pair",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Metric::NonMarkovianity,
            Metric::QslCorrelated,
            Metric::CoherenceInitial,
            Metric::TraceDistancePair,
        ]
        .into_iter()
        .find(|m| m.name() == s)
        .ok_or_else(|| Error::InvalidSweep(format!("unknown metric `{s}`")))
    }
}

/// Quantity varied along an axis: a model parameter, the driving time or
/// the non-Markovianity horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum AxisParam {
    Model(Param),
    Tau,
    Horizon,
}

impl AxisParam {
    pub fn name(self) -> &'static str {
        match self {
            AxisParam::Model(p) => p.name(),
            AxisParam::Tau => "tau",
            AxisParam::Horizon => "horizon",
        }
    }
}

impl fmt::Display for AxisParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AxisParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tau" => Ok(AxisParam::Tau),
            "horizon" => Ok(AxisParam::Horizon),
            other => other.parse().map(AxisParam::Model),
        }
    }
}

impl From<AxisParam> for String {
    fn from(a: AxisParam) -> String {
        a.name().to_string()
    }
}

impl TryFrom<String> for AxisParam {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: AxisParam,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub scale: Scale,
}

impl Axis {
    pub fn linear(param: AxisParam, min: f64, max: f64, count: usize) -> Self {
        Axis {
            param,
            min,
            max,
            count,
            scale: Scale::Linear,
        }
    }

    pub fn log(param: AxisParam, min: f64, max: f64, count: usize) -> Self {
        Axis {
            scale: Scale::Log,
            ..Axis::linear(param, min, max, count)
        }
    }

    /// Grid values with both endpoints hit exactly.
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        let last = n.saturating_sub(1).max(1) as f64;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i + 1 == n {
                    return self.max;
                }
                let frac = i as f64 / last;
                match self.scale {
                    Scale::Linear => self.min + (self.max - self.min) * frac,
                    Scale::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * frac).exp(),
                }
            })
            .collect()
    }

    fn validate(&self) -> Result<()> {
        let name = self.param.name();
        if self.count < 2 {
            return Err(Error::InvalidSweep(format!(
                "axis `{name}` needs at least 2 points"
            )));
        }
        if !(self.min.is_finite() && self.max.is_finite()) || self.min >= self.max {
            return Err(Error::InvalidSweep(format!(
                "axis `{name}` needs finite min < max, got [{}, {}]",
                self.min, self.max
            )));
        }
        if self.scale == Scale::Log && self.min <= 0.0 {
            return Err(Error::InvalidSweep(format!(
                "log axis `{name}` needs min > 0"
            )));
        }
        Ok(())
    }
}

/// Settings shared by all grid points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub exponent: Exponent,
    pub convention: Convention,
    /// Initial horizon of the non-Markovianity integral.
    pub horizon: f64,
    /// Driving time for QSL metrics, evaluation time for the pair distance.
    pub tau: f64,
    /// Horizon-doubling tolerance on the non-Markovianity.
    pub tol: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            exponent: Exponent::Two,
            convention: Convention::AsPrinted,
            horizon: 100.0,
            tau: 1.0,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub metric: Metric,
    pub axes: Vec<Axis>,
    pub fixed: ModelParams,
    pub options: SweepOptions,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::InvalidSweep(format!(
                "a sweep has 1 or 2 axes, got {}",
                self.axes.len()
            )));
        }
        for a in &self.axes {
            a.validate()?;
        }
        if self.axes.len() == 2 && self.axes[0].param == self.axes[1].param {
            return Err(Error::InvalidSweep(format!(
                "axis `{}` is swept twice",
                self.axes[0].param
            )));
        }
        Ok(())
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn sweeps(&self, param: AxisParam) -> bool {
        self.axes.iter().any(|a| a.param == param)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
    /// Metric value; NaN when the point failed.
    pub value: f64,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    pub timestamp_unix: u64,
    /// Every resolved setting, stringified.
    pub resolved: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
    pub provenance: Provenance,
}

impl SweepResult {
    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.converged)
    }

    /// Row with the largest finite metric value.
    pub fn argmax(&self) -> Option<&SweepRow> {
        self.rows
            .iter()
            .filter(|r| r.value.is_finite())
            .max_by(|a, b| a.value.total_cmp(&b.value))
    }

    /// Smallest and largest finite metric values.
    pub fn range(&self) -> Option<(f64, f64)> {
        let mut it = self.rows.iter().map(|r| r.value).filter(|v| v.is_finite());
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v))))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Serial,
}

struct PointOutcome {
    value: f64,
    converged: bool,
}

fn evaluate(spec: &SweepSpec, values: &[f64]) -> Result<PointOutcome> {
    let mut params = spec.fixed;
    let mut opts = spec.options;
    for (axis, &x) in spec.axes.iter().zip(values) {
        match axis.param {
            AxisParam::Model(p) => params = params.with(p, x)?,
            AxisParam::Tau => opts.tau = x,
            AxisParam::Horizon => opts.horizon = x,
        }
    }
    let done = |value| {
        Ok(PointOutcome {
            value,
            converged: true,
        })
    };
    match spec.metric {
        Metric::NonMarkovianity if spec.sweeps(AxisParam::Tau) => {
            done(non_markovianity_partial(&params, opts.tau, opts.exponent)?)
        }
        Metric::NonMarkovianity => {
            let rep = non_markovianity(&params, opts.horizon, opts.exponent, opts.tol)?;
            Ok(PointOutcome {
                value: rep.n_value,
                converged: rep.converged,
            })
        }
        Metric::QslCorrelated => done(qsl_correlated(&params, opts.tau, opts.convention)?),
        Metric::CoherenceInitial => done(coherence_l1(&reduced_state(&params, 0.0)?)),
        Metric::TraceDistancePair => done(optimal_pair_distance(&params, opts.tau, opts.exponent)?),
    }
}

fn grid_indices(spec: &SweepSpec) -> Vec<Vec<usize>> {
    match spec.axes.as_slice() {
        [a] => (0..a.count).map(|i| vec![i]).collect(),
        [a, b] => (0..a.count)
            .flat_map(|i| (0..b.count).map(move |j| vec![i, j]))
            .collect(),
        _ => Vec::new(),
    }
}

fn resolved_settings(spec: &SweepSpec) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    m.insert("metric".into(), spec.metric.to_string());
    for p in Param::ALL {
        m.insert(p.name().into(), format!("{:e}", spec.fixed.get(p)));
    }
    m.insert("c_e".into(), spec.fixed.c_e().to_string());
    m.insert("c_g".into(), spec.fixed.c_g().to_string());
    m.insert("exponent".into(), spec.options.exponent.to_string());
    m.insert("convention".into(), spec.options.convention.to_string());
    m.insert("horizon".into(), format!("{:e}", spec.options.horizon));
    m.insert("tau".into(), format!("{:e}", spec.options.tau));
    m.insert("tol".into(), format!("{:e}", spec.options.tol));
    m.insert("small_v".into(), spec.fixed.small_v().to_string());
    for (k, a) in spec.axes.iter().enumerate() {
        m.insert(
            format!("axis{}", k + 1),
            format!(
                "{}:{:e}:{:e}:{}:{:?}",
                a.param, a.min, a.max, a.count, a.scale
            )
            .to_lowercase(),
        );
    }
    m
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    run_sweep_with(spec, Execution::Parallel)
}

/// Evaluates every grid point; point failures are recorded in the row.
pub fn run_sweep_with(spec: &SweepSpec, execution: Execution) -> Result<SweepResult> {
    spec.validate()?;
    let axis_values: Vec<Vec<f64>> = spec.axes.iter().map(Axis::values).collect();
    let point = |idx: Vec<usize>| {
        let values: Vec<f64> = idx.iter().zip(&axis_values).map(|(&i, v)| v[i]).collect();
        let (value, converged, error) = match evaluate(spec, &values) {
            Ok(o) => (o.value, o.converged, None),
            Err(e) => (f64::NAN, false, Some(e.to_string())),
        };
        SweepRow {
            indices: idx,
            values,
            value,
            converged,
            error,
        }
    };
    let grid = grid_indices(spec);
    let rows: Vec<SweepRow> = match execution {
        Execution::Parallel => grid.into_par_iter().map(point).collect(),
        Execution::Serial => grid.into_iter().map(point).collect(),
    };
    let timestamp_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Ok(SweepResult {
        spec: spec.clone(),
        rows,
        provenance: Provenance {
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp_unix,
            resolved: resolved_settings(spec),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lambda_axis(count: usize) -> Axis {
        Axis::linear(AxisParam::Model(Param::Lambda), 0.0, 1.0, count)
    }

    fn coherence_spec() -> SweepSpec {
        SweepSpec {
            metric: Metric::CoherenceInitial,
            axes: vec![lambda_axis(11)],
            fixed: ModelParams::default(),
            options: SweepOptions::default(),
        }
    }

    #[test]
    fn axis_values_hit_endpoints() {
        let a = Axis::log(AxisParam::Model(Param::Alpha), 1e-3, 0.2, 61);
        let v = a.values();
        assert_eq!(v.len(), 61);
        assert_eq!(v[0], 1e-3);
        assert_eq!(v[60], 0.2);
        assert!(v.windows(2).all(|w| w[0] < w[1]));
        let ratio = v[1] / v[0];
        assert!((v[31] / v[30] - ratio).abs() < 1e-12);
        let l = lambda_axis(11).values();
        assert!((l[3] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn coherence_sweep_decreases_from_one() {
        let res = run_sweep(&coherence_spec()).unwrap();
        assert_eq!(res.rows.len(), 11);
        assert!((res.rows[0].value - 1.0).abs() < 1e-12);
        assert!(res.rows[10].value < 1e-10);
        assert!(res.rows.windows(2).all(|w| w[1].value <= w[0].value));
        assert!(res.all_converged());
    }

    #[test]
    fn validation_rejects_bad_specs() {
        let mut s = coherence_spec();
        s.axes[0].count = 1;
        assert!(s.validate().is_err());
        let mut s = coherence_spec();
        s.axes[0].min = 1.0;
        assert!(s.validate().is_err());
        let mut s = coherence_spec();
        s.axes[0].scale = Scale::Log;
        assert!(s.validate().is_err());
        let mut s = coherence_spec();
        s.axes.push(lambda_axis(3));
        assert!(s.validate().is_err());
        let mut s = coherence_spec();
        s.axes.clear();
        assert!(s.validate().is_err());
    }

    #[test]
    fn point_failures_are_flagged_not_fatal() {
        // tau = 0 is outside the domain of the QSL
        let spec = SweepSpec {
            metric: Metric::QslCorrelated,
            axes: vec![Axis::linear(AxisParam::Tau, 0.0, 1.0, 3)],
            fixed: ModelParams::default(),
            options: SweepOptions::default(),
        };
        let res = run_sweep(&spec).unwrap();
        assert!(res.rows[0].value.is_nan());
        assert!(!res.rows[0].converged);
        assert!(res.rows[0].error.is_some());
        assert!(res.rows[2].value.is_finite() && res.rows[2].converged);
        assert!(!res.all_converged());
    }

    #[test]
    fn degenerate_axis_gives_equal_rows() {
        let spec = SweepSpec {
            metric: Metric::QslCorrelated,
            axes: vec![Axis::linear(
                AxisParam::Model(Param::Lambda),
                0.25,
                0.25 + 1e-12,
                2,
            )],
            fixed: ModelParams::default(),
            options: SweepOptions::default(),
        };
        let res = run_sweep(&spec).unwrap();
        assert!((res.rows[0].value - res.rows[1].value).abs() < 1e-9);
    }

    #[test]
    fn rows_are_sorted_by_grid_index() {
        let spec = SweepSpec {
            metric: Metric::TraceDistancePair,
            axes: vec![
                Axis::linear(AxisParam::Tau, 0.1, 2.0, 4),
                Axis::linear(AxisParam::Model(Param::Mu), 2.0, 6.0, 3),
            ],
            fixed: ModelParams::default(),
            options: SweepOptions::default(),
        };
        let res = run_sweep(&spec).unwrap();
        assert_eq!(res.rows.len(), 12);
        let idx: Vec<_> = res.rows.iter().map(|r| r.indices.clone()).collect();
        let mut sorted = idx.clone();
        sorted.sort();
        assert_eq!(idx, sorted);
        assert_eq!(res.rows[5].indices, vec![1, 2]);
    }

    #[test]
    fn metric_and_axis_names_parse() {
        for m in [
            "non_markovianity",
            "qsl_correlated",
            "coherence_initial",
            "trace_distance_pair",
        ] {
            assert_eq!(m.parse::<Metric>().unwrap().name(), m);
        }
        assert_eq!("tau".parse::<AxisParam>().unwrap(), AxisParam::Tau);
        assert_eq!(
            "omega_c".parse::<AxisParam>().unwrap(),
            AxisParam::Model(Param::OmegaC)
        );
        assert!("nope".parse::<AxisParam>().is_err());
    }
}
