use std::fmt;
use std::str::FromStr;

use super::{Axis, AxisParam, Metric, SweepOptions, SweepSpec};
use crate::error::{Error, Result};
use crate::kernels::{ModelParams, Param};

/// Named grids for the standard parameter studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigureId {
    Fig1a,
    Fig1b,
    Fig2a,
    Fig2b,
    Fig3a,
    Fig3b,
    Fig4a,
    Fig4b,
    Fig5a,
    Fig5b,
    Fig6a,
    Fig6b,
    Fig7a,
    Fig7b,
}

impl FigureId {
    pub const ALL: [FigureId; 14] = [
        FigureId::Fig1a,
        FigureId::Fig1b,
        FigureId::Fig2a,
        FigureId::Fig2b,
        FigureId::Fig3a,
        FigureId::Fig3b,
        FigureId::Fig4a,
        FigureId::Fig4b,
        FigureId::Fig5a,
        FigureId::Fig5b,
        FigureId::Fig6a,
        FigureId::Fig6b,
        FigureId::Fig7a,
        FigureId::Fig7b,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig1a => "fig1a",
            FigureId::Fig1b => "fig1b",
            FigureId::Fig2a => "fig2a",
            FigureId::Fig2b => "fig2b",
            FigureId::Fig3a => "fig3a",
            FigureId::Fig3b => "fig3b",
            FigureId::Fig4a => "fig4a",
            FigureId::Fig4b => "fig4b",
            FigureId::Fig5a => "fig5a",
            FigureId::Fig5b => "fig5b",
            FigureId::Fig6a => "fig6a",
            FigureId::Fig6b => "fig6b",
            FigureId::Fig7a => "fig7a",
            FigureId::Fig7b => "fig7b",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::UnknownFigure(s.to_string()))
    }
}

const LINE: usize = 101;
const MAP: usize = 61;

fn alpha_axis(count: usize) -> Axis {
    Axis::log(AxisParam::Model(Param::Alpha), 1e-3, 0.2, count)
}

fn mu_axis(count: usize) -> Axis {
    Axis::linear(AxisParam::Model(Param::Mu), 1.0, 8.0, count)
}

fn tau_axis(count: usize) -> Axis {
    Axis::linear(AxisParam::Tau, 0.01, 3.0, count)
}

fn lambda_axis(count: usize) -> Axis {
    Axis::linear(AxisParam::Model(Param::Lambda), 0.0, 1.0, count)
}

/// The two curves μ = 5 and μ = 8.
fn mu_pair() -> Axis {
    Axis::linear(AxisParam::Model(Param::Mu), 5.0, 8.0, 2)
}

/// The four curves λ = 0.25, 0.5, 0.75, 1.
fn lambda_family() -> Axis {
    Axis::linear(AxisParam::Model(Param::Lambda), 0.25, 1.0, 4)
}

fn fixed(mu: f64, lambda: f64) -> ModelParams {
    ModelParams::new(0.01, mu, 0.01, 1.0, 1.0, lambda).expect("preset parameters are valid")
}

fn spec(metric: Metric, axes: Vec<Axis>, fixed: ModelParams) -> SweepSpec {
    SweepSpec {
        metric,
        axes,
        fixed,
        options: SweepOptions::default(),
    }
}

/// Sweep reproducing one of the standard parameter studies.
///
/// Every preset holds α = v = 0.01 and ω_c = ω₀ = 1 unless swept, uses 101
/// points on a continuous 1-D axis and 61 × 61 on 2-D maps. Curve families
/// (two μ values or four λ values) are a short second axis.
pub fn figure_preset(id: &str) -> Result<SweepSpec> {
    use Metric::*;
    let id: FigureId = id.parse()?;
    Ok(match id {
        FigureId::Fig1a => spec(
            NonMarkovianity,
            vec![alpha_axis(MAP), mu_axis(MAP)],
            fixed(5.0, 0.0),
        ),
        FigureId::Fig1b => spec(
            NonMarkovianity,
            vec![
                alpha_axis(MAP),
                Axis::linear(AxisParam::Model(Param::V), 0.01, 1.0, MAP),
            ],
            fixed(5.0, 0.0),
        ),
        FigureId::Fig2a => spec(QslCorrelated, vec![mu_axis(LINE)], fixed(5.0, 0.25)),
        FigureId::Fig2b => spec(NonMarkovianity, vec![mu_axis(LINE)], fixed(5.0, 0.0)),
        FigureId::Fig3a => spec(
            QslCorrelated,
            vec![tau_axis(LINE), mu_pair()],
            fixed(5.0, 0.25),
        ),
        FigureId::Fig3b => spec(
            NonMarkovianity,
            vec![tau_axis(LINE), mu_pair()],
            fixed(5.0, 0.0),
        ),
        FigureId::Fig4a => spec(
            QslCorrelated,
            vec![tau_axis(LINE), lambda_family()],
            fixed(8.0, 0.25),
        ),
        FigureId::Fig4b => spec(
            QslCorrelated,
            vec![tau_axis(LINE), lambda_family()],
            fixed(5.0, 0.25),
        ),
        FigureId::Fig5a => spec(
            QslCorrelated,
            vec![lambda_axis(LINE), mu_pair()],
            fixed(5.0, 0.0),
        ),
        FigureId::Fig5b => spec(CoherenceInitial, vec![lambda_axis(LINE)], fixed(5.0, 0.0)),
        FigureId::Fig6a => spec(QslCorrelated, vec![alpha_axis(LINE)], fixed(5.0, 0.25)),
        FigureId::Fig6b => spec(NonMarkovianity, vec![alpha_axis(LINE)], fixed(5.0, 0.0)),
        FigureId::Fig7a => spec(
            QslCorrelated,
            vec![alpha_axis(MAP), tau_axis(MAP)],
            fixed(8.0, 0.25),
        ),
        FigureId::Fig7b => spec(
            QslCorrelated,
            vec![alpha_axis(MAP), tau_axis(MAP)],
            fixed(5.0, 0.25),
        ),
    })
}
