//! Quantum speed limit bounds built on the relative-purity angle.
//!
//! The generic bounds take time-averaged Schatten norms of `dρ/dt`:
//!
//! ```text
//! τ_ML = max(1/Λ_op, 1/Λ_tr) sin²Θ tr ρ₀²
//! τ_MT = (1/Λ_hs) sin²Θ tr ρ₀²
//! τ_QSL = max(1/Λ_op, 1/Λ_tr, 1/Λ_hs) sin²Θ tr ρ₀²
//! ```
//!
//! For the equal-weight correlated state `½[[1, κ(0)], [κ(0)*, 1]]` the
//! unified bound collapses to a closed expression in `κ`, evaluated by
//! [`qsl_correlated`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::{
    coherence_l1, generator_value, kappa, kappa_dot, reduced_state, Matrix2, QubitDensityMatrix,
};
use crate::error::{Error, Result};
use crate::kernels::ModelParams;
use crate::quadrature::Quadrature;

const ABS_TOL: f64 = 1e-10;
const REL_TOL: f64 = 1e-12;

/// How the specialised correlated-state bound is normalised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `(C₀² - C₀ Re κ(τ)) / ∫₀^τ |κ̇| dt`
    #[default]
    AsPrinted,
    /// The same times `τ`; equal to the unified bound of the generic pipeline.
    DerivedWithTauFactor,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::AsPrinted => "as-printed",
            Convention::DerivedWithTauFactor => "with-tau-factor",
        })
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "as-printed" | "as_printed" => Ok(Convention::AsPrinted),
            "with-tau-factor" | "with_tau_factor" | "derived_with_tau_factor" => {
                Ok(Convention::DerivedWithTauFactor)
            }
            other => Err(Error::domain(
                "convention",
                format!("expected `as-printed` or `with-tau-factor`, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Op,
    Tr,
    Hs,
}

/// Operator, trace and Hilbert-Schmidt norms of one matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatrixNorms {
    pub op: f64,
    pub tr: f64,
    pub hs: f64,
}

impl MatrixNorms {
    pub fn get(&self, which: NormKind) -> f64 {
        match which {
            NormKind::Op => self.op,
            NormKind::Tr => self.tr,
            NormKind::Hs => self.hs,
        }
    }
}

/// Singular values `σ₁ ≥ σ₂ ≥ 0` of a 2×2 complex matrix.
///
/// From `σ₁² + σ₂² = ‖M‖_F²` and `σ₁σ₂ = |det M|`:
/// `σ₁ ± σ₂ = sqrt(‖M‖_F² ± 2|det M|)`.
pub fn singular_values(m: &Matrix2) -> (f64, f64) {
    let frob2: f64 = m.iter().flatten().map(|z| z.norm_sqr()).sum();
    let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).norm();
    let sum = (frob2 + 2.0 * det).sqrt();
    let diff = (frob2 - 2.0 * det).max(0.0).sqrt();
    (0.5 * (sum + diff), (0.5 * (sum - diff)).max(0.0))
}

pub fn matrix_norms(m: &Matrix2) -> MatrixNorms {
    let (s1, s2) = singular_values(m);
    MatrixNorms {
        op: s1,
        tr: s1 + s2,
        hs: s1.hypot(s2),
    }
}

/// `tr[ρ₀ ρ_t]`
fn overlap(a: &QubitDensityMatrix, b: &QubitDensityMatrix) -> f64 {
    a.p_ee * b.p_ee + a.p_gg() * b.p_gg() + 2.0 * (a.coh * b.coh.conj()).re
}

/// Relative-purity angle `Θ = arccos sqrt(tr[ρ₀ρ_t] / tr[ρ₀²])`.
pub fn relative_purity_angle(rho0: &QubitDensityMatrix, rhot: &QubitDensityMatrix) -> Result<f64> {
    if !rho0.is_valid() || !rhot.is_valid() {
        return Err(Error::domain(
            "relative_purity_angle",
            "states must be valid density matrices",
        ));
    }
    let purity = rho0.purity();
    if purity.is_nan() || purity <= 0.0 {
        return Err(Error::domain(
            "relative_purity_angle",
            "initial state has zero purity",
        ));
    }
    let ratio = (overlap(rho0, rhot) / purity).clamp(0.0, 1.0);
    Ok(ratio.sqrt().acos())
}

/// `sin²Θ tr ρ₀² = tr ρ₀² - tr[ρ₀ρ_t]`, written as `tr[ρ₀(ρ₀ - ρ_t)]`
/// so it keeps relative accuracy when the two states nearly coincide.
pub fn purity_deficit(rho0: &QubitDensityMatrix, rhot: &QubitDensityMatrix) -> f64 {
    let dp = rho0.p_ee - rhot.p_ee;
    let dc = rho0.coh - rhot.coh;
    dp * (2.0 * rho0.p_ee - 1.0) + 2.0 * (rho0.coh * dc.conj()).re
}

fn time_quadrature(params: &ModelParams) -> Quadrature {
    let q = Quadrature::with_tolerance(ABS_TOL, REL_TOL);
    let w0 = params.omega_0();
    if w0 > 0.0 {
        // a quarter period of the e^(-2iω₀t) rotation
        q.with_max_panel(std::f64::consts::PI / (8.0 * w0))
    } else {
        q
    }
}

fn check_tau(op: &'static str, tau: f64) -> Result<()> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::domain(
            op,
            format!("driving time must be finite and > 0, got {tau}"),
        ));
    }
    Ok(())
}

/// Time average `(1/τ) ∫₀^τ ‖dρ/dt‖ dt` of one norm of the generator.
pub fn averaged_norm(params: &ModelParams, tau: f64, which: NormKind) -> Result<f64> {
    check_tau("averaged_norm", tau)?;
    let quad = time_quadrature(params);
    let integral = quad.integrate(
        |t| {
            let g = generator_value(params, t).expect("t lies in [0, tau]");
            matrix_norms(&g).get(which)
        },
        0.0,
        tau,
    )?;
    Ok(integral.value / tau)
}

/// All three averaged norms.
pub fn averaged_norms(params: &ModelParams, tau: f64) -> Result<MatrixNorms> {
    Ok(MatrixNorms {
        op: averaged_norm(params, tau, NormKind::Op)?,
        tr: averaged_norm(params, tau, NormKind::Tr)?,
        hs: averaged_norm(params, tau, NormKind::Hs)?,
    })
}

/// `deficit / Λ`, taking a frozen trajectory (Λ = 0, deficit = 0) to zero.
fn bound(deficit: f64, lambda: f64) -> f64 {
    if deficit == 0.0 {
        0.0
    } else {
        deficit / lambda
    }
}

struct GenericBounds {
    theta: f64,
    norms: MatrixNorms,
    ml: f64,
    mt: f64,
    unified: f64,
}

fn generic_bounds(params: &ModelParams, tau: f64) -> Result<GenericBounds> {
    check_tau("qsl", tau)?;
    let rho0 = reduced_state(params, 0.0)?;
    let rhot = reduced_state(params, tau)?;
    let deficit = purity_deficit(&rho0, &rhot);
    let norms = averaged_norms(params, tau)?;
    let ml = bound(deficit, norms.op).max(bound(deficit, norms.tr));
    let mt = bound(deficit, norms.hs);
    Ok(GenericBounds {
        theta: relative_purity_angle(&rho0, &rhot)?,
        norms,
        ml,
        mt,
        unified: ml.max(mt),
    })
}

pub fn qsl_ml(params: &ModelParams, tau: f64) -> Result<f64> {
    Ok(generic_bounds(params, tau)?.ml)
}

pub fn qsl_mt(params: &ModelParams, tau: f64) -> Result<f64> {
    Ok(generic_bounds(params, tau)?.mt)
}

pub fn qsl_unified(params: &ModelParams, tau: f64) -> Result<f64> {
    Ok(generic_bounds(params, tau)?.unified)
}

/// `∫₀^τ |κ̇(t)| dt`
pub fn kappa_dot_integral(params: &ModelParams, tau: f64) -> Result<f64> {
    check_tau("kappa_dot_integral", tau)?;
    let quad = time_quadrature(params);
    Ok(quad
        .integrate(
            |t| kappa_dot(params, t).expect("t lies in [0, tau]").norm(),
            0.0,
            tau,
        )?
        .value)
}

/// Correlated-state bound written through the initial coherence `C(ρ₀)`.
pub fn qsl_correlated_from_coherence(
    coherence: f64,
    params: &ModelParams,
    tau: f64,
    convention: Convention,
) -> Result<f64> {
    check_tau("qsl_correlated", tau)?;
    if !params.has_equal_amplitudes() {
        return Err(Error::domain(
            "qsl_correlated",
            "requires c_e = c_g = 1/sqrt(2); use the generic bounds otherwise",
        ));
    }
    let numerator = coherence * coherence - coherence * kappa(params, tau)?.re;
    let integral = kappa_dot_integral(params, tau)?;
    let value = if numerator == 0.0 {
        0.0
    } else {
        numerator / integral
    };
    Ok(match convention {
        Convention::AsPrinted => value,
        Convention::DerivedWithTauFactor => tau * value,
    })
}

/// Correlated-state bound with `C₀ = |κ_λ(0)|`.
pub fn qsl_correlated(params: &ModelParams, tau: f64, convention: Convention) -> Result<f64> {
    let k0 = kappa(params, 0.0)?;
    // Φ(0) = 0 makes κ(0) real and positive, so |κ₀| Re κ_τ = Re[κ₀* κ_τ].
    assert!(
        k0.im == 0.0 && k0.re > 0.0,
        "κ(0) must be real positive, got {k0}"
    );
    qsl_correlated_from_coherence(k0.norm(), params, tau, convention)
}

/// True when the τ-scaled correlated bound equals the generic unified
/// bound within 1e-8 relative.
pub fn qsl_consistency_check(params: &ModelParams, tau: f64) -> Result<bool> {
    let special = qsl_correlated(params, tau, Convention::DerivedWithTauFactor)?;
    let generic = qsl_unified(params, tau)?;
    Ok(agree(special, generic))
}

fn agree(a: f64, b: f64) -> bool {
    let scale = a.abs().max(b.abs());
    scale == 0.0 || (a - b).abs() <= 1e-8 * scale
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QslReport {
    pub tau: f64,
    pub theta: f64,
    pub lambda_op: f64,
    pub lambda_tr: f64,
    pub lambda_hs: f64,
    pub tau_ml: f64,
    pub tau_mt: f64,
    pub tau_unified: f64,
    /// `None` unless the amplitudes are `1/sqrt(2)`.
    pub tau_correlated: Option<f64>,
    pub convention: Convention,
    pub coherence_initial: f64,
    /// Agreement of the τ-scaled correlated bound with `tau_unified`.
    pub consistent: Option<bool>,
}

pub fn qsl_report(params: &ModelParams, tau: f64, convention: Convention) -> Result<QslReport> {
    let g = generic_bounds(params, tau)?;
    let (tau_correlated, consistent) = if params.has_equal_amplitudes() {
        let value = qsl_correlated(params, tau, convention)?;
        let scaled = match convention {
            Convention::AsPrinted => tau * value,
            Convention::DerivedWithTauFactor => value,
        };
        (Some(value), Some(agree(scaled, g.unified)))
    } else {
        (None, None)
    };
    Ok(QslReport {
        tau,
        theta: g.theta,
        lambda_op: g.norms.op,
        lambda_tr: g.norms.tr,
        lambda_hs: g.norms.hs,
        tau_ml: g.ml,
        tau_mt: g.mt,
        tau_unified: g.unified,
        tau_correlated,
        convention,
        coherence_initial: coherence_l1(&reduced_state(params, 0.0)?),
        consistent,
    })
}
