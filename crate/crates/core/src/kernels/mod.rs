//! Decoherence kernels `r(t)`, `s(t)` and `Φ(t)` of the super-ohmic bath.
//!
//! The bath enters through the effective spectral density
//! `J(ω) = sqrt(α) ω^((μ-1)/2) e^(-ω/2ω_c)` and the state function
//! `f(ω) = ω^((v-1)/2) e^(-ω/2ω_c)`. The kernels are
//!
//! ```text
//! r(t) = 4 ∫ J²(ω) [1 - cos ωt] dω
//! s(t) = 2 ∫ J(ω) f(ω) [1 - cos ωt] dω - ½ ∫ f²(ω) dω
//! Φ(t) =   ∫ J(ω) f(ω) sin ωt dω
//! ```
//!
//! [`kernel_closed_form`] evaluates them through the gamma-function closed
//! forms; [`kernel_quadrature`] integrates the definitions directly and is
//! kept as an independent check on the closed forms.

mod gamma;
mod integral;
mod params;

pub use gamma::gamma;
pub use integral::kernel_quadrature;
pub use params::{ModelParams, Param, SMALL_V_THRESHOLD};

pub(crate) use gamma::gamma_unchecked;

use serde::{Deserialize, Serialize};

use crate::error::{check_time, Result};

/// Kernel values and their time derivatives at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelValues {
    pub t: f64,
    pub r: f64,
    pub s: f64,
    pub phi: f64,
    pub r_dot: f64,
    pub s_dot: f64,
    pub phi_dot: f64,
}

/// `(1 - cos(pθ) q^(-p/2), sin(pθ) q^(-p/2))` with `ln q` supplied, written
/// so the first component keeps full relative accuracy near `t = 0`.
fn envelope(p: f64, theta: f64, ln_q: f64) -> (f64, f64) {
    let decay = (-0.5 * p * ln_q).exp();
    let half = (0.5 * p * theta).sin();
    let one_minus = 2.0 * half * half - (p * theta).cos() * (-0.5 * p * ln_q).exp_m1();
    (one_minus, (p * theta).sin() * decay)
}

/// `s(0) = -½ ω_c^v Γ(v)`, the log of the vacuum overlap `<Ω₀|D(f)|Ω₀>`.
pub fn s_at_zero(params: &ModelParams) -> f64 {
    -0.5 * params.omega_c().powf(params.v()) * gamma_unchecked(params.v())
}

/// Closed-form kernels and their analytic time derivatives.
pub fn kernel_closed_form(params: &ModelParams, t: f64) -> Result<KernelValues> {
    check_time("kernel_closed_form", t)?;
    let wc = params.omega_c();
    let mu = params.mu();
    let chi = params.chi();
    let alpha = params.alpha();
    let sqrt_alpha = alpha.sqrt();

    let x = wc * t;
    let theta = x.atan();
    let ln_q = (x * x).ln_1p();

    let r_amp = 4.0 * alpha * wc.powf(mu) * gamma_unchecked(mu);
    let chi_amp = sqrt_alpha * wc.powf(chi) * gamma_unchecked(chi);
    let (r_env, _) = envelope(mu, theta, ln_q);
    let (s_env, phi_env) = envelope(chi, theta, ln_q);

    // Derivatives: the integrands pick up one power of ω, hence p -> p + 1.
    let r_dot_amp = 4.0 * alpha * wc.powf(mu + 1.0) * gamma_unchecked(mu + 1.0);
    let chi_dot_amp = sqrt_alpha * wc.powf(chi + 1.0) * gamma_unchecked(chi + 1.0);
    let decay_mu1 = (-0.5 * (mu + 1.0) * ln_q).exp();
    let decay_chi1 = (-0.5 * (chi + 1.0) * ln_q).exp();

    Ok(KernelValues {
        t,
        r: r_amp * r_env,
        s: 2.0 * chi_amp * s_env + s_at_zero(params),
        phi: chi_amp * phi_env,
        r_dot: r_dot_amp * ((mu + 1.0) * theta).sin() * decay_mu1,
        s_dot: 2.0 * chi_dot_amp * ((chi + 1.0) * theta).sin() * decay_chi1,
        phi_dot: chi_dot_amp * ((chi + 1.0) * theta).cos() * decay_chi1,
    })
}

/// `dr/dt` alone; used by the interval scans.
pub(crate) fn r_dot(params: &ModelParams, t: f64) -> f64 {
    let wc = params.omega_c();
    let mu = params.mu();
    let x = wc * t;
    let amp = 4.0 * params.alpha() * wc.powf(mu + 1.0) * gamma_unchecked(mu + 1.0);
    amp * ((mu + 1.0) * x.atan()).sin() * (-0.5 * (mu + 1.0) * (x * x).ln_1p()).exp()
}

/// `r(t)` alone.
pub(crate) fn r_only(params: &ModelParams, t: f64) -> f64 {
    let wc = params.omega_c();
    let mu = params.mu();
    let x = wc * t;
    let amp = 4.0 * params.alpha() * wc.powf(mu) * gamma_unchecked(mu);
    amp * envelope(mu, x.atan(), (x * x).ln_1p()).0
}
