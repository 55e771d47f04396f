use std::f64::consts::PI;

use super::{KernelValues, ModelParams};
use crate::error::{check_time, Error, Result};
use crate::quadrature::Quadrature;

/// Absolute tolerance per frequency integral.
const ABS_TOL: f64 = 1e-9;
const REL_TOL: f64 = 1e-13;

fn spectral_density(p: &ModelParams, w: f64) -> f64 {
    p.alpha().sqrt() * w.powf(0.5 * (p.mu() - 1.0)) * (-0.5 * w / p.omega_c()).exp()
}

fn state_function(p: &ModelParams, w: f64) -> f64 {
    w.powf(0.5 * (p.v() - 1.0)) * (-0.5 * w / p.omega_c()).exp()
}

/// `1 - cos x` without cancellation.
fn one_minus_cos(x: f64) -> f64 {
    let h = (0.5 * x).sin();
    2.0 * h * h
}

/// Upper frequency cut for an integrand bounded by `scale * ω^power * e^(-ω/ω_c)`.
///
/// Uses `∫_W^∞ ω^p e^(-ω/ω_c) dω ≤ 2 W^p ω_c e^(-W/ω_c)` for `W ≥ 2 p ω_c`,
/// stepping `W` until the tail is below half the tolerance. `W` never
/// exceeds `ω_c max(50, 50 (μ + v))`.
fn frequency_cut(p: &ModelParams, power: f64, scale: f64) -> Result<f64> {
    let wc = p.omega_c();
    let cap = wc * 50.0_f64.max(50.0 * (p.mu() + p.v()));
    let tail = |w: f64| 2.0 * scale * wc * (power * w.ln() - w / wc).exp();
    let mut w = wc * 10.0_f64.max(2.0 * power);
    while w < cap {
        if tail(w) < 0.5 * ABS_TOL {
            return Ok(w);
        }
        w += wc;
    }
    if tail(cap) < 0.5 * ABS_TOL {
        Ok(cap)
    } else {
        Err(Error::NonConvergence {
            what: "kernel quadrature",
            detail: format!("tail bound {:.3e} at the frequency cap {cap}", tail(cap)),
        })
    }
}

/// Kernels evaluated by adaptive quadrature of their defining integrals.
///
/// Derivatives come from differentiating under the integral sign. The
/// vacuum term `½ ∫ f²` is integrated after the change of variables
/// `u = ω^v`, which removes its `ω^(v-1)` endpoint singularity.
pub fn kernel_quadrature(params: &ModelParams, t: f64) -> Result<KernelValues> {
    check_time("kernel_quadrature", t)?;
    let p = params;
    let sa = p.alpha().sqrt();
    let mu = p.mu();
    let chi = p.chi();

    let mut quad = Quadrature::with_tolerance(0.5 * ABS_TOL, REL_TOL);
    if t > 0.0 {
        quad = quad.with_max_panel(PI / (4.0 * t));
    }

    let jj = |w: f64| {
        let j = spectral_density(p, w);
        j * j
    };
    let jf = |w: f64| spectral_density(p, w) * state_function(p, w);

    let cut = |power: f64, scale: f64| frequency_cut(p, power, scale);

    let w = cut(mu - 1.0, 8.0 * p.alpha())?;
    let r = quad.integrate(|x| 4.0 * jj(x) * one_minus_cos(x * t), 0.0, w)?;
    let w = cut(mu, 4.0 * p.alpha())?;
    let r_dot = quad.integrate(|x| 4.0 * jj(x) * x * (x * t).sin(), 0.0, w)?;

    let w = cut(chi - 1.0, 4.0 * sa)?;
    let s_bath = quad.integrate(|x| 2.0 * jf(x) * one_minus_cos(x * t), 0.0, w)?;
    let phi = quad.integrate(|x| jf(x) * (x * t).sin(), 0.0, w)?;
    let w = cut(chi, 2.0 * sa)?;
    let s_dot = quad.integrate(|x| 2.0 * jf(x) * x * (x * t).sin(), 0.0, w)?;
    let phi_dot = quad.integrate(|x| jf(x) * x * (x * t).cos(), 0.0, w)?;

    // ½ ∫ f² dω = (1 / 2v) ∫ e^(-u^(1/v) / ω_c) du over u = ω^v.
    let v = p.v();
    let w = cut(v - 1.0, 0.5)?;
    let vac = Quadrature::with_tolerance(v * ABS_TOL, REL_TOL).integrate(
        |u| (-u.powf(1.0 / v) / p.omega_c()).exp(),
        0.0,
        w.powf(v),
    )?;

    Ok(KernelValues {
        t,
        r: r.value,
        s: s_bath.value - 0.5 * vac.value / v,
        phi: phi.value,
        r_dot: r_dot.value,
        s_dot: s_dot.value,
        phi_dot: phi_dot.value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::kernel_closed_form;

    #[test]
    fn figure_parameters_match_closed_form() {
        let p = ModelParams::default();
        let q = kernel_quadrature(&p, 1.0).unwrap();
        let c = kernel_closed_form(&p, 1.0).unwrap();
        assert!((q.r - c.r).abs() < 1e-6, "{} vs {}", q.r, c.r);
        assert!((q.r - 1.08).abs() < 1e-6);
        assert!((q.s - c.s).abs() < 1e-6);
        assert!((q.phi - c.phi).abs() < 1e-6);
    }

    #[test]
    fn time_zero_has_no_decay_or_phase() {
        let p = ModelParams::new(0.1, 2.0, 0.5, 1.0, 1.0, 0.0).unwrap();
        let q = kernel_quadrature(&p, 0.0).unwrap();
        assert_eq!(q.r, 0.0);
        assert_eq!(q.phi, 0.0);
    }

    #[test]
    fn decay_is_linear_in_coupling() {
        let a = ModelParams::new(0.01, 5.0, 0.01, 1.0, 1.0, 0.0).unwrap();
        let b = a.with(crate::Param::Alpha, 0.04).unwrap();
        for &t in &[0.4, 1.0, 3.0] {
            let ra = kernel_quadrature(&a, t).unwrap().r;
            let rb = kernel_quadrature(&b, t).unwrap().r;
            // exact up to the 1e-9 per-integral tolerance
            assert!((rb - 4.0 * ra).abs() < 4e-9, "t = {t}: ratio {}", rb / ra);
        }
    }

    #[test]
    fn rejects_negative_time() {
        assert!(kernel_quadrature(&ModelParams::default(), -1.0).is_err());
    }
}
