//! Exact reduced state of the qubit.
//!
//! With the initial state `c_e|e>|Ω₀> + c_g|g>|Ω_λ>`, populations are frozen
//! and the coherence is multiplied by the decoherence factor
//!
//! ```text
//! κ_λ(t) = η_λ⁻¹ e^(-2iω₀t) e^(-r(t)) [1 - λ + λ e^(s(t)) e^(-2iΦ(t))]
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_time, Result};
use crate::kernels::{kernel_closed_form, s_at_zero, KernelValues, ModelParams};

/// A 2×2 complex matrix in row-major order.
pub type Matrix2 = [[Complex64; 2]; 2];

const PSD_SLACK: f64 = 1e-12;

/// Qubit density matrix `[[p_ee, coh], [conj(coh), 1 - p_ee]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitDensityMatrix {
    pub p_ee: f64,
    pub coh: Complex64,
}

impl QubitDensityMatrix {
    pub fn new(p_ee: f64, coh: Complex64) -> Self {
        QubitDensityMatrix { p_ee, coh }
    }

    /// `|e><e|`
    pub fn excited() -> Self {
        Self::new(1.0, Complex64::new(0.0, 0.0))
    }

    /// `|g><g|`
    pub fn ground() -> Self {
        Self::new(0.0, Complex64::new(0.0, 0.0))
    }

    /// `|±><±|` with `|±> = (|e> ± |g>)/sqrt(2)`.
    pub fn plus() -> Self {
        Self::new(0.5, Complex64::new(0.5, 0.0))
    }

    pub fn minus() -> Self {
        Self::new(0.5, Complex64::new(-0.5, 0.0))
    }

    pub fn p_gg(&self) -> f64 {
        1.0 - self.p_ee
    }

    pub fn matrix(&self) -> Matrix2 {
        [
            [Complex64::new(self.p_ee, 0.0), self.coh],
            [self.coh.conj(), Complex64::new(self.p_gg(), 0.0)],
        ]
    }

    /// `tr ρ²`
    pub fn purity(&self) -> f64 {
        self.p_ee * self.p_ee + self.p_gg() * self.p_gg() + 2.0 * self.coh.norm_sqr()
    }

    /// Finite, populations in [0, 1] and `|coh|² ≤ p_ee (1 - p_ee) + 1e-12`.
    pub fn is_valid(&self) -> bool {
        self.p_ee.is_finite()
            && self.coh.re.is_finite()
            && self.coh.im.is_finite()
            && (0.0..=1.0).contains(&self.p_ee)
            && self.coh.norm_sqr() <= self.p_ee * self.p_gg() + PSD_SLACK
    }

    /// Eigenvalues, smallest first.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let d = 0.5 * (self.p_ee - self.p_gg());
        let rad = (d * d + self.coh.norm_sqr()).sqrt();
        [0.5 - rad, 0.5 + rad]
    }
}

/// Normalisation `η_λ` of the correlated bath state `|Ω_λ>`.
///
/// The vacuum overlap `<Ω₀|D(f)|Ω₀> = exp(-½∫f²) = exp(s(0))` is real, so
/// `η_λ² = (1-λ)² + λ² + 2λ(1-λ) exp(s(0))`.
pub fn eta(params: &ModelParams) -> f64 {
    let lam = params.lambda();
    let overlap = s_at_zero(params).exp();
    ((1.0 - lam).powi(2) + lam * lam + 2.0 * lam * (1.0 - lam) * overlap).sqrt()
}

fn kappa_parts(params: &ModelParams, k: &KernelValues) -> (Complex64, Complex64, Complex64) {
    let lam = params.lambda();
    let w0 = params.omega_0();
    // e^(s - 2iΦ); exp underflows cleanly to zero for small v.
    let bath = Complex64::from_polar(k.s.exp(), -2.0 * k.phi);
    let bracket = Complex64::new(1.0 - lam, 0.0) + lam * bath;
    let prefactor = Complex64::from_polar((-k.r).exp() / eta(params), -2.0 * w0 * k.t);
    (prefactor, bracket, bath)
}

/// Decoherence factor `κ_λ(t)`.
pub fn kappa(params: &ModelParams, t: f64) -> Result<Complex64> {
    check_time("kappa", t)?;
    let k = kernel_closed_form(params, t)?;
    let (prefactor, bracket, _) = kappa_parts(params, &k);
    Ok(prefactor * bracket)
}

/// Time derivative `dκ_λ/dt` from the analytic kernel derivatives.
pub fn kappa_dot(params: &ModelParams, t: f64) -> Result<Complex64> {
    check_time("kappa_dot", t)?;
    let k = kernel_closed_form(params, t)?;
    Ok(kappa_dot_from(params, &k))
}

fn kappa_dot_from(params: &ModelParams, k: &KernelValues) -> Complex64 {
    let (prefactor, bracket, bath) = kappa_parts(params, k);
    let lam = params.lambda();
    let rate = Complex64::new(-k.r_dot, -2.0 * params.omega_0());
    let bath_rate = Complex64::new(k.s_dot, -2.0 * k.phi_dot);
    prefactor * (rate * bracket + lam * bath_rate * bath)
}

/// `(κ, dκ/dt)` from a single kernel evaluation.
pub fn kappa_with_derivative(params: &ModelParams, t: f64) -> Result<(Complex64, Complex64)> {
    check_time("kappa_with_derivative", t)?;
    let k = kernel_closed_form(params, t)?;
    let (prefactor, bracket, _) = kappa_parts(params, &k);
    Ok((prefactor * bracket, kappa_dot_from(params, &k)))
}

/// Reduced density matrix `ρ_S^λ(t)`.
pub fn reduced_state(params: &ModelParams, t: f64) -> Result<QubitDensityMatrix> {
    let kap = kappa(params, t)?;
    let (ce, cg) = (params.c_e(), params.c_g());
    Ok(QubitDensityMatrix::new(ce.norm_sqr(), ce * cg.conj() * kap))
}

/// Equal-weight initial state `½[[1, κ_λ(0)], [κ_λ(0)*, 1]]`.
pub fn correlated_initial_state(params: &ModelParams) -> Result<QubitDensityMatrix> {
    Ok(QubitDensityMatrix::new(0.5, 0.5 * kappa(params, 0.0)?))
}

/// `dρ_S/dt`: zero diagonal, off-diagonal `c_e c_g* dκ/dt`.
pub fn generator_value(params: &ModelParams, t: f64) -> Result<Matrix2> {
    let kd = kappa_dot(params, t)?;
    let off = params.c_e() * params.c_g().conj() * kd;
    let zero = Complex64::new(0.0, 0.0);
    Ok([[zero, off], [off.conj(), zero]])
}

/// l1-norm of coherence, the sum of the off-diagonal moduli.
pub fn coherence_l1(state: &QubitDensityMatrix) -> f64 {
    2.0 * state.coh.norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::Param;
    use approx::assert_relative_eq;

    fn fig(lambda: f64) -> ModelParams {
        ModelParams::default().with(Param::Lambda, lambda).unwrap()
    }

    #[test]
    fn eta_limits() {
        assert_eq!(eta(&fig(0.0)), 1.0);
        assert_eq!(eta(&fig(1.0)), 1.0);
        // e^(s(0)) ≈ e^(-49.7) is negligible at v = 0.01
        assert_relative_eq!(eta(&fig(0.5)), 0.5_f64.sqrt(), max_relative = 1e-15);
        let p = ModelParams::new(0.01, 5.0, 1.0, 1.0, 1.0, 0.5).unwrap();
        let o = (-0.5_f64).exp();
        assert_relative_eq!(eta(&p), (0.5 + 0.5 * o).sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn kappa_without_correlation() {
        let p = fig(0.0);
        assert_eq!(kappa(&p, 0.0).unwrap(), Complex64::new(1.0, 0.0));
        for &t in &[0.3, 1.0, 4.0] {
            let r = kernel_closed_form(&p, t).unwrap().r;
            assert_relative_eq!(
                kappa(&p, t).unwrap().norm(),
                (-r).exp(),
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn kappa_with_correlation_at_unit_time() {
        let p = fig(0.25);
        let k = kappa(&p, 1.0).unwrap();
        let expect = 0.75 / (0.75_f64.powi(2) + 0.0625).sqrt() * (-1.08_f64).exp();
        assert_relative_eq!(k.norm(), expect, max_relative = 1e-11);
        assert_relative_eq!(
            0.75 / 0.625_f64.sqrt(),
            0.948_683_298_050_513_8,
            max_relative = 1e-15
        );
    }

    #[test]
    fn kappa_dot_special_cases() {
        let p = ModelParams::new(0.0, 3.0, 0.2, 1.0, 1.5, 0.0).unwrap();
        for &t in &[0.0, 0.4, 3.0] {
            assert_relative_eq!(kappa_dot(&p, t).unwrap().norm(), 3.0, max_relative = 1e-14);
        }
        let p = ModelParams::new(0.02, 3.0, 0.2, 1.0, 0.0, 0.0).unwrap();
        for &t in &[0.4, 3.0] {
            let k = kernel_closed_form(&p, t).unwrap();
            let kd = kappa_dot(&p, t).unwrap();
            assert_eq!(kd.im, 0.0);
            assert_relative_eq!(kd.re, -k.r_dot * (-k.r).exp(), max_relative = 1e-14);
        }
    }

    #[test]
    fn kappa_dot_matches_finite_difference() {
        let p = fig(0.25);
        let h = 1e-5;
        let fd = (kappa(&p, 1.0 + h).unwrap() - kappa(&p, 1.0 - h).unwrap()) / (2.0 * h);
        let kd = kappa_dot(&p, 1.0).unwrap();
        assert!((fd - kd).norm() / kd.norm() < 1e-5);
    }

    #[test]
    fn reduced_state_cases() {
        let p = fig(0.3)
            .with_amplitudes(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
            .unwrap();
        let s = reduced_state(&p, 2.0).unwrap();
        assert_eq!(s.p_ee, 1.0);
        assert_eq!(s.coh, Complex64::new(0.0, 0.0));

        let s = reduced_state(&fig(0.0), 0.0).unwrap();
        assert_relative_eq!(s.p_ee, 0.5, max_relative = 1e-15);
        assert_relative_eq!(s.coh.re, 0.5, max_relative = 1e-15);

        // κ(0) = (1-λ)/sqrt((1-λ)² + λ²) once e^(s(0)) has underflowed
        let s = reduced_state(&fig(0.25), 0.0).unwrap();
        assert_relative_eq!(
            s.coh.re,
            0.5 * 0.75 / 0.625_f64.sqrt(),
            max_relative = 1e-14
        );
        assert!((s.coh.re - 0.4743).abs() < 1e-4);
    }

    #[test]
    fn generator_is_anti_diagonal() {
        let p = ModelParams::new(0.0, 2.0, 0.5, 1.0, 0.0, 0.4).unwrap();
        let g = generator_value(&p, 1.3).unwrap();
        assert!(g.iter().flatten().all(|z| z.norm() == 0.0));

        let p = fig(0.25);
        let g = generator_value(&p, 0.8).unwrap();
        assert_eq!(g[0][0].norm(), 0.0);
        assert_eq!(g[1][0], g[0][1].conj());
        let kd = kappa_dot(&p, 0.8).unwrap();
        assert_relative_eq!(g[0][1].norm(), 0.5 * kd.norm(), max_relative = 1e-15);
    }

    #[test]
    fn coherence_values() {
        assert_eq!(coherence_l1(&QubitDensityMatrix::excited()), 0.0);
        let c0 = coherence_l1(&correlated_initial_state(&fig(0.0)).unwrap());
        assert_eq!(c0, 1.0);
        let c1 = coherence_l1(&correlated_initial_state(&fig(1.0)).unwrap());
        assert!(c1 < 1e-10);
        // exact value is e^(s(0)) = e^(-Γ(0.01)/2)
        let s0 = -0.5 * crate::kernels::gamma(0.01).unwrap();
        assert_relative_eq!(c1, s0.exp(), max_relative = 1e-12);
        assert!((c1 - 2.6e-22).abs() < 0.1e-22);
    }

    #[test]
    fn negative_time_is_rejected() {
        let p = fig(0.0);
        assert!(kappa(&p, -0.1).is_err());
        assert!(kappa_dot(&p, -0.1).is_err());
        assert!(reduced_state(&p, -0.1).is_err());
        assert!(generator_value(&p, -0.1).is_err());
    }
}
