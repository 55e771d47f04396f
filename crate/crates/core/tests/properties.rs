use dephasing_qsl::distinguishability::{non_markovianity, non_markovianity_partial, Exponent};
use dephasing_qsl::dynamics::{
    coherence_l1, correlated_initial_state, kappa, kappa_with_derivative, reduced_state,
};
use dephasing_qsl::kernels::kernel_closed_form;
use dephasing_qsl::qsl::{
    averaged_norms, qsl_correlated, qsl_correlated_from_coherence, relative_purity_angle,
    Convention,
};
use dephasing_qsl::{ModelParams, Param};
use num_complex::Complex64;
use proptest::prelude::*;

fn model() -> impl Strategy<Value = ModelParams> {
    (
        0.0..=0.2f64,
        1e-3..=8.0f64,
        1e-3..=2.0f64,
        0.5..=2.0f64,
        0.0..=2.0f64,
        0.0..=1.0f64,
    )
        .prop_map(|(a, mu, v, wc, w0, l)| ModelParams::new(a, mu, v, wc, w0, l).unwrap())
}

/// Any normalised pair of amplitudes.
fn amplitudes() -> impl Strategy<Value = (Complex64, Complex64)> {
    (
        0.0..=std::f64::consts::FRAC_PI_2,
        0.0..std::f64::consts::TAU,
        0.0..std::f64::consts::TAU,
    )
        .prop_map(|(th, pe, pg)| {
            (
                Complex64::from_polar(th.cos(), pe),
                Complex64::from_polar(th.sin(), pg),
            )
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn kappa_is_a_contraction(p in model(), t in 0.0..=50.0f64) {
        let k = kappa(&p, t).unwrap();
        prop_assert!(k.norm() <= 1.0 + 1e-12, "|kappa| = {}", k.norm());
    }

    #[test]
    fn reduced_state_is_a_density_matrix(p in model(), (ce, cg) in amplitudes(), t in 0.0..=50.0f64) {
        let p = p.with_amplitudes(ce, cg).unwrap();
        let rho = reduced_state(&p, t).unwrap();
        prop_assert!((rho.p_ee + rho.p_gg() - 1.0).abs() <= 1e-12);
        let [a, b] = rho.eigenvalues();
        prop_assert!(a >= -1e-12 && b >= -1e-12, "eigenvalues {a} {b}");
        prop_assert!(rho.is_valid());
    }

    #[test]
    fn uncorrelated_decay_ignores_v(p in model(), v in 1e-3..=2.0f64, t in 0.0..=20.0f64) {
        let p0 = p.with(Param::Lambda, 0.0).unwrap();
        let q0 = p0.with(Param::V, v).unwrap();
        let (a, b) = (kappa(&p0, t).unwrap(), kappa(&q0, t).unwrap());
        prop_assert!((a.norm() - b.norm()).abs() <= 1e-14);
        let r = kernel_closed_form(&p0, t).unwrap().r;
        let expected = Complex64::from_polar((-r).exp(), -2.0 * p0.omega_0() * t);
        prop_assert!((a - expected).norm() <= 1e-14);
    }

    #[test]
    fn initial_coherence_falls_with_lambda(p in model()) {
        let c: Vec<f64> = (0..=10)
            .map(|i| {
                let q = p.with(Param::Lambda, i as f64 / 10.0).unwrap();
                coherence_l1(&reduced_state(&q, 0.0).unwrap())
            })
            .collect();
        prop_assert!(c.windows(2).all(|w| w[1] <= w[0] + 1e-15), "{c:?}");
    }

    #[test]
    fn kappa_dot_matches_finite_differences(p in model(), t in 0.0..=5.0f64) {
        let h = 1e-5 * t.max(1.0);
        prop_assume!(t >= h);
        let (_, kd) = kappa_with_derivative(&p, t).unwrap();
        prop_assume!(kd.norm() > 1e-8);
        let fd = (kappa(&p, t + h).unwrap() - kappa(&p, t - h).unwrap()) / (2.0 * h);
        prop_assert!((kd - fd).norm() / kd.norm() < 1e-4, "analytic {kd} fd {fd}");
    }

    #[test]
    fn kernel_derivatives_match_finite_differences(p in model(), t in 0.0..=5.0f64) {
        let h = 1e-5 * t.max(1.0);
        prop_assume!(t >= h);
        let k = kernel_closed_form(&p, t).unwrap();
        let (a, b) = (kernel_closed_form(&p, t + h).unwrap(), kernel_closed_form(&p, t - h).unwrap());
        for (exact, fp, fm) in [(k.r_dot, a.r, b.r), (k.s_dot, a.s, b.s), (k.phi_dot, a.phi, b.phi)] {
            if exact.abs() > 1e-8 {
                let fd = (fp - fm) / (2.0 * h);
                prop_assert!((exact - fd).abs() / exact.abs() < 1e-4, "analytic {exact} fd {fd}");
            }
        }
    }

    #[test]
    fn r_grows_with_alpha(p in model(), scale in 1.0..=4.0f64, t in 0.0..=20.0f64) {
        let q = p.with(Param::Alpha, p.alpha() * scale).unwrap();
        let (a, b) = (kernel_closed_form(&p, t).unwrap().r, kernel_closed_form(&q, t).unwrap().r);
        prop_assert!(b >= a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn non_markovianity_is_nonnegative_and_grows_with_horizon(
        p in model(),
        t1 in 0.0..=30.0f64,
        extra in 0.0..=30.0f64,
        two in any::<bool>(),
    ) {
        let e = if two { Exponent::Two } else { Exponent::One };
        let a = non_markovianity_partial(&p, t1, e).unwrap();
        let b = non_markovianity_partial(&p, t1 + extra, e).unwrap();
        prop_assert!(a >= 0.0);
        prop_assert!(a <= b + 1e-15, "N({t1}) = {a} > N({}) = {b}", t1 + extra);
    }

    #[test]
    fn uncorrelated_non_markovianity_ignores_v_and_lambda(p in model(), lambda in 0.0..=1.0f64) {
        let base = non_markovianity(&p.with(Param::V, 0.01).unwrap(), 50.0, Exponent::Two, 1e-6).unwrap();
        for v in [0.5, 1.0] {
            let q = p.with(Param::V, v).unwrap().with(Param::Lambda, lambda).unwrap();
            let other = non_markovianity(&q, 50.0, Exponent::Two, 1e-6).unwrap();
            prop_assert_eq!(base.n_value.to_bits(), other.n_value.to_bits());
        }
    }

    #[test]
    fn norms_are_ordered(p in model(), tau in 0.05..=5.0f64) {
        let n = averaged_norms(&p, tau).unwrap();
        prop_assert!(n.op <= n.hs && n.hs <= n.tr, "{n:?}");
    }

    #[test]
    fn correlated_bound_never_exceeds_tau(p in model(), tau in 0.05..=5.0f64) {
        let with_tau = qsl_correlated(&p, tau, Convention::DerivedWithTauFactor).unwrap();
        prop_assert!(with_tau <= tau + 1e-9, "{with_tau} > {tau}");
        let printed = qsl_correlated(&p, tau, Convention::AsPrinted).unwrap();
        prop_assert_eq!(with_tau.to_bits(), (tau * printed).to_bits());
    }

    #[test]
    fn numerator_identity(p in model(), tau in 0.05..=5.0f64) {
        let rho0 = correlated_initial_state(&p).unwrap();
        let rhot = reduced_state(&p, tau).unwrap();
        let theta = relative_purity_angle(&rho0, &rhot).unwrap();
        let c0 = kappa(&p, 0.0).unwrap().norm();
        let lhs = theta.sin().powi(2) * rho0.purity();
        let rhs = 0.5 * (c0 * c0 - c0 * kappa(&p, tau).unwrap().re);
        prop_assert!((lhs - rhs).abs() <= 1e-10, "{lhs} vs {rhs}");
    }

    #[test]
    fn coherence_route_is_bit_equal(p in model(), tau in 0.05..=5.0f64) {
        let c = coherence_l1(&correlated_initial_state(&p).unwrap());
        for conv in [Convention::AsPrinted, Convention::DerivedWithTauFactor] {
            let a = qsl_correlated(&p, tau, conv).unwrap();
            let b = qsl_correlated_from_coherence(c, &p, tau, conv).unwrap();
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
