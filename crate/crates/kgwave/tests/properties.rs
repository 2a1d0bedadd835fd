mod common;

use common::*;
use kgwave::floquet;
use kgwave::modulation::{nls_coefficients, whitham_classify, WhithamKind};
use kgwave::spectrum::{self, evans, evans_mu};
use kgwave::wavetrain::{self, WaveProfile};
use kgwave::{Potential, WaveParameters};
use num_complex::Complex64;
use proptest::prelude::*;
use std::sync::OnceLock;

fn profiles() -> &'static Vec<WaveProfile> {
    static CELL: OnceLock<Vec<WaveProfile>> = OnceLock::new();
    CELL.get_or_init(|| {
        representative()
            .into_iter()
            .map(|(e, c)| sg_profile(e, c))
            .collect()
    })
}

fn box_lambda() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| Complex64::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn abel_identity_holds(idx in 0usize..4, lam in box_lambda()) {
        let m = floquet::monodromy(&profiles()[idx], lam).unwrap();
        let expected = (lam * 2.0 * m.q).exp();
        prop_assert!((m.matrix.det() - expected).norm() <= 1e-8 * expected.norm());
    }

    #[test]
    fn evans_conjugation(idx in 0usize..4, lam in box_lambda(), theta in -3.1..3.1f64) {
        let p = &profiles()[idx];
        let a = evans(p, lam, theta).unwrap();
        let b = evans(p, lam.conj(), -theta).unwrap();
        prop_assert!((a.conj() - b).norm() <= 1e-10 * (1.0 + a.norm()));
    }

    #[test]
    fn evans_reflection(idx in 0usize..4, lam in box_lambda(), theta in -3.1..3.1f64) {
        // D̃(λ, μ) = e^{−qλ} μ⁻¹ D(λ, μ) satisfies D̃(−λ, μ) = D̃(λ, 1/μ)
        let p = &profiles()[idx];
        let q = p.q();
        let mu = Complex64::from_polar(1.0, theta);
        let tilde = |l: Complex64, m: Complex64| (-l * q).exp() / m * evans_mu(p, l, m).unwrap();
        let a = tilde(-lam, mu);
        let b = tilde(lam, mu.inv());
        prop_assert!((a - b).norm() <= 1e-8 * (1.0 + a.norm().max(b.norm())));
    }

    #[test]
    fn multipliers_relate_to_hill(idx in 0usize..4, lam in box_lambda()) {
        let p = &profiles()[idx];
        let (a, b) = spectrum::multipliers(p, lam).unwrap();
        let (ha, hb) = spectrum::hill_multipliers(p, lam).unwrap();
        let s = (-lam * p.q()).exp();
        let (x, y) = (a * s, b * s);
        let err = ((x - ha).norm().max((y - hb).norm())).min((x - hb).norm().max((y - ha).norm()));
        prop_assert!(err <= 1e-8 * (x.norm() + y.norm()));
    }

    #[test]
    fn g_nonpositive_on_imaginary_axis(idx in 0usize..4, y in -3.0..3.0f64) {
        let g = spectrum::g_function(&profiles()[idx], Complex64::new(0.0, y)).unwrap();
        prop_assert!(g <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn librational_sine_gordon_is_modulationally_unstable(
        e in -0.9..0.9f64,
        c in prop_oneof![0.1..0.9f64, 1.1..2.5f64],
    ) {
        let p = sg_profile(e, c);
        let ind = spectrum::indices(&p).unwrap();
        prop_assert_eq!(ind.rho, -1);
        let w = whitham_classify(&sg(), &WaveParameters::new(e, c)).unwrap();
        prop_assert_eq!(w.kind, WhithamKind::Elliptic);
        if c < 1.0 {
            prop_assert_eq!(ind.gamma, Some(-1));
        }
    }

    #[test]
    fn rotational_sine_gordon_has_rho_plus(
        e in prop_oneof![-4.0..-1.1f64, 1.1..4.0f64],
        c in prop_oneof![0.2..0.9f64, 1.1..2.5f64],
    ) {
        // rotational waves need E below −1 when subluminal and above 1 when superluminal
        let e = if c < 1.0 { -e.abs() } else { e.abs() };
        let ind = spectrum::indices(&sg_profile(e, c)).unwrap();
        prop_assert_eq!(ind.rho, 1);
        let w = whitham_classify(&sg(), &WaveParameters::new(e, c)).unwrap();
        prop_assert_eq!(w.kind, WhithamKind::Hyperbolic);
    }

    #[test]
    fn energy_conserved_along_profile(e in -0.95..0.95f64, c in 1.05..3.0f64, s in 0.0..1.0f64) {
        let p = sg_profile(e, c);
        prop_assert!(p.energy_residual(s * p.period).abs() <= 1e-9);
    }

    #[test]
    fn period_matches_elliptic_oracle(e in -0.95..0.95f64, c in 1.05..3.0f64) {
        let t = wavetrain::period(&sg(), &WaveParameters::new(e, c)).unwrap();
        prop_assert!(rel(t, sg_librational_period(e, c)) <= 1e-7);
    }

    #[test]
    fn nls_closed_forms(a in 0.2..3.0f64, b in -2.0..2.0f64, k in 0.1..3.0f64) {
        let pot = Potential::quartic(a, b).unwrap();
        let n = nls_coefficients(&pot, 0.0, k).unwrap();
        let d = pot.derivs(0.0);
        prop_assert!((n.omega * n.omega - (k * k + d[2])).abs() <= 1e-12 * (1.0 + k * k));
        prop_assert!((n.group_velocity.powi(2) + n.omega * n.dispersion - 1.0).abs() <= 1e-10);
        let closed = (5.0 * d[3] * d[3] - 3.0 * d[2] * d[4]) / (12.0 * n.omega.powi(4));
        prop_assert!((n.focusing_product() - closed).abs() <= 1e-12 * (1.0 + closed.abs()));
    }
}
