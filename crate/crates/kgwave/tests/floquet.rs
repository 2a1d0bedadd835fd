mod common;

use approx::assert_relative_eq;
use common::*;
use kgwave::floquet::*;
use kgwave::wavetrain::{self, WaveClass};
use kgwave::{Potential, WaveParameters};
use num_complex::Complex64;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn max_diff(a: &ComplexMatrix2, b: &ComplexMatrix2) -> f64 {
    (*a - *b).max_abs()
}

#[test]
fn fundamental_matrix_initial_and_final() {
    for (e, c) in representative() {
        let p = sg_profile(e, c);
        let lambda = c64(0.3, -0.2);
        assert_eq!(
            fundamental_matrix(&p, lambda, 0.0).unwrap(),
            ComplexMatrix2::identity()
        );
        let f_t = fundamental_matrix(&p, c64(0.0, 0.0), p.period).unwrap();
        let m = monodromy(&p, c64(0.0, 0.0)).unwrap().matrix;
        assert!(max_diff(&f_t, &m) <= 1e-12);
    }
}

#[test]
fn first_column_at_zero_is_translation_mode() {
    for (e, c) in representative() {
        let p = sg_profile(e, c);
        for k in 1..8 {
            let z = p.period * k as f64 / 8.0;
            let f = fundamental_matrix(&p, c64(0.0, 0.0), z).unwrap();
            let (_, fz) = p.eval(z);
            assert!((f.m11.re - fz / p.v0).abs() <= 1e-8);
            assert!((f.m21.re - p.f_zz(z) / p.v0).abs() <= 1e-8);
            // unit Wronskian of the λ = 0 fundamental matrix
            assert!((f.det() - 1.0).norm() <= 1e-9);
        }
    }
}

#[test]
fn energy_mode_wronskian() {
    // w^E = ∂(f, f_z)/∂E at fixed z: det(w^z, w^E) = 1/(c²−1)
    let pot = sg();
    for (e, c) in representative() {
        let h = 1e-4;
        let at = |de: f64| wavetrain::profile(&pot, &WaveParameters::new(e + de, c)).unwrap();
        let (pp, pm, p) = (at(h), at(-h), at(0.0));
        for z in [0.1, 0.37, 0.8] {
            let z = z * p.period;
            let (fp, fzp) = pp.eval(z);
            let (fm, fzm) = pm.eval(z);
            let (f_e, fz_e) = ((fp - fm) / (2.0 * h), (fzp - fzm) / (2.0 * h));
            let w = p.eval(z).1 * fz_e - p.f_zz(z) * f_e;
            assert!(rel(w, 1.0 / (c * c - 1.0)) <= 1e-5, "({e},{c}) z={z}: {w}");
        }
    }
}

#[test]
fn abel_identity() {
    for (e, c) in representative() {
        let p = sg_profile(e, c);
        let m = monodromy(&p, c64(0.3, 0.4)).unwrap();
        assert!(m.abel_residual <= 1e-8);
        let expected = (c64(0.3, 0.4) * 2.0 * m.q).exp();
        assert!((m.matrix.det() - expected).norm() <= 1e-8 * expected.norm());
        let m0 = monodromy(&p, c64(0.0, 0.0)).unwrap().matrix;
        assert!((m0.det() - 1.0).norm() <= 1e-9);
        assert!((m0.trace() - 2.0).norm() <= 1e-9);
        assert_relative_eq!(m.q, c * p.period / (c * c - 1.0), max_relative = 1e-15);
    }
}

#[test]
fn jordan_form_at_zero() {
    for (e, c) in representative() {
        let p = sg_profile(e, c);
        let delta = wavetrain::finite_part_delta(&p).unwrap();
        let m0 = monodromy(&p, c64(0.0, 0.0)).unwrap().matrix;
        let expected = ComplexMatrix2::from_real([[1.0, delta * p.v0 * p.v0], [0.0, 1.0]]);
        assert!(max_diff(&m0, &expected) <= 1e-6);
        if p.class == WaveClass::SuperluminalLibrational {
            assert!(m0.m12.re < 0.0);
        }
    }
}

#[test]
fn series_coefficients() {
    for (e, c) in representative() {
        let p = sg_profile(e, c);
        let s = monodromy_series(&p).unwrap();
        let err = |h: f64| {
            let hc = c64(h, 0.0);
            let m = monodromy(&p, hc).unwrap().matrix;
            (m - (s.m0 + s.m1.scale(hc) + s.m2.scale(hc * hc))).max_abs()
        };
        let ratio = err(1e-2) / err(5e-3);
        assert!(ratio > 7.0 && ratio < 9.0, "({e},{c}) ratio {ratio}");
        let q = p.q();
        let g = c * c - 1.0;
        let kappa = s.m0.m12.re * s.f11_sq_integral / (g * g);
        assert!((s.m1.trace().re - 2.0 * q).abs() <= 1e-7 * (1.0 + q.abs()));
        assert!((s.m2.trace().re - (q * q + kappa)).abs() <= 1e-6 * (1.0 + q * q));
        for z in
            s.m0.entries()
                .iter()
                .chain(s.m1.entries().iter())
                .chain(s.m2.entries().iter())
        {
            assert_eq!(z.im, 0.0);
        }
    }
}

#[test]
fn hill_basics() {
    for (e, c) in representative() {
        let p = sg_profile(e, c);
        let h0 = hill_evaluation(&p, c64(0.0, 0.0)).unwrap();
        assert!((h0.discriminant - 2.0).norm() <= 1e-9);
        let m0 = monodromy(&p, c64(0.0, 0.0)).unwrap().matrix;
        assert!(max_diff(&h0.matrix, &m0) <= 1e-9);
        for nu in [-2.0, -0.3, 0.4] {
            let h = hill_evaluation(&p, c64(nu, 0.0)).unwrap();
            assert!(h.discriminant.im.abs() <= 1e-12);
            assert!((h.matrix.det() - 1.0).norm() <= 1e-9);
            assert!((hill_discriminant(&p, nu).unwrap() - h.discriminant.re).abs() <= 1e-8);
        }
        let h = hill_evaluation(&p, c64(-0.4, 0.3)).unwrap();
        assert!((h.matrix.det() - 1.0).norm() <= 1e-9);
    }
}

#[test]
fn hill_multiplier_relation() {
    // M_H(ν(λ)) = e^{−qλ} B M(λ) B⁻¹ with B = [[1, 0], [−cλ/(c²−1), 1]]
    for (e, c) in representative() {
        let p = sg_profile(e, c);
        let g = c * c - 1.0;
        for lambda in [c64(0.2, 0.5), c64(-0.4, 0.1), c64(0.0, 0.9)] {
            let m = monodromy(&p, lambda).unwrap();
            let h = hill_evaluation(&p, lambda * lambda / (g * g)).unwrap();
            let alpha = lambda * c / g;
            let b = ComplexMatrix2::new(c64(1.0, 0.0), c64(0.0, 0.0), -alpha, c64(1.0, 0.0));
            let scaled = (b * m.matrix * b.inverse()).scale((-lambda * m.q).exp());
            assert!(max_diff(&scaled, &h.matrix) <= 1e-8 * (1.0 + h.matrix.max_abs()));
        }
    }
}

#[test]
fn flow_property() {
    for (e, c) in representative() {
        let p = sg_profile(e, c);
        let lambda = c64(0.25, -0.6);
        let half = 0.5 * p.period;
        let a = fundamental_matrix(&p, lambda, half).unwrap();
        let b = transition_matrix(&p, lambda, half, p.period).unwrap();
        let m = monodromy(&p, lambda).unwrap().matrix;
        assert!(max_diff(&(b * a), &m) <= 1e-8 * (1.0 + m.max_abs()));
    }
}

#[test]
fn discriminant_slope() {
    for (e, c) in [
        (0.0, SQRT2),
        (0.0, 0.5),
        (-2.0, 0.5),
        (2.0, SQRT2),
        (0.5, 2.0),
        (-3.0, 0.5),
    ] {
        let p = sg_profile(e, c);
        let slope = hill_discriminant_slope(&p).unwrap();
        let h = 1e-5;
        let fd =
            (hill_discriminant(&p, h).unwrap() - hill_discriminant(&p, -h).unwrap()) / (2.0 * h);
        assert!(rel(slope, fd) <= 1e-3, "({e},{c}) {slope} vs {fd}");
        if p.class.is_rotational() {
            assert!(slope > 0.0);
        } else {
            assert!(slope < 0.0);
        }
    }
}

#[test]
fn discriminant_slope_vanishes_when_period_is_energy_independent() {
    let harmonic = Potential::polynomial("harmonic", vec![0.0, 0.0, 0.5]).unwrap();
    let p = wavetrain::profile(&harmonic, &WaveParameters::new(1.0, 1.5)).unwrap();
    assert!(hill_discriminant_slope(&p).unwrap().abs() <= 1e-8);
}

#[test]
fn transition_range_checks() {
    let p = sg_profile(0.0, SQRT2);
    assert!(transition_matrix(&p, c64(0.0, 0.0), 0.5, 0.2).is_err());
    assert!(fundamental_matrix(&p, c64(0.0, 0.0), 2.0 * p.period).is_err());
}

#[test]
fn matrix_serializes_as_pairs() {
    let m = ComplexMatrix2::new(c64(1.0, 2.0), c64(3.0, 4.0), c64(5.0, 6.0), c64(7.0, 8.0));
    assert_eq!(
        serde_json::to_string(&m).unwrap(),
        "[[1.0,2.0],[3.0,4.0],[5.0,6.0],[7.0,8.0]]"
    );
}
