//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use kgwave::wavetrain::{self, WaveProfile};
use kgwave::{Potential, WaveParameters};
use std::f64::consts::{FRAC_PI_2, SQRT_2};

pub const SQRT2: f64 = SQRT_2;

/// Complete elliptic integrals K(m) and E(m) (parameter m) by the AGM.
pub fn ellip_ke(m: f64) -> (f64, f64) {
    let (mut a, mut b) = (1.0, (1.0 - m).sqrt());
    let mut c = m.sqrt();
    let mut sum = 0.5 * c * c;
    let mut pow = 0.5;
    for _ in 0..40 {
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        c = 0.5 * (a - b);
        pow *= 2.0;
        sum += pow * c * c;
        a = an;
        b = bn;
        if c.abs() < 1e-17 {
            break;
        }
    }
    let k = FRAC_PI_2 / a;
    (k, k * (1.0 - sum))
}

pub fn ellip_k(m: f64) -> f64 {
    ellip_ke(m).0
}

/// Sine-Gordon superluminal librational period 4√(c²−1)K((1+E)/2).
pub fn sg_librational_period(e: f64, c: f64) -> f64 {
    4.0 * (c * c - 1.0).sqrt() * ellip_k(0.5 * (1.0 + e))
}

/// W for the same family: 16√(c²−1)[E(m) − (1−m)K(m)].
pub fn sg_librational_w(e: f64, c: f64) -> f64 {
    let m = 0.5 * (1.0 + e);
    let (k, ee) = ellip_ke(m);
    16.0 * (c * c - 1.0).sqrt() * (ee - (1.0 - m) * k)
}

/// Fourth-order central difference of g at x with step h.
pub fn central_diff(g: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-g(x + 2.0 * h) + 8.0 * g(x + h) - 8.0 * g(x - h) + g(x - 2.0 * h)) / (12.0 * h)
}

/// Adaptive Simpson quadrature of a smooth integrand.
pub fn simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    rec(
        f,
        a,
        b,
        fa,
        fm,
        fb,
        (b - a) / 6.0 * (fa + 4.0 * fm + fb),
        tol,
        50,
    )
}

/// First return of the profile ODE by fixed-step RK4: the z > 0 where
/// f − u0 first reaches `target` (0 for librational, ±2π for rotational)
/// moving upward, refined by cubic Hermite interpolation.
pub fn first_return(pot: &Potential, e: f64, c: f64, u0: f64, target: f64, h: f64) -> f64 {
    let g = c * c - 1.0;
    let v0 = (2.0 * (e - pot.v(u0)) / g).sqrt();
    let rhs = |y: [f64; 2]| [y[1], -pot.dv(y[0]) / g];
    let (mut z, mut y) = (0.0, [u0, v0]);
    let mut left_start = false;
    loop {
        let k1 = rhs(y);
        let k2 = rhs([y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = rhs([y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = rhs([y[0] + h * k3[0], y[1] + h * k3[1]]);
        let yn = [
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
        let (a, b) = (y[0] - u0 - target, yn[0] - u0 - target);
        if !left_start {
            left_start = (yn[0] - u0).abs() > 1e-3;
        } else if a < 0.0 && b >= 0.0 {
            // Hermite cubic on [z, z+h] with slopes y[1], yn[1]; Newton on s.
            let p = |s: f64| {
                let (h00, h10, h01, h11) = (
                    2.0 * s.powi(3) - 3.0 * s * s + 1.0,
                    s.powi(3) - 2.0 * s * s + s,
                    -2.0 * s.powi(3) + 3.0 * s * s,
                    s.powi(3) - s * s,
                );
                h00 * a + h10 * h * y[1] + h01 * b + h11 * h * yn[1]
            };
            let mut s = a / (a - b);
            for _ in 0..30 {
                let d = (p(s + 1e-7) - p(s - 1e-7)) / 2e-7;
                s -= p(s) / d;
            }
            return z + s * h;
        }
        z += h;
        y = yn;
        assert!(z < 1e4, "no return found");
    }
}

pub fn sg() -> Potential {
    Potential::sine_gordon()
}

pub fn sg_profile(e: f64, c: f64) -> WaveProfile {
    wavetrain::profile(&sg(), &WaveParameters::new(e, c)).expect("profile")
}

/// One wave per region of the sine-Gordon parameter plane.
pub fn representative() -> Vec<(f64, f64)> {
    vec![(0.0, SQRT2), (0.0, 0.5), (-2.0, 0.5), (2.0, SQRT2)]
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}
