//! Fundamental matrices and monodromy of the linearized first-order system
//! w_z = A(z, λ) w, and of the associated Hill equation.

use crate::error::{Error, Result};
use crate::ode;
use crate::wavetrain::WaveProfile;
use num_complex::Complex64;
use serde::ser::{Serialize, SerializeSeq, Serializer};
use std::ops::{Add, Mul, Sub};

type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMatrix2 {
    pub m11: C64,
    pub m12: C64,
    pub m21: C64,
    pub m22: C64,
}

impl ComplexMatrix2 {
    pub fn new(m11: C64, m12: C64, m21: C64, m22: C64) -> Self {
        ComplexMatrix2 { m11, m12, m21, m22 }
    }

    pub fn from_real(m: [[f64; 2]; 2]) -> Self {
        let c = |x: f64| C64::new(x, 0.0);
        ComplexMatrix2::new(c(m[0][0]), c(m[0][1]), c(m[1][0]), c(m[1][1]))
    }

    pub fn identity() -> Self {
        ComplexMatrix2::from_real([[1.0, 0.0], [0.0, 1.0]])
    }

    /// σ₋ = [[0, 0], [1, 0]].
    pub fn sigma_minus() -> Self {
        ComplexMatrix2::from_real([[0.0, 0.0], [1.0, 0.0]])
    }

    pub fn det(&self) -> C64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn trace(&self) -> C64 {
        self.m11 + self.m22
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix2::new(self.m11 * s, self.m12 * s, self.m21 * s, self.m22 * s)
    }

    pub fn inverse(&self) -> Self {
        let d = self.det();
        ComplexMatrix2::new(self.m22 / d, -self.m12 / d, -self.m21 / d, self.m11 / d)
    }

    /// [self, other] = self·other − other·self.
    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        [self.m11, self.m12, self.m21, self.m22]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues, ordered by real part then imaginary part.
    pub fn eigenvalues(&self) -> (C64, C64) {
        let tr = self.trace();
        let det = self.det();
        let disc = (tr * tr - det * 4.0).sqrt();
        // avoid cancellation in the smaller root
        let big = if (tr + disc).norm() >= (tr - disc).norm() {
            (tr + disc) * 0.5
        } else {
            (tr - disc) * 0.5
        };
        let small = if big.norm() > 0.0 {
            det / big
        } else {
            C64::new(0.0, 0.0)
        };
        order_pair(big, small)
    }

    pub fn entries(&self) -> [C64; 4] {
        [self.m11, self.m12, self.m21, self.m22]
    }
}

pub(crate) fn order_pair(a: C64, b: C64) -> (C64, C64) {
    if (a.re, a.im) <= (b.re, b.im) {
        (a, b)
    } else {
        (b, a)
    }
}

impl Add for ComplexMatrix2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        ComplexMatrix2::new(
            self.m11 + o.m11,
            self.m12 + o.m12,
            self.m21 + o.m21,
            self.m22 + o.m22,
        )
    }
}

impl Sub for ComplexMatrix2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        ComplexMatrix2::new(
            self.m11 - o.m11,
            self.m12 - o.m12,
            self.m21 - o.m21,
            self.m22 - o.m22,
        )
    }
}

impl Mul for ComplexMatrix2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        ComplexMatrix2::new(
            self.m11 * o.m11 + self.m12 * o.m21,
            self.m11 * o.m12 + self.m12 * o.m22,
            self.m21 * o.m11 + self.m22 * o.m21,
            self.m21 * o.m12 + self.m22 * o.m22,
        )
    }
}

/// Serialized as `[[re, im] × 4]` in row-major order.
impl Serialize for ComplexMatrix2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(4))?;
        for z in self.entries() {
            seq.serialize_element(&[z.re, z.im])?;
        }
        seq.end()
    }
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct Monodromy {
    pub lambda: C64,
    pub matrix: ComplexMatrix2,
    pub q: f64,
    pub abel_residual: f64,
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct MonodromySeries {
    pub m0: ComplexMatrix2,
    pub m1: ComplexMatrix2,
    pub m2: ComplexMatrix2,
    /// J = ∫₀ᵀ F₀(y)⁻¹σ₋F₀(y) dy.
    pub j: [[f64; 2]; 2],
    /// ∫₀ᵀ F₁₁(y, 0)² dy.
    pub f11_sq_integral: f64,
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct HillEvaluation {
    pub nu: C64,
    pub matrix: ComplexMatrix2,
    pub discriminant: C64,
}

// Coefficients of the second row of the generator: w″ = a21 w + a22 w′.
enum Generator {
    Spectral { lambda: C64 },
    Hill { nu: C64 },
}

/// Transition matrix Φ(z1, z0) of the coupled wave + linearized system,
/// restarting the wave from its dense output at z0.
fn transition(profile: &WaveProfile, gen: Generator, z0: f64, z1: f64) -> Result<ComplexMatrix2> {
    let g = profile.gamma();
    let c = profile.speed();
    let pot = &profile.potential;
    let (f0, fz0) = profile.eval(z0);
    let (shift, a22) = match gen {
        Generator::Spectral { lambda } => (-(lambda * lambda) / g, lambda * (2.0 * c / g)),
        Generator::Hill { nu } => (nu, C64::new(0.0, 0.0)),
    };
    let y0 = [f0, fz0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
    let tr = ode::integrate(
        |_, y, dy| {
            let v2 = pot.d2v(y[0]);
            dy[0] = y[1];
            dy[1] = -pot.dv(y[0]) / g;
            let a21 = shift - v2 / g;
            for col in 0..2 {
                let r1 = C64::new(y[2 + 2 * col], y[3 + 2 * col]);
                let r2 = C64::new(y[6 + 2 * col], y[7 + 2 * col]);
                dy[2 + 2 * col] = r2.re;
                dy[3 + 2 * col] = r2.im;
                let d2 = a21 * r1 + a22 * r2;
                dy[6 + 2 * col] = d2.re;
                dy[7 + 2 * col] = d2.im;
            }
        },
        z0,
        &y0,
        z1,
        profile.tolerance(),
        false,
    )?;
    let y = tr.y_end;
    Ok(ComplexMatrix2::new(
        C64::new(y[2], y[3]),
        C64::new(y[4], y[5]),
        C64::new(y[6], y[7]),
        C64::new(y[8], y[9]),
    ))
}

/// Φ(z1, z0; λ) for 0 ≤ z0 ≤ z1 ≤ T.
pub fn transition_matrix(
    profile: &WaveProfile,
    lambda: C64,
    z0: f64,
    z1: f64,
) -> Result<ComplexMatrix2> {
    check_range(profile, z0)?;
    check_range(profile, z1)?;
    if z1 < z0 {
        return Err(Error::Precondition("z1 < z0".into()));
    }
    if z1 == z0 {
        return Ok(ComplexMatrix2::identity());
    }
    transition(profile, Generator::Spectral { lambda }, z0, z1)
}

fn check_range(profile: &WaveProfile, z: f64) -> Result<()> {
    if !(0.0..=profile.period).contains(&z) {
        return Err(Error::Precondition(format!("z = {z} outside [0, T]")));
    }
    Ok(())
}

/// F(z, λ) with F(0, λ) = I.
pub fn fundamental_matrix(profile: &WaveProfile, lambda: C64, z: f64) -> Result<ComplexMatrix2> {
    transition_matrix(profile, lambda, 0.0, z)
}

/// M(λ) = F(T, λ) with its Abel-identity residual.
pub fn monodromy(profile: &WaveProfile, lambda: C64) -> Result<Monodromy> {
    let m = transition(profile, Generator::Spectral { lambda }, 0.0, profile.period)?;
    let q = profile.q();
    let expected = (lambda * (2.0 * q)).exp();
    let err = (m.det() - expected).norm();
    let abel_residual = err / expected.norm();
    // The alarm is measured against the size of the products forming det M,
    // so that ill-conditioned (|μ₊| ≫ |μ₋|) but accurate solves pass.
    let det_scale = (m.m11 * m.m22).norm() + (m.m12 * m.m21).norm();
    if !(err <= profile.settings.abel_alarm * det_scale.max(expected.norm())) {
        return Err(Error::AbelViolation(abel_residual));
    }
    Ok(Monodromy {
        lambda,
        matrix: m,
        q,
        abel_residual,
    })
}

/// Hill monodromy M^H(ν) and discriminant Δ^H(ν) = tr M^H(ν).
pub fn hill_evaluation(profile: &WaveProfile, nu: C64) -> Result<HillEvaluation> {
    let m = transition(profile, Generator::Hill { nu }, 0.0, profile.period)?;
    Ok(HillEvaluation {
        nu,
        matrix: m,
        discriminant: m.trace(),
    })
}

/// Δ^H(ν) for real ν, integrating only real components.
pub fn hill_discriminant(profile: &WaveProfile, nu: f64) -> Result<f64> {
    let g = profile.gamma();
    let pot = &profile.potential;
    let tr = ode::integrate(
        |_, y, dy| {
            dy[0] = y[1];
            dy[1] = -pot.dv(y[0]) / g;
            let a = nu - pot.d2v(y[0]) / g;
            dy[2] = y[4];
            dy[3] = y[5];
            dy[4] = a * y[2];
            dy[5] = a * y[3];
        },
        0.0,
        &[profile.u0, profile.v0, 1.0, 0.0, 0.0, 1.0],
        profile.period,
        profile.tolerance(),
        false,
    )?;
    Ok(tr.y_end[2] + tr.y_end[5])
}

/// M₀, M₁, M₂ of M(λ) = M₀ + λM₁ + λ²M₂ + O(λ³), from one λ = 0 solve
/// carrying the auxiliary integral J as extra quadrature states.
pub fn monodromy_series(profile: &WaveProfile) -> Result<MonodromySeries> {
    let g = profile.gamma();
    let c = profile.speed();
    let pot = &profile.potential;
    // f, f_z, F11, F12, F21, F22, J11, J12, J21
    let tr = ode::integrate(
        |_, y, dy| {
            dy[0] = y[1];
            dy[1] = -pot.dv(y[0]) / g;
            let a = -pot.d2v(y[0]) / g;
            dy[2] = y[4];
            dy[3] = y[5];
            dy[4] = a * y[2];
            dy[5] = a * y[3];
            dy[6] = -y[3] * y[2];
            dy[7] = -y[3] * y[3];
            dy[8] = y[2] * y[2];
        },
        0.0,
        &[profile.u0, profile.v0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
        profile.period,
        profile.tolerance(),
        false,
    )?;
    let y = tr.y_end;
    let m0 = ComplexMatrix2::from_real([[y[2], y[3]], [y[4], y[5]]]);
    let j = [[y[6], y[7]], [y[8], -y[6]]];
    let q = C64::new(profile.q(), 0.0);
    let sm = ComplexMatrix2::sigma_minus();
    let comm = sm.commutator(&m0);
    let cg = C64::new(c / g, 0.0);
    let m1 = m0.scale(q) + comm.scale(cg);
    let jm = ComplexMatrix2::from_real(j);
    let m2 = m0.scale(q * q * 0.5) + comm.scale(cg * q) - (sm * m0 * sm).scale(cg * cg)
        + (m0 * jm).scale(C64::new(1.0 / (g * g), 0.0));
    Ok(MonodromySeries {
        m0,
        m1,
        m2,
        j,
        f11_sq_integral: y[8],
    })
}

/// Δ^H_ν(0) = M₁₂(0)·∫₀ᵀ F₁₁(y, 0)² dy.
pub fn hill_discriminant_slope(profile: &WaveProfile) -> Result<f64> {
    let s = monodromy_series(profile)?;
    Ok(s.m0.m12.re * s.f11_sq_integral)
}
