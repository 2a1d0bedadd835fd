//! Whitham modulation system and the weakly nonlinear NLS reduction.

use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::settings::Settings;
use crate::spectrum;
use crate::wavetrain::{self, WaveParameters, WaveProfile};
use num_complex::Complex64;
use serde::Serialize;

const DEGENERATE_TOL: f64 = 1e-8;
const SINGULAR_TOL: f64 = 1e-10;
const AVERAGE_TOL: f64 = 1e-6;
const EQUILIBRIUM_TOL: f64 = 1e-10;

/// Default energy offset from V(u₀) for near-equilibrium comparisons.
pub const NEAR_EQUILIBRIUM_OFFSET: f64 = 1e-3;

/// Period averages of the conserved densities and fluxes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Averages {
    pub d1: f64,
    pub d2: f64,
    pub f1: f64,
    pub f2: f64,
}

impl Averages {
    fn max_rel_diff(&self, other: &Averages) -> f64 {
        [
            (self.d1, other.d1),
            (self.d2, other.d2),
            (self.f1, other.f1),
            (self.f2, other.f2),
        ]
        .iter()
        .map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()).max(1e-300))
        .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AveragedQuantities {
    /// Direct quadrature over the profile.
    pub direct: Averages,
    /// Closed forms in terms of W, T, E and c.
    pub from_w: Averages,
    /// Largest relative mismatch between the two.
    pub mismatch: f64,
}

fn averages_from_w(w: f64, t: f64, e: f64, c: f64) -> Averages {
    let base = w / ((c * c - 1.0) * t);
    Averages {
        d1: base + e,
        d2: c * base,
        f1: c * base,
        f2: c * c * base - e,
    }
}

/// ⟨D₁⟩, ⟨D₂⟩, ⟨F₁⟩, ⟨F₂⟩ computed two ways; fails when they disagree
/// beyond 1e−6.
pub fn averaged_quantities(pot: &Potential, params: &WaveParameters) -> Result<AveragedQuantities> {
    let prof = wavetrain::profile(pot, params)?;
    let w = wavetrain::averaged_w_with(pot, &prof.params, &prof.settings)?;
    averaged_quantities_of(&prof, w)
}

fn averaged_quantities_of(prof: &WaveProfile, w: f64) -> Result<AveragedQuantities> {
    let (c, t, e) = (prof.speed(), prof.period, prof.energy());
    let fz2 = prof.integral_fz2() / t;
    let v = prof.integral_v() / t;
    let direct = Averages {
        d1: 0.5 * (c * c + 1.0) * fz2 + v,
        d2: c * fz2,
        f1: c * fz2,
        f2: 0.5 * (c * c + 1.0) * fz2 - v,
    };
    let from_w = averages_from_w(w, t, e, c);
    let mismatch = direct.max_rel_diff(&from_w);
    if !(mismatch <= AVERAGE_TOL) {
        return Err(Error::QuadratureFailure { estimate: mismatch });
    }
    Ok(AveragedQuantities {
        direct,
        from_w,
        mismatch,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WhithamKind {
    Hyperbolic,
    Elliptic,
    Degenerate,
    Singular,
}

impl WhithamKind {
    pub fn label(self) -> &'static str {
        match self {
            WhithamKind::Hyperbolic => "hyperbolic",
            WhithamKind::Elliptic => "elliptic",
            WhithamKind::Degenerate => "degenerate",
            WhithamKind::Singular => "singular",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WhithamClassification {
    pub w: f64,
    /// W_E = T.
    pub w_e: f64,
    /// W_EE = T_E.
    pub w_ee: f64,
    pub u: [[f64; 2]; 2],
    /// Closed-form characteristic velocities.
    pub velocities: (Complex64, Complex64),
    /// Largest distance from a closed-form velocity to an eigenvalue of U.
    pub eigen_residual: f64,
    pub kind: WhithamKind,
    pub averaged: Averages,
    /// |W_E − T| with W_E by central difference in E.
    pub w_e_residual: Option<f64>,
}

/// Assembles U(E, c) and classifies the modulation system.
pub fn whitham_classify(pot: &Potential, params: &WaveParameters) -> Result<WhithamClassification> {
    whitham_classify_with(pot, params, &Settings::default())
}

pub fn whitham_classify_with(
    pot: &Potential,
    params: &WaveParameters,
    settings: &Settings,
) -> Result<WhithamClassification> {
    let prof = wavetrain::profile_with(pot, params, settings)?;
    let params = &prof.params;
    let c = params.speed;
    let g = params.gamma();
    let w = wavetrain::averaged_w_with(pot, params, settings)?;
    let w_e = prof.period;
    let w_ee = wavetrain::period_energy_derivative_with(pot, params, settings)?;
    let averaged = averaged_quantities_of(&prof, w)?.direct;

    let den = c * c * w_e * w_e + w * w_ee;
    let scale = c * c * w_e * w_e + (w * w_ee).abs();
    if den.abs() <= SINGULAR_TOL * scale {
        return Err(Error::SingularSystem(den));
    }
    let diag = (w_e * w_e + w * w_ee) * c / den;
    let u = [[diag, -w * w_e / den], [g * g * w_e * w_ee / den, diag]];
    let disc = -g * g * w * w_e * w_e * w_ee;
    let root = Complex64::new(disc, 0.0).sqrt() / den;
    let velocities = (diag + root, diag - root);

    // eigenvalues of U straight from its entries
    let tr = u[0][0] + u[1][1];
    let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
    let s = Complex64::new(0.25 * tr * tr - det, 0.0).sqrt();
    let (e1, e2) = (0.5 * tr + s, 0.5 * tr - s);
    let eigen_residual = [velocities.0, velocities.1]
        .iter()
        .map(|v| (v - e1).norm().min((v - e2).norm()))
        .fold(0.0, f64::max);

    let kind = if w_ee.abs() <= DEGENERATE_TOL {
        WhithamKind::Degenerate
    } else if w * w_ee < 0.0 {
        WhithamKind::Hyperbolic
    } else {
        WhithamKind::Elliptic
    };
    Ok(WhithamClassification {
        w,
        w_e,
        w_ee,
        u,
        velocities,
        eigen_residual,
        kind,
        averaged,
        w_e_residual: w_e_check(pot, params, settings, w_e).ok(),
    })
}

// Central difference of W in E against T.
fn w_e_check(pot: &Potential, params: &WaveParameters, settings: &Settings, t: f64) -> Result<f64> {
    let h = 1e-5 * (1.0 + params.energy.abs());
    let at = |e: f64| {
        wavetrain::averaged_w_with(
            pot,
            &WaveParameters {
                energy: e,
                ..*params
            },
            settings,
        )
    };
    let w_e = (at(params.energy + h)? - at(params.energy - h)?) / (2.0 * h);
    Ok((w_e - t).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NlsKind {
    Focusing,
    Defocusing,
    Degenerate,
}

impl NlsKind {
    pub fn label(self) -> &'static str {
        match self {
            NlsKind::Focusing => "focusing",
            NlsKind::Defocusing => "defocusing",
            NlsKind::Degenerate => "degenerate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NlsCoefficients {
    pub u0: f64,
    pub k: f64,
    pub omega: f64,
    pub group_velocity: f64,
    pub dispersion: f64,
    pub beta: f64,
    pub kind: NlsKind,
}

impl NlsCoefficients {
    /// β·ω″.
    pub fn focusing_product(&self) -> f64 {
        self.beta * self.dispersion
    }
}

fn equilibrium_derivs(pot: &Potential, u0: f64) -> Result<[f64; 5]> {
    let d = pot.derivs(u0);
    if d[1].abs() > EQUILIBRIUM_TOL {
        return Err(Error::NotEquilibrium {
            u: u0,
            derivative: d[1],
        });
    }
    if d[2].abs() <= DEGENERATE_TOL {
        return Err(Error::DegenerateCritical {
            u: u0,
            second_derivative: d[2],
        });
    }
    Ok(d)
}

// 5V‴² − 3V″V⁗ and a magnitude scale for it.
fn nls_numerator(d: &[f64; 5]) -> (f64, f64) {
    let (a, b) = (5.0 * d[3] * d[3], 3.0 * d[2] * d[4]);
    (a - b, a + b.abs())
}

fn sign_with_tol(x: f64, scale: f64) -> i32 {
    if x.abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
        0
    } else {
        x.signum() as i32
    }
}

/// Dispersion relation, group velocity, dispersion and the cubic coefficient.
pub fn nls_coefficients(pot: &Potential, u0: f64, k: f64) -> Result<NlsCoefficients> {
    let d = equilibrium_derivs(pot, u0)?;
    let omega2 = k * k + d[2];
    if !(omega2 > 0.0) {
        return Err(Error::EvanescentCarrier(omega2));
    }
    let omega = omega2.sqrt();
    let (num, scale) = nls_numerator(&d);
    let beta = num / (12.0 * omega * d[2]);
    let dispersion = d[2] / (omega2 * omega);
    // β·ω″ = num/(12ω⁴) carries the sign of the numerator
    let kind = match sign_with_tol(num, scale) {
        0 => NlsKind::Degenerate,
        1 => NlsKind::Focusing,
        _ => NlsKind::Defocusing,
    };
    Ok(NlsCoefficients {
        u0,
        k,
        omega,
        group_velocity: k / omega,
        dispersion,
        beta,
        kind,
    })
}

/// sgn((c²−1)T_E) on the near-equilibrium family about u₀, from the
/// closed form sgn(5V‴² − 3V″V⁗).
pub fn near_equilibrium_te_sign(pot: &Potential, u0: f64) -> Result<i32> {
    let d = equilibrium_derivs(pot, u0)?;
    let (num, scale) = nls_numerator(&d);
    Ok(sign_with_tol(num, scale))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NearEquilibriumWave {
    pub energy: f64,
    pub speed: f64,
    /// (c²−1)·T_E.
    pub scaled_period_e: f64,
    pub rho: i32,
}

/// The librational wave about u₀ at E = V(u₀) ± offset (into the well)
/// and phase speed c = ω/k, with its modulational index.
pub fn near_equilibrium_wave(
    pot: &Potential,
    u0: f64,
    k: f64,
    offset: f64,
) -> Result<NearEquilibriumWave> {
    let nls = nls_coefficients(pot, u0, k)?;
    let d2 = pot.d2v(u0);
    let energy = pot.v(u0) + d2.signum() * offset.abs();
    let speed = nls.omega / k.abs();
    let mut params = WaveParameters::new(energy, speed);
    if let Some(i) = pot
        .canonical_critical_points()
        .iter()
        .position(|cp| (cp.u - u0).abs() <= 1e-8)
    {
        params = params.with_family(i);
    }
    let prof = wavetrain::profile(pot, &params)?;
    let te = wavetrain::period_energy_derivative_with(pot, &prof.params, &prof.settings)?;
    let ind = spectrum::indices(&prof)?;
    Ok(NearEquilibriumWave {
        energy,
        speed,
        scaled_period_e: params.gamma() * te,
        rho: ind.rho,
    })
}
