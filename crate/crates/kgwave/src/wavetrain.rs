//! Periodic traveling-wave profiles f(z), z = x − ct, of the Klein-Gordon
//! equation, with ½(c²−1)f_z² = E − V(f).

use crate::error::{Error, Result};
use crate::ode::{self, DenseOutput, Tolerance};
use crate::potential::{CriticalKind, CriticalPoint, Potential};
use crate::quad::tanh_sinh;
use crate::settings::Settings;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

const SEPARATRIX_TOL: f64 = 1e-10;
const SONIC_TOL: f64 = 1e-10;
const PERIOD_OVERFLOW: f64 = 1e6;
const POLY_SEARCH_LIMIT: f64 = 1e6;
const ZERO_TOL: f64 = 1e-12;

/// Energy E and speed c of a wave, plus an optional librational family
/// key (index into [`Potential::canonical_critical_points`]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveParameters {
    pub energy: f64,
    pub speed: f64,
    #[serde(default)]
    pub family: Option<usize>,
}

impl WaveParameters {
    pub fn new(energy: f64, speed: f64) -> Self {
        WaveParameters {
            energy,
            speed,
            family: None,
        }
    }

    pub fn with_family(mut self, family: usize) -> Self {
        self.family = Some(family);
        self
    }

    /// c² − 1.
    pub fn gamma(&self) -> f64 {
        self.speed * self.speed - 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WaveClass {
    SubluminalLibrational,
    SubluminalRotational,
    SuperluminalLibrational,
    SuperluminalRotational,
}

impl WaveClass {
    pub fn is_librational(self) -> bool {
        matches!(
            self,
            WaveClass::SubluminalLibrational | WaveClass::SuperluminalLibrational
        )
    }

    pub fn is_rotational(self) -> bool {
        !self.is_librational()
    }

    pub fn is_subluminal(self) -> bool {
        matches!(
            self,
            WaveClass::SubluminalLibrational | WaveClass::SubluminalRotational
        )
    }

    pub fn is_superluminal(self) -> bool {
        !self.is_subluminal()
    }

    pub fn label(self) -> &'static str {
        match self {
            WaveClass::SubluminalLibrational => "subluminal_librational",
            WaveClass::SubluminalRotational => "subluminal_rotational",
            WaveClass::SuperluminalLibrational => "superluminal_librational",
            WaveClass::SuperluminalRotational => "superluminal_rotational",
        }
    }
}

/// Endpoints of a librational oscillation, bracketing one critical point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningPoints {
    pub f_minus: f64,
    pub f_plus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub class: WaveClass,
    /// Enclosed critical point index for librational waves.
    pub family: Option<usize>,
    /// Normalized starting point f(0).
    pub u0: f64,
    pub turning: Option<TurningPoints>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodData {
    pub period: f64,
    pub period_e: f64,
    pub delta: f64,
    pub v0: f64,
}

/// Decides the region of (E, c) and locates the orbit.
pub fn classify(pot: &Potential, params: &WaveParameters) -> Result<Classification> {
    let (e, g) = (params.energy, params.gamma());
    if !e.is_finite() || !params.speed.is_finite() {
        return Err(Error::NotInDomain("non-finite parameters".into()));
    }
    if g.abs() <= SONIC_TOL {
        return Err(Error::SonicSpeed(params.speed));
    }
    let cps = pot.canonical_critical_points();
    if let Some(cp) = cps.iter().find(|cp| (e - cp.value).abs() <= SEPARATRIX_TOL) {
        return Err(Error::OnSeparatrix {
            energy: e,
            critical_value: cp.value,
        });
    }
    let s = g.signum();
    let superluminal = s > 0.0;

    if pot.period().is_some() {
        if let Some((vmin, vmax)) = pot.critical_value_range() {
            let rotational = if superluminal { e > vmax } else { e < vmin };
            if rotational {
                let anchor = extremal(cps, superluminal);
                let class = if superluminal {
                    WaveClass::SuperluminalRotational
                } else {
                    WaveClass::SubluminalRotational
                };
                return Ok(Classification {
                    class,
                    family: None,
                    u0: anchor.u,
                    turning: None,
                });
            }
        }
    }

    let wanted = if superluminal {
        CriticalKind::Min
    } else {
        CriticalKind::Max
    };
    let mut found = None;
    for (i, cp) in cps.iter().enumerate() {
        if params.family.is_some_and(|f| f != i) {
            continue;
        }
        if cp.kind != wanted || s * (e - cp.value) <= 0.0 {
            continue;
        }
        if let Some(tp) = well(pot, cp, e, s) {
            found = Some((i, cp.u, tp));
            break;
        }
    }
    match found {
        Some((i, u0, tp)) => Ok(Classification {
            class: if superluminal {
                WaveClass::SuperluminalLibrational
            } else {
                WaveClass::SubluminalLibrational
            },
            family: Some(i),
            u0,
            turning: Some(tp),
        }),
        None => Err(Error::NotInDomain(format!(
            "no periodic orbit with E = {e}, c = {}{}",
            params.speed,
            params
                .family
                .map(|f| format!(" in family {f}"))
                .unwrap_or_default()
        ))),
    }
}

fn extremal(cps: &[CriticalPoint], lowest: bool) -> CriticalPoint {
    let mut best = cps[0];
    for cp in cps {
        if (lowest && cp.value < best.value) || (!lowest && cp.value > best.value) {
            best = *cp;
        }
    }
    best
}

/// Bounded well {s(E − V) > 0} around `cp` containing no other critical point.
fn well(pot: &Potential, cp: &CriticalPoint, e: f64, s: f64) -> Option<TurningPoints> {
    let g = |u: f64| s * (e - pot.v(u));
    let right = edge(pot, cp.u, 1.0, &g)?;
    let left = edge(pot, cp.u, -1.0, &g)?;
    let tp = TurningPoints {
        f_minus: left,
        f_plus: right,
    };
    (enclosed_count(pot, &tp) == 1).then_some(tp)
}

fn edge(pot: &Potential, u: f64, dir: f64, g: &impl Fn(f64) -> f64) -> Option<f64> {
    let (mut step, grow, limit) = match pot.period() {
        Some(p) => (p / 512.0, 1.0, p),
        None => (1e-3 * (1.0 + u.abs()), 1.1, POLY_SEARCH_LIMIT),
    };
    let mut inside = u;
    loop {
        let next = inside + dir * step;
        if (next - u).abs() > limit {
            return None;
        }
        if g(next) <= 0.0 {
            return Some(bisect_edge(inside, next, g));
        }
        inside = next;
        step *= grow;
    }
}

// Returns the inside end of a machine-precision bracket.
fn bisect_edge(mut inside: f64, mut outside: f64, g: &impl Fn(f64) -> f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (inside + outside);
        if mid == inside || mid == outside {
            break;
        }
        if g(mid) > 0.0 {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    inside
}

fn enclosed_count(pot: &Potential, tp: &TurningPoints) -> usize {
    let cps = pot.canonical_critical_points();
    match pot.period() {
        Some(p) => {
            let mut n = 0;
            for cp in cps {
                let k0 = ((tp.f_minus - cp.u) / p).floor() as i64;
                for k in k0..=k0 + 2 {
                    let u = cp.u + k as f64 * p;
                    if u > tp.f_minus && u < tp.f_plus {
                        n += 1;
                    }
                }
            }
            n
        }
        None => cps
            .iter()
            .filter(|cp| cp.u > tp.f_minus && cp.u < tp.f_plus)
            .count(),
    }
}

/// Endpoints of the librational oscillation.
pub fn turning_points(pot: &Potential, params: &WaveParameters) -> Result<TurningPoints> {
    classify(pot, params)?.turning.ok_or(Error::NotLibrational)
}

/// Orbit integrals over one period written in the f variable.
struct Orbit<'a> {
    pot: &'a Potential,
    e: f64,
    s: f64,
    cls: Classification,
}

impl<'a> Orbit<'a> {
    fn new(pot: &'a Potential, params: &WaveParameters) -> Result<Self> {
        let cls = classify(pot, params)?;
        Ok(Orbit {
            pot,
            e: params.energy,
            s: params.gamma().signum(),
            cls,
        })
    }

    /// ∮ h(g(η)) dη over the orbit in f, with g = s(E − V) > 0 inside.
    /// Librational orbits are traversed twice.
    fn integrate(&self, h: impl Fn(f64) -> f64, tol: f64) -> Result<f64> {
        let (pot, e, s) = (self.pot, self.e, self.s);
        match self.cls.turning {
            None => {
                let a = self.cls.u0;
                tanh_sinh(|x, _, _| h(s * (e - pot.v(x))), a, a + TAU, tol)
            }
            Some(tp) => {
                let width = tp.f_plus - tp.f_minus;
                let dl = pot.derivs(tp.f_minus);
                let dr = pot.derivs(tp.f_plus);
                let near = 1e-5 * width;
                let v = tanh_sinh(
                    |x, da, db| {
                        let g = if da < near {
                            -s * (dl[1] * da + 0.5 * dl[2] * da * da + dl[3] * da * da * da / 6.0)
                        } else if db < near {
                            s * (dr[1] * db - 0.5 * dr[2] * db * db + dr[3] * db * db * db / 6.0)
                        } else {
                            s * (e - pot.v(x))
                        };
                        if g > 0.0 {
                            h(g)
                        } else {
                            0.0
                        }
                    },
                    tp.f_minus,
                    tp.f_plus,
                    tol,
                )?;
                Ok(2.0 * v)
            }
        }
    }
}

/// Fundamental period T of f_z.
pub fn period(pot: &Potential, params: &WaveParameters) -> Result<f64> {
    period_with(pot, params, &Settings::default())
}

pub fn period_with(pot: &Potential, params: &WaveParameters, settings: &Settings) -> Result<f64> {
    let orbit = Orbit::new(pot, params)?;
    let scale = (0.5 * params.gamma().abs()).sqrt();
    let t = scale * orbit.integrate(|g| 1.0 / g.sqrt(), settings.quad_tol / scale)?;
    if !(t <= PERIOD_OVERFLOW) {
        return Err(Error::Overflow(t));
    }
    Ok(t)
}

/// ∂T/∂E. Rotational waves use the analytic 3/2-power integral; librational
/// waves use a Richardson-extrapolated 5-point central difference.
pub fn period_energy_derivative(pot: &Potential, params: &WaveParameters) -> Result<f64> {
    period_energy_derivative_with(pot, params, &Settings::default())
}

pub fn period_energy_derivative_with(
    pot: &Potential,
    params: &WaveParameters,
    settings: &Settings,
) -> Result<f64> {
    let orbit = Orbit::new(pot, params)?;
    let g = params.gamma();
    if orbit.cls.class.is_rotational() {
        let scale = 0.5 * (0.5 * g.abs()).sqrt();
        let i = orbit.integrate(|x| x.powf(-1.5), settings.quad_tol / scale)?;
        return Ok(-g.signum() * scale * i);
    }
    let dist = pot
        .canonical_critical_points()
        .iter()
        .map(|cp| (params.energy - cp.value).abs())
        .fold(f64::INFINITY, f64::min);
    let h = 1e-4 * dist;
    if !(h > 1e-13 * (1.0 + params.energy.abs())) {
        return Err(Error::StepUnderflow);
    }
    let t_at = |de: f64| {
        let mut p = *params;
        p.energy += de;
        p.family = orbit.cls.family;
        period_with(pot, &p, settings)
    };
    let five_point = |h: f64| -> Result<f64> {
        Ok((t_at(-2.0 * h)? - 8.0 * t_at(-h)? + 8.0 * t_at(h)? - t_at(2.0 * h)?) / (12.0 * h))
    };
    let d1 = five_point(h)?;
    let d2 = five_point(0.5 * h)?;
    Ok((16.0 * d2 - d1) / 15.0)
}

/// W(E, c) = (c²−1)∫₀ᵀ f_z² dz.
pub fn averaged_w(pot: &Potential, params: &WaveParameters) -> Result<f64> {
    averaged_w_with(pot, params, &Settings::default())
}

pub fn averaged_w_with(
    pot: &Potential,
    params: &WaveParameters,
    settings: &Settings,
) -> Result<f64> {
    let orbit = Orbit::new(pot, params)?;
    let g = params.gamma();
    let scale = (2.0 * g.abs()).sqrt();
    Ok(g.signum() * scale * orbit.integrate(|x| x.sqrt(), settings.quad_tol / scale)?)
}

/// T, T_E, δ and v₀ together.
pub fn period_data(pot: &Potential, params: &WaveParameters) -> Result<PeriodData> {
    let prof = profile(pot, params)?;
    Ok(PeriodData {
        period: prof.period,
        period_e: period_energy_derivative_with(pot, params, &prof.settings)?,
        delta: finite_part_delta(&prof)?,
        v0: prof.v0,
    })
}

/// One record of the profile export.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileSample {
    pub z: f64,
    pub f: f64,
    pub f_z: f64,
    pub energy_residual: f64,
}

/// Normalized wave f(z) on one period, with dense output.
#[derive(Debug, Clone)]
pub struct WaveProfile {
    pub potential: Potential,
    pub params: WaveParameters,
    pub class: WaveClass,
    pub family: Option<usize>,
    pub turning: Option<TurningPoints>,
    pub period: f64,
    pub u0: f64,
    pub v0: f64,
    pub settings: Settings,
    // states: f, f_z, ∫f_z², ∫V(f)
    dense: DenseOutput,
}

/// Integrates the profile ODE from the normalized initial condition.
pub fn profile(pot: &Potential, params: &WaveParameters) -> Result<WaveProfile> {
    profile_with(pot, params, &Settings::default())
}

pub fn profile_with(
    pot: &Potential,
    params: &WaveParameters,
    settings: &Settings,
) -> Result<WaveProfile> {
    let cls = classify(pot, params)?;
    let mut params = *params;
    params.family = cls.family;
    let period = period_with(pot, &params, settings)?;
    let g = params.gamma();
    let u0 = cls.u0;
    let v0 = (2.0 * (params.energy - pot.v(u0)) / g).sqrt();
    let tr = ode::integrate(
        |_, y, dy| {
            let v = pot.derivs(y[0]);
            dy[0] = y[1];
            dy[1] = -v[1] / g;
            dy[2] = y[1] * y[1];
            dy[3] = v[0];
        },
        0.0,
        &[u0, v0, 0.0, 0.0],
        period,
        Tolerance {
            rtol: settings.ode_rtol,
            atol: settings.ode_atol,
        },
        true,
    )?;
    Ok(WaveProfile {
        potential: pot.clone(),
        params,
        class: cls.class,
        family: cls.family,
        turning: cls.turning,
        period,
        u0,
        v0,
        settings: *settings,
        dense: tr.dense.expect("dense output requested"),
    })
}

impl WaveProfile {
    pub fn energy(&self) -> f64 {
        self.params.energy
    }

    pub fn speed(&self) -> f64 {
        self.params.speed
    }

    /// c² − 1.
    pub fn gamma(&self) -> f64 {
        self.params.gamma()
    }

    /// q = cT/(c²−1).
    pub fn q(&self) -> f64 {
        self.speed() * self.period / self.gamma()
    }

    pub fn tolerance(&self) -> Tolerance {
        Tolerance {
            rtol: self.settings.ode_rtol,
            atol: self.settings.ode_atol,
        }
    }

    /// (f, f_z) at z ∈ [0, T].
    pub fn eval(&self, z: f64) -> (f64, f64) {
        let mut buf = [0.0; 4];
        self.dense.eval_into(z, &mut buf);
        (buf[0], buf[1])
    }

    /// f_zz = −V′(f)/(c²−1).
    pub fn f_zz(&self, z: f64) -> f64 {
        -self.potential.dv(self.eval(z).0) / self.gamma()
    }

    /// ∫₀ᵀ f_z² dz accumulated along the integration.
    pub fn integral_fz2(&self) -> f64 {
        self.dense.eval(self.period)[2]
    }

    /// ∫₀ᵀ V(f) dz accumulated along the integration.
    pub fn integral_v(&self) -> f64 {
        self.dense.eval(self.period)[3]
    }

    pub fn energy_residual(&self, z: f64) -> f64 {
        let (f, fz) = self.eval(z);
        (0.5 * self.gamma() * fz * fz - (self.energy() - self.potential.v(f))).abs()
    }

    /// `n + 1` equally spaced samples on [0, T].
    pub fn samples(&self, n: usize) -> Vec<ProfileSample> {
        let n = n.max(1);
        (0..=n)
            .map(|i| {
                let z = self.period * i as f64 / n as f64;
                let (f, f_z) = self.eval(z);
                ProfileSample {
                    z,
                    f,
                    f_z,
                    energy_residual: self.energy_residual(z),
                }
            })
            .collect()
    }

    /// Zeros of f_z in (0, T), located by bisection on the dense output.
    pub fn fz_zeros(&self) -> Vec<f64> {
        let n = 512;
        let t = self.period;
        let mut out = Vec::new();
        let mut prev = (0.0, self.eval(0.0).1);
        for i in 1..=n {
            let z = t * i as f64 / n as f64;
            let v = self.eval(z).1;
            if v == 0.0 && i < n {
                out.push(z);
            } else if prev.1 != 0.0 && v.signum() != prev.1.signum() {
                let (mut lo, mut hi) = (prev.0, z);
                let slo = prev.1.signum();
                while hi - lo > ZERO_TOL {
                    let mid = 0.5 * (lo + hi);
                    if self.eval(mid).1.signum() == slo {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                out.push(0.5 * (lo + hi));
            }
            prev = (z, v);
        }
        out
    }
}

/// Finite-part regularization δ of ∫₀ᵀ dy/f_z².
///
/// Near each zero z_k of f_z the regularized integrand is replaced by its
/// even Taylor expansion r₀ + r₂s², since the subtraction of the double
/// pole loses all digits there.
pub fn finite_part_delta(profile: &WaveProfile) -> Result<f64> {
    let t = profile.period;
    let tol = profile.settings.quad_tol;
    if profile.class.is_rotational() {
        return tanh_sinh(|z, _, _| 1.0 / profile.eval(z).1.powi(2), 0.0, t, tol);
    }
    let zeros = profile.fz_zeros();
    if zeros.len() != 2 {
        return Err(Error::ZeroLocationFailure(format!(
            "expected 2 zeros of f_z, found {}",
            zeros.len()
        )));
    }
    let g = profile.gamma();
    let pot = &profile.potential;
    struct Zero {
        z: f64,
        a2: f64,
        r0: f64,
        r2: f64,
    }
    let zs: Vec<Zero> = zeros
        .iter()
        .map(|&z| {
            let d = pot.derivs(profile.eval(z).0);
            let a = -d[1] / g;
            let g1 = -d[2] / g;
            let g2 = -d[3] / g;
            let alpha = g1 / 6.0;
            let beta = (3.0 * g2 * a + g1 * g1) / 120.0;
            Zero {
                z,
                a2: a * a,
                r0: -2.0 * alpha / (a * a),
                r2: (3.0 * alpha * alpha - 2.0 * beta) / (a * a),
            }
        })
        .collect();
    let spacing = [zs[0].z, zs[1].z - zs[0].z, t - zs[1].z]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    if spacing <= 0.0 {
        return Err(Error::ZeroLocationFailure(
            "zeros too close to the period ends".into(),
        ));
    }
    let w = (0.05f64).min(0.1 * spacing);

    let regular = |y: f64| {
        let fz = profile.eval(y).1;
        let mut v = 1.0 / (fz * fz);
        for k in &zs {
            v -= 1.0 / (k.a2 * (y - k.z).powi(2));
        }
        v
    };
    let breaks = [0.0, zs[0].z - w, zs[0].z + w, zs[1].z - w, zs[1].z + w, t];
    let mut total = 0.0;
    for i in [0, 2, 4] {
        total += tanh_sinh(|y, _, _| regular(y), breaks[i], breaks[i + 1], tol)?;
    }
    for (j, zj) in zs.iter().enumerate() {
        total += 2.0 * w * zj.r0 + 2.0 / 3.0 * w.powi(3) * zj.r2;
        for (k, zk) in zs.iter().enumerate() {
            if k != j {
                let (lo, hi) = (zj.z - w - zk.z, zj.z + w - zk.z);
                total -= (1.0 / lo - 1.0 / hi) / zk.a2;
            }
        }
    }
    for k in &zs {
        total -= (1.0 / k.z + 1.0 / (t - k.z)) / k.a2;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_regions() {
        let sg = Potential::sine_gordon();
        let c = |e: f64, c: f64| classify(&sg, &WaveParameters::new(e, c)).map(|x| x.class);
        assert_eq!(
            c(0.0, 2f64.sqrt()).unwrap(),
            WaveClass::SuperluminalLibrational
        );
        assert_eq!(c(0.0, 0.5).unwrap(), WaveClass::SubluminalLibrational);
        assert_eq!(c(-2.0, 0.5).unwrap(), WaveClass::SubluminalRotational);
        assert_eq!(c(2.0, 2.0).unwrap(), WaveClass::SuperluminalRotational);
        assert!(matches!(c(1.0, 2.0), Err(Error::OnSeparatrix { .. })));
        assert!(matches!(c(0.0, 1.0), Err(Error::SonicSpeed(_))));
    }

    #[test]
    fn sine_gordon_turning_points() {
        let sg = Potential::sine_gordon();
        let tp = turning_points(&sg, &WaveParameters::new(0.0, 2f64.sqrt())).unwrap();
        assert!((tp.f_minus + std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!((tp.f_plus - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }
}
