//! Periodic Evans function D(λ, μ) = det(M(λ) − μI), stability indices,
//! spectral curve tracing, Hill band/gap spectra and instability
//! certificates.

use crate::error::{Error, Result};
use crate::floquet::{self, order_pair, ComplexMatrix2, Monodromy};
use crate::potential::Potential;
use crate::wavetrain::{self, WaveParameters, WaveProfile};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

type C64 = Complex64;

const DEGENERATE_TOL: f64 = 1e-8;
const TANGENT_TOL: f64 = 1e-10;
const ORDER_TOL: f64 = 1e-6;
const NEWTON_MAX_ITER: usize = 30;
const RESIDUAL_TOL: f64 = 1e-8;
const MIN_THETA_STEP: f64 = PI / 65536.0;
const COLLISION_TOL: f64 = 1e-10;
const REAL_SCAN_POINTS: usize = 400;
const BISECT_TOL: f64 = 1e-10;
const GAP_EXCESS_TOL: f64 = 1e-8;
const UNIT_MODULUS_TOL: f64 = 1e-6;

fn cplx(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// D(λ, μ) for a given monodromy matrix.
pub fn evans_from_matrix(m: &ComplexMatrix2, mu: C64) -> C64 {
    mu * mu - m.trace() * mu + m.det()
}

/// D(λ, μ) with det M taken from Abel's identity, exact even when the
/// multipliers differ by many orders of magnitude.
pub fn evans_from_monodromy(m: &Monodromy, mu: C64) -> C64 {
    mu * mu - m.matrix.trace() * mu + exact_det(m)
}

fn exact_det(m: &Monodromy) -> C64 {
    (m.lambda * (2.0 * m.q)).exp()
}

/// D(λ, e^{iθ}).
pub fn evans(profile: &WaveProfile, lambda: C64, theta: f64) -> Result<C64> {
    let m = floquet::monodromy(profile, lambda)?;
    Ok(evans_from_monodromy(&m, C64::from_polar(1.0, theta)))
}

/// D(λ, μ) for arbitrary complex μ.
pub fn evans_mu(profile: &WaveProfile, lambda: C64, mu: C64) -> Result<C64> {
    let m = floquet::monodromy(profile, lambda)?;
    Ok(evans_from_monodromy(&m, mu))
}

/// Floquet multipliers at λ, ordered by real part then imaginary part.
pub fn multipliers(profile: &WaveProfile, lambda: C64) -> Result<(C64, C64)> {
    Ok(floquet::monodromy(profile, lambda)?.matrix.eigenvalues())
}

/// Labels multipliers continuously along a sequence of λ queries.
#[derive(Debug, Clone, Default)]
pub struct MultiplierTracker {
    prev: Option<(C64, C64)>,
}

impl MultiplierTracker {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns (μ₊, μ₋), matched to the previous pair by nearest distance.
    pub fn next(&mut self, profile: &WaveProfile, lambda: C64) -> Result<(C64, C64)> {
        let (a, b) = multipliers(profile, lambda)?;
        let pair = match self.prev {
            None => (b, a),
            Some((p, m)) => {
                let keep = (a - p).norm() + (b - m).norm();
                let swap = (b - p).norm() + (a - m).norm();
                if (a - b).norm() <= 1e-12 || keep <= swap {
                    (a, b)
                } else {
                    (b, a)
                }
            }
        };
        self.prev = Some(pair);
        Ok(pair)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhoRoutes {
    /// M₁₂(0).
    pub m12: f64,
    /// −(c²−1)·T_E·v₀².
    pub from_period_e: f64,
    /// δ·v₀².
    pub from_delta: f64,
    /// Pairwise agreement to rel 1e−4: (m12, T_E), (m12, δ), (T_E, δ).
    pub agree: [bool; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityIndices {
    /// Parity index; `None` when no even-order derivative is detected.
    pub gamma: Option<i32>,
    pub rho: i32,
    pub kappa: f64,
    pub q: f64,
    /// D_λλ(0, 1) by a 5-point central difference.
    pub d2_evans: f64,
    /// 2(q² − κ).
    pub d2_closed_form: f64,
    /// Half the vanishing order of D(·, 1) at 0; `None` when undetected.
    pub vanish_order_p: Option<u32>,
    pub rho_routes: RhoRoutes,
    pub period_e: f64,
    pub delta: f64,
    /// ρ forced to 0 because |T_E| or |M₁₂(0)| fell below 1e−8.
    pub degenerate: bool,
}

// D(λ, μ) on real λ, μ with det M replaced by e^{2qλ}, which stays
// accurate when the multipliers are widely separated.
fn evans_real_axis(profile: &WaveProfile, lambda: f64, mu: f64) -> Result<f64> {
    let m = floquet::monodromy(profile, cplx(lambda, 0.0))?;
    Ok(mu * mu - m.matrix.trace().re * mu + (2.0 * m.q * lambda).exp())
}

/// γ, ρ, κ and supporting data.
pub fn indices(profile: &WaveProfile) -> Result<StabilityIndices> {
    let pot = &profile.potential;
    let g = profile.gamma();
    let q = profile.q();
    let series = floquet::monodromy_series(profile)?;
    let m12 = series.m0.m12.re;
    let kappa = m12 / (g * g) * series.f11_sq_integral;
    let period_e =
        wavetrain::period_energy_derivative_with(pot, &profile.params, &profile.settings)?;
    let delta = wavetrain::finite_part_delta(profile)?;
    let v02 = profile.v0 * profile.v0;
    let routes = [m12, -g * period_e * v02, delta * v02];
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-4 * a.abs().max(b.abs());
    let rho_routes = RhoRoutes {
        m12: routes[0],
        from_period_e: routes[1],
        from_delta: routes[2],
        agree: [
            close(routes[0], routes[1]),
            close(routes[0], routes[2]),
            close(routes[1], routes[2]),
        ],
    };
    let degenerate = period_e.abs() <= DEGENERATE_TOL || m12.abs() <= DEGENERATE_TOL;
    let rho = if degenerate { 0 } else { m12.signum() as i32 };

    let scale = 1.0 + q * q + kappa.abs();
    let qs = q.abs().max(1.0);
    let d = |l: f64| evans_real_axis(profile, l, 1.0);
    let h = 0.01 / qs;
    let (dm2, dm1, d0, dp1, dp2) = (d(-2.0 * h)?, d(-h)?, d(0.0)?, d(h)?, d(2.0 * h)?);
    let d2 = (-dp2 + 16.0 * dp1 - 30.0 * d0 + 16.0 * dm1 - dm2) / (12.0 * h * h);
    let (mut p, mut deriv) = (None, 0.0);
    if d2.abs() > ORDER_TOL * scale {
        p = Some(1);
        deriv = d2;
    } else {
        let h4 = 0.1 / qs;
        let v: Vec<f64> = (-3..=3).map(|k| d(k as f64 * h4)).collect::<Result<_>>()?;
        // 7-point fourth derivative, O(h²)
        let d4 = (-v[0] + 12.0 * v[1] - 39.0 * v[2] + 56.0 * v[3] - 39.0 * v[4] + 12.0 * v[5]
            - v[6])
            / (6.0 * h4.powi(4));
        if d4.abs() > ORDER_TOL * scale * scale {
            p = Some(2);
            deriv = d4;
        }
    }
    let gamma = p.map(|_| (g * deriv).signum() as i32);
    Ok(StabilityIndices {
        gamma,
        rho,
        kappa,
        q,
        d2_evans: d2,
        d2_closed_form: 2.0 * (q * q - kappa),
        vanish_order_p: p,
        rho_routes,
        period_e,
        delta,
        degenerate,
    })
}

/// Tangent slopes s₀^± = (q ± κ^{1/2})⁻¹ of the curves λ ≈ i s₀ θ.
pub fn local_tangents(ind: &StabilityIndices) -> Result<(C64, C64)> {
    let (q, kappa) = (ind.q, ind.kappa);
    if kappa.abs() <= TANGENT_TOL || (kappa - q * q).abs() <= TANGENT_TOL {
        return Err(Error::DegenerateTangent { kappa, q2: q * q });
    }
    let r = cplx(kappa, 0.0).sqrt();
    Ok(((cplx(q, 0.0) + r).inv(), (cplx(q, 0.0) - r).inv()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn label(self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub theta: f64,
    pub lambda: C64,
    pub evans_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralCurve {
    pub branch: Branch,
    pub points: Vec<CurvePoint>,
    pub tangent_s0: C64,
    /// Set when tracing stopped early.
    pub diagnostic: Option<String>,
}

impl SpectralCurve {
    pub fn max_abs_re(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.lambda.re.abs())
            .fold(0.0, f64::max)
    }

    pub fn is_complete(&self) -> bool {
        self.diagnostic.is_none()
    }
}

struct NewtonResult {
    lambda: C64,
    residual: f64,
}

fn newton(profile: &WaveProfile, theta: f64, start: C64) -> Option<NewtonResult> {
    let mu = C64::from_polar(1.0, theta);
    let eval = |l: C64| {
        floquet::monodromy(profile, l)
            .ok()
            .map(|m| (evans_from_monodromy(&m, mu), m))
    };
    let mut lambda = start;
    for _ in 0..NEWTON_MAX_ITER {
        let (d, _) = eval(lambda)?;
        let h = 1e-6 * (1.0 + lambda.norm());
        let dp = (eval(lambda + h)?.0 - eval(lambda - h)?.0) / (2.0 * h);
        if dp.norm() == 0.0 {
            return None;
        }
        let step = d / dp;
        lambda -= step;
        if !lambda.re.is_finite() || !lambda.im.is_finite() {
            return None;
        }
        if step.norm() <= 1e-11 * (1.0 + lambda.norm()) {
            break;
        }
    }
    let (d, m) = eval(lambda)?;
    let scale = 1.0 + m.matrix.trace().norm() + exact_det(&m).norm();
    let residual = d.norm();
    (residual <= RESIDUAL_TOL * scale).then_some(NewtonResult { lambda, residual })
}

/// Traces the curve λ(θ) of σ through λ = 0 along one branch for
/// θ ∈ [−θ_max, θ_max], using `n_steps` uniform θ intervals.
pub fn trace_curve(
    profile: &WaveProfile,
    branch: Branch,
    theta_max: f64,
    n_steps: usize,
) -> Result<SpectralCurve> {
    let ind = indices(profile)?;
    trace_curve_with(profile, &ind, branch, theta_max, n_steps)
}

pub fn trace_curve_with(
    profile: &WaveProfile,
    ind: &StabilityIndices,
    branch: Branch,
    theta_max: f64,
    n_steps: usize,
) -> Result<SpectralCurve> {
    if !(theta_max > 0.0 && theta_max <= PI) || n_steps < 2 {
        return Err(Error::Precondition(
            "need 0 < theta_max <= pi and n_steps >= 2".into(),
        ));
    }
    let (sp, sm) = local_tangents(ind)?;
    let s0 = match branch {
        Branch::Plus => sp,
        Branch::Minus => sm,
    };
    let half = n_steps.div_ceil(2);
    let mut diagnostic = None;
    let mut neg = trace_direction(profile, s0, -theta_max, half, &mut diagnostic);
    let pos = trace_direction(profile, s0, theta_max, half, &mut diagnostic);
    neg.reverse();
    neg.pop(); // θ = 0 appears in both halves
    neg.extend(pos);
    Ok(SpectralCurve {
        branch,
        points: neg,
        tangent_s0: s0,
        diagnostic,
    })
}

fn trace_direction(
    profile: &WaveProfile,
    s0: C64,
    theta_end: f64,
    n: usize,
    diagnostic: &mut Option<String>,
) -> Vec<CurvePoint> {
    let grid = theta_end / n as f64;
    let mut pts = vec![CurvePoint {
        theta: 0.0,
        lambda: cplx(0.0, 0.0),
        evans_residual: 0.0,
    }];
    let (mut theta, mut lambda) = (0.0, cplx(0.0, 0.0));
    let mut slope = cplx(0.0, 1.0) * s0;
    let mut dtheta = grid;
    let mut k = 1;
    while k <= n {
        let target = grid * k as f64;
        let step = if (target - theta).abs() < dtheta.abs() {
            target - theta
        } else {
            dtheta
        };
        let next = theta + step;
        let pred = lambda + slope * step;
        // Corrections larger than half a step suggest a jump to another
        // curve; the s₀ floor keeps turning points (dλ/dθ = 0) reachable.
        let reach = 0.5 * step.abs() * slope.norm().max(s0.norm());
        let accepted =
            newton(profile, next, pred).filter(|r| (r.lambda - pred).norm() <= reach + 1e-9);
        match accepted {
            Some(r) => {
                slope = (r.lambda - lambda) / step;
                theta = next;
                lambda = r.lambda;
                if (theta - target).abs() <= 1e-14 * target.abs().max(1.0) {
                    pts.push(CurvePoint {
                        theta: target,
                        lambda,
                        evans_residual: r.residual,
                    });
                    theta = target;
                    k += 1;
                }
                dtheta = (2.0 * step).abs().min(grid.abs()) * grid.signum();
            }
            None => {
                dtheta = 0.5 * step;
                if dtheta.abs() < MIN_THETA_STEP {
                    *diagnostic = Some(format!("Newton divergence near theta = {next:.6}"));
                    break;
                }
            }
        }
    }
    pts
}

/// Both branches plus the θ values where they approach within 1e−10.
pub fn trace_branches(
    profile: &WaveProfile,
    theta_max: f64,
    n_steps: usize,
) -> Result<(SpectralCurve, SpectralCurve, Vec<f64>)> {
    let ind = indices(profile)?;
    let (plus, minus) = rayon::join(
        || trace_curve_with(profile, &ind, Branch::Plus, theta_max, n_steps),
        || trace_curve_with(profile, &ind, Branch::Minus, theta_max, n_steps),
    );
    let (plus, minus) = (plus?, minus?);
    let collisions = plus
        .points
        .iter()
        .zip(minus.points.iter())
        .filter(|(a, b)| {
            a.theta != 0.0 && a.theta == b.theta && (a.lambda - b.lambda).norm() <= COLLISION_TOL
        })
        .map(|(a, _)| a.theta)
        .collect();
    Ok((plus, minus, collisions))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RealEigenvalue {
    pub lambda: f64,
    /// Width of the final bisection bracket.
    pub bracket_width: f64,
    pub evans_residual: f64,
}

/// Positive real roots of D(·, 1) (or D(·, −1) when `antiperiodic`) on
/// (0, C], C the spectral bound.
pub fn real_periodic_eigenvalues(
    profile: &WaveProfile,
    antiperiodic: bool,
) -> Result<Vec<RealEigenvalue>> {
    real_roots_on(profile, antiperiodic, spectral_bound(profile))
}

pub fn real_roots_on(
    profile: &WaveProfile,
    antiperiodic: bool,
    lambda_max: f64,
) -> Result<Vec<RealEigenvalue>> {
    let mu = if antiperiodic { -1.0 } else { 1.0 };
    let n = REAL_SCAN_POINTS;
    let grid: Vec<f64> = (1..=n).map(|k| lambda_max * k as f64 / n as f64).collect();
    let vals: Vec<f64> = grid
        .par_iter()
        .map(|&l| evans_real_axis(profile, l, mu))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for i in 0..n - 1 {
        if vals[i] == 0.0 {
            out.push(RealEigenvalue {
                lambda: grid[i],
                bracket_width: 0.0,
                evans_residual: 0.0,
            });
            continue;
        }
        if vals[i].signum() == vals[i + 1].signum() || vals[i + 1] == 0.0 {
            continue;
        }
        let (mut lo, mut hi) = (grid[i], grid[i + 1]);
        let slo = vals[i].signum();
        // Bisect to the bracket tolerance, then keep halving while the
        // residual is above 1e−10 and the bracket is resolvable.
        let (mut lambda, mut resid) = (0.5 * (lo + hi), f64::INFINITY);
        while hi - lo > BISECT_TOL || (resid > BISECT_TOL && hi - lo > 8.0 * f64::EPSILON * hi) {
            lambda = 0.5 * (lo + hi);
            let d = evans_real_axis(profile, lambda, mu)?;
            resid = d.abs();
            if d == 0.0 {
                break;
            }
            if d.signum() == slo {
                lo = lambda;
            } else {
                hi = lambda;
            }
        }
        out.push(RealEigenvalue {
            lambda,
            bracket_width: hi - lo,
            evans_residual: resid,
        });
    }
    if vals[n - 1] == 0.0 {
        out.push(RealEigenvalue {
            lambda: grid[n - 1],
            bracket_width: 0.0,
            evans_residual: 0.0,
        });
    }
    Ok(out)
}

/// G(λ) = log|μ₊(λ)|·log|μ₋(λ)|.
pub fn g_function(profile: &WaveProfile, lambda: C64) -> Result<f64> {
    let m = floquet::monodromy(profile, lambda)?;
    Ok(g_from_matrix(&m.matrix, m.q, lambda))
}

fn g_from_matrix(m: &ComplexMatrix2, q: f64, lambda: C64) -> f64 {
    let (a, b) = m.eigenvalues();
    let big = if a.norm() >= b.norm() { a } else { b };
    let l_big = big.norm().ln();
    // log|μ₊| + log|μ₋| = log|det M| = 2q Re λ
    let l_small = 2.0 * q * lambda.re - l_big;
    l_big * l_small
}

/// Bound on the unstable spectrum: |λ| ≤ C (subluminal) or |Re λ| ≤ C
/// (superluminal).
pub fn spectral_bound(profile: &WaveProfile) -> f64 {
    let pot = &profile.potential;
    let m = pot.max_abs_d2_global().unwrap_or_else(|| {
        let (lo, hi) = match profile.turning {
            Some(tp) => (tp.f_minus, tp.f_plus),
            None => (profile.u0, profile.u0 + std::f64::consts::TAU),
        };
        pot.max_abs_d2(lo, hi)
    });
    let c = profile.speed();
    if profile.class.is_subluminal() {
        m.sqrt()
    } else {
        let c2 = c * c;
        ((2.0 * m).sqrt() * c.abs()).max(0.25 * (2.0 * c2 + 1.0 + (c2 - 1.0) / c2))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CertificateKind {
    RealPeriodicEigenvalue,
    GSignChange,
    CurveTransversal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InstabilityCertificate {
    pub lambda0: C64,
    pub kind: CertificateKind,
    /// |G(λ₀)| for G certificates, |D(λ₀, ·)| otherwise.
    pub residual: f64,
    pub bracket: Option<(f64, f64)>,
    /// θ minimizing |D(λ₀, e^{iθ})| and the minimum.
    pub theta: f64,
    pub min_abs_evans: f64,
    /// Number of multipliers with |log|μ|| ≤ 1e−6.
    pub unit_multipliers: usize,
}

/// Spectrum point with Re λ > 0 from a sign change of G between the
/// imaginary preimage of a negative Hill gap and a point beyond the
/// spectral bound.
pub fn find_unstable_point(profile: &WaveProfile) -> Result<InstabilityCertificate> {
    if profile.class.is_subluminal() {
        return Err(Error::Precondition(
            "G-function search requires a superluminal wave".into(),
        ));
    }
    let g = profile.gamma();
    let mut window = default_nu_window(profile);
    let mut gap = None;
    for _ in 0..2 {
        let hill = hill_spectrum(profile, window)?;
        gap = hill
            .gaps
            .iter()
            .filter(|(lo, hi)| 0.5 * (lo + hi) < 0.0)
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .copied();
        if gap.is_some() {
            break;
        }
        window *= 4.0;
    }
    let (lo, hi) = gap.ok_or(Error::NoGapFound)?;
    let nu_mid = 0.5 * (lo + hi);
    let y = g.abs() * (-nu_mid).sqrt();
    let g_at = |t: f64| g_function(profile, cplx(t, y));
    let g_minus = g_at(0.0)?;
    if !(g_minus < 0.0) {
        return Err(Error::NoGapFound);
    }
    let mut c_re = 1.5 * spectral_bound(profile);
    let mut g_plus = g_at(c_re)?;
    for _ in 0..4 {
        if g_plus > 0.0 {
            break;
        }
        c_re *= 2.0;
        g_plus = g_at(c_re)?;
    }
    if !(g_plus > 0.0) {
        return Err(Error::NoGapFound);
    }
    let (mut a, mut b) = (0.0, c_re);
    while b - a > BISECT_TOL {
        let mid = 0.5 * (a + b);
        if g_at(mid)? < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let lambda0 = cplx(0.5 * (a + b), y);
    let m = floquet::monodromy(profile, lambda0)?;
    let residual = g_from_matrix(&m.matrix, m.q, lambda0).abs();
    let (mu1, mu2) = m.matrix.eigenvalues();
    let unit = if mu1.norm().ln().abs() <= mu2.norm().ln().abs() {
        mu1
    } else {
        mu2
    };
    let (theta, min_abs_evans) = minimize_theta(&m, unit.arg());
    let unit_multipliers = unit_count(&m.matrix);
    Ok(InstabilityCertificate {
        lambda0,
        kind: CertificateKind::GSignChange,
        residual,
        bracket: Some((a, b)),
        theta,
        min_abs_evans,
        unit_multipliers,
    })
}

fn unit_count(m: &ComplexMatrix2) -> usize {
    let (a, b) = m.eigenvalues();
    [a, b]
        .iter()
        .filter(|z| z.norm().ln().abs() <= UNIT_MODULUS_TOL)
        .count()
}

/// Certificate for a positive real periodic (μ = 1) or antiperiodic
/// (μ = −1) eigenvalue.
pub fn real_eigenvalue_certificate(
    profile: &WaveProfile,
    root: &RealEigenvalue,
    antiperiodic: bool,
) -> Result<InstabilityCertificate> {
    let lambda0 = cplx(root.lambda, 0.0);
    let m = floquet::monodromy(profile, lambda0)?;
    let theta = if antiperiodic { PI } else { 0.0 };
    Ok(InstabilityCertificate {
        lambda0,
        kind: CertificateKind::RealPeriodicEigenvalue,
        residual: root.evans_residual,
        bracket: Some((
            root.lambda - 0.5 * root.bracket_width,
            root.lambda + 0.5 * root.bracket_width,
        )),
        theta,
        min_abs_evans: evans_from_monodromy(&m, C64::from_polar(1.0, theta)).norm(),
        unit_multipliers: unit_count(&m.matrix),
    })
}

/// Certificate from the traced point with the largest Re λ, if it exceeds
/// 1e−6.
pub fn curve_certificate(
    profile: &WaveProfile,
    curve: &SpectralCurve,
) -> Result<Option<InstabilityCertificate>> {
    let Some(best) = curve
        .points
        .iter()
        .max_by(|a, b| a.lambda.re.total_cmp(&b.lambda.re))
    else {
        return Ok(None);
    };
    if best.lambda.re <= 1e-6 {
        return Ok(None);
    }
    let m = floquet::monodromy(profile, best.lambda)?;
    Ok(Some(InstabilityCertificate {
        lambda0: best.lambda,
        kind: CertificateKind::CurveTransversal,
        residual: best.evans_residual,
        bracket: None,
        theta: best.theta,
        min_abs_evans: best.evans_residual,
        unit_multipliers: unit_count(&m.matrix),
    }))
}

// Golden-section refinement of |D(λ, e^{iθ})| around θ₀.
fn minimize_theta(m: &Monodromy, theta0: f64) -> (f64, f64) {
    let f = |t: f64| evans_from_monodromy(m, C64::from_polar(1.0, t)).norm();
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (theta0 - 1e-3, theta0 + 1e-3);
    for _ in 0..60 {
        let x1 = b - r * (b - a);
        let x2 = a + r * (b - a);
        if f(x1) < f(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    let t = 0.5 * (a + b);
    let best = if f(t) <= f(theta0) { t } else { theta0 };
    (best, f(best))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HillSpectrum {
    pub bands: Vec<(f64, f64)>,
    /// Periodic eigenvalues ν_j^(0) in descending order (index j).
    pub periodic_eigenvalues: Vec<f64>,
    /// Antiperiodic eigenvalues ν_j^(π) in descending order.
    pub antiperiodic_eigenvalues: Vec<f64>,
    pub gaps: Vec<(f64, f64)>,
    pub scan_window: (f64, f64),
}

/// Max of P(z) = V″(f(z))/(c²−1) over the profile.
pub fn max_hill_potential(profile: &WaveProfile) -> f64 {
    let g = profile.gamma();
    (0..=1024)
        .map(|i| {
            let z = profile.period * i as f64 / 1024.0;
            profile.potential.d2v(profile.eval(z).0) / g
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn default_nu_window(profile: &WaveProfile) -> f64 {
    let pmax = (0..=256)
        .map(|i| {
            let z = profile.period * i as f64 / 256.0;
            (profile.potential.d2v(profile.eval(z).0) / profile.gamma()).abs()
        })
        .fold(0.0, f64::max);
    -((4.0 * PI / profile.period).powi(2) + pmax)
}

/// Bands and gaps of Hill's equation y″ + P y = ν y on [ν_min, ν_max],
/// ν_max = max(1, 2 max P).
pub fn hill_spectrum(profile: &WaveProfile, nu_min: f64) -> Result<HillSpectrum> {
    if !(nu_min < 0.0) {
        return Err(Error::Precondition("nu_min must be negative".into()));
    }
    let nu_max = 1f64.max(2.0 * max_hill_potential(profile));
    let pabs = max_hill_potential(profile).abs();
    let osc = profile.period * (pabs - nu_min).max(0.0).sqrt() / PI;
    let n = 400usize.max((40.0 * (osc + 1.0)).ceil() as usize);
    let step = (nu_max - nu_min) / n as f64;
    let grid: Vec<f64> = (0..=n)
        .map(|i| {
            let nu = nu_min + step * i as f64;
            if i > 0 && i < n && nu.abs() < 0.05 * step {
                nu + 0.25 * step
            } else {
                nu
            }
        })
        .collect();
    let vals: Vec<f64> = grid
        .par_iter()
        .map(|&nu| floquet::hill_discriminant(profile, nu))
        .collect::<Result<_>>()?;

    let mut edges: Vec<(f64, bool)> = Vec::new(); // (ν, periodic)
    for i in 0..n {
        for target in [2.0, -2.0] {
            let (a, b) = (vals[i] - target, vals[i + 1] - target);
            if a.signum() != b.signum() && a != 0.0 {
                let (mut lo, mut hi) = (grid[i], grid[i + 1]);
                let slo = a.signum();
                while hi - lo > BISECT_TOL {
                    let mid = 0.5 * (lo + hi);
                    if (floquet::hill_discriminant(profile, mid)? - target).signum() == slo {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                edges.push((0.5 * (lo + hi), target > 0.0));
            }
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut bands = Vec::new();
    let mut in_band = vals[0].abs() <= 2.0;
    let mut start = nu_min;
    for &(nu, _) in &edges {
        if in_band {
            bands.push((start, nu));
        } else {
            start = nu;
        }
        in_band = !in_band;
    }
    if in_band {
        bands.push((start, nu_max));
    }
    if bands.is_empty() {
        return Err(Error::WindowTooNarrow);
    }
    // merge numerically closed gaps
    let mut merged: Vec<(f64, f64)> = vec![bands[0]];
    let mut gaps = Vec::new();
    for &b in &bands[1..] {
        let last = merged.last_mut().expect("non-empty");
        let mid = 0.5 * (last.1 + b.0);
        let excess = floquet::hill_discriminant(profile, mid)?.abs() - 2.0;
        if excess > GAP_EXCESS_TOL {
            gaps.push((last.1, b.0));
            merged.push(b);
        } else {
            last.1 = b.1;
        }
    }
    let desc = |periodic: bool| {
        let mut v: Vec<f64> = edges
            .iter()
            .filter(|e| e.1 == periodic)
            .map(|e| e.0)
            .collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    };
    Ok(HillSpectrum {
        bands: merged,
        periodic_eigenvalues: desc(true),
        antiperiodic_eigenvalues: desc(false),
        gaps,
        scan_window: (nu_min, nu_max),
    })
}

/// Hill spectrum with the default negative window.
pub fn hill_spectrum_default(profile: &WaveProfile) -> Result<HillSpectrum> {
    hill_spectrum(profile, default_nu_window(profile))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ModulationalClass {
    Stable,
    WeakInstabilityPossible,
    StrongInstability,
    Degenerate,
}

pub fn classify_modulational(ind: &StabilityIndices) -> ModulationalClass {
    if ind.rho == 0 {
        return ModulationalClass::Degenerate;
    }
    if ind.rho == -1 {
        return ModulationalClass::StrongInstability;
    }
    let scale = 1.0 + ind.q * ind.q;
    if (ind.kappa - ind.q * ind.q).abs() <= TANGENT_TOL * scale
        && ind.vanish_order_p.is_some_and(|p| p > 1)
    {
        return ModulationalClass::StrongInstability;
    }
    ModulationalClass::WeakInstabilityPossible
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stability {
    Stable,
    Unstable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfiniteSpeedVerdict {
    pub stability: Stability,
    /// Gaps intersecting ν < 0.
    pub negative_gaps: Vec<(f64, f64)>,
    pub hill: HillSpectrum,
}

/// Stability of the c → ∞ limit, decided on the c = √2 profile: stable iff
/// the Hill spectrum has no gap on the negative half-axis.
pub fn infinite_speed_stability(pot: &Potential, energy: f64) -> Result<InfiniteSpeedVerdict> {
    let prof = wavetrain::profile(pot, &WaveParameters::new(energy, std::f64::consts::SQRT_2))?;
    infinite_speed_stability_of(&prof)
}

pub fn infinite_speed_stability_of(profile: &WaveProfile) -> Result<InfiniteSpeedVerdict> {
    if (profile.gamma() - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition(
            "infinite-speed analysis uses the c^2 = 2 profile".into(),
        ));
    }
    let hill = hill_spectrum_default(profile)?;
    let negative_gaps: Vec<(f64, f64)> = hill.gaps.iter().filter(|g| g.0 < 0.0).copied().collect();
    let stability = if negative_gaps.is_empty() {
        Stability::Stable
    } else {
        Stability::Unstable
    };
    Ok(InfiniteSpeedVerdict {
        stability,
        negative_gaps,
        hill,
    })
}

/// Multipliers of M(λ) paired with those of e^{−qλ}-scaled Hill monodromy.
pub fn hill_multipliers(profile: &WaveProfile, lambda: C64) -> Result<(C64, C64)> {
    let nu = lambda * lambda / (profile.gamma() * profile.gamma());
    let h = floquet::hill_evaluation(profile, nu)?;
    let (a, b) = h.matrix.eigenvalues();
    Ok(order_pair(a, b))
}
