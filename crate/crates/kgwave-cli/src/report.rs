use crate::args::WaveArgs;
use anyhow::Result;
use kgwave::floquet;
use kgwave::modulation;
use kgwave::spectrum::{self, Branch, InstabilityCertificate, ModulationalClass, StabilityIndices};
use kgwave::wavetrain::{self, TurningPoints, WaveClass, WaveProfile};
use kgwave::{Potential, Settings};
use num_complex::Complex64;
use serde::Serialize;

const ABEL_PROBES: [(f64, f64); 4] = [(0.3, 0.4), (-0.5, 0.2), (0.0, 0.8), (0.5, 0.0)];

#[derive(Serialize)]
pub struct Tool {
    name: &'static str,
    version: &'static str,
}

#[derive(Serialize)]
pub struct ConfigEcho {
    potential: String,
    energy: f64,
    speed: f64,
    family: Option<usize>,
    settings: Settings,
}

#[derive(Serialize)]
pub struct WaveSummary {
    class: &'static str,
    family: Option<usize>,
    period: f64,
    period_e: f64,
    delta: f64,
    u0: f64,
    v0: f64,
    q: f64,
    kappa: f64,
    turning_points: Option<TurningPoints>,
}

#[derive(Serialize)]
pub struct IndexSummary {
    gamma: Option<i32>,
    rho: i32,
    vanish_order_p: Option<u32>,
    degenerate: bool,
    d2_evans: f64,
    d2_closed_form: f64,
    rho_routes: spectrum::RhoRoutes,
    local_tangents: Option<(Complex64, Complex64)>,
}

#[derive(Serialize)]
pub struct WhithamSummary {
    kind: Option<&'static str>,
    velocities: Option<(Complex64, Complex64)>,
    error: Option<String>,
}

#[derive(Serialize)]
pub struct HillSummary {
    bands: Vec<(f64, f64)>,
    gaps: Vec<(f64, f64)>,
    top_periodic_eigenvalue: Option<f64>,
    discriminant_slope: f64,
    scan_window: (f64, f64),
}

#[derive(Serialize)]
pub struct RealEigenvalues {
    periodic: Vec<f64>,
    antiperiodic: Vec<f64>,
}

#[derive(Serialize)]
pub struct Check {
    name: &'static str,
    residual: f64,
    tolerance: f64,
    pass: bool,
}

impl Check {
    fn new(name: &'static str, residual: f64, tolerance: f64) -> Self {
        Check {
            name,
            residual,
            tolerance,
            pass: residual <= tolerance,
        }
    }

    fn flag(name: &'static str, ok: bool) -> Self {
        Check {
            name,
            residual: if ok { 0.0 } else { 1.0 },
            tolerance: 0.0,
            pass: ok,
        }
    }
}

#[derive(Serialize)]
pub struct StabilityReport {
    schema: u32,
    tool: Tool,
    config: ConfigEcho,
    wave: WaveSummary,
    indices: IndexSummary,
    modulational: ModulationalClass,
    whitham: WhithamSummary,
    hill: HillSummary,
    real_eigenvalues: RealEigenvalues,
    certificates: Vec<InstabilityCertificate>,
    verdict: &'static str,
    basis: &'static str,
    checks: Vec<Check>,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn checks(
    pot: &Potential,
    prof: &WaveProfile,
    ind: &StabilityIndices,
    slope: f64,
) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut abel: f64 = 0.0;
    for (re, im) in ABEL_PROBES {
        abel = abel.max(floquet::monodromy(prof, Complex64::new(re, im))?.abel_residual);
    }
    out.push(Check::new("abel_identity", abel, 1e-8));

    let m0 = floquet::monodromy(prof, Complex64::new(0.0, 0.0))?.matrix;
    let expected = [1.0, ind.delta * prof.v0 * prof.v0, 0.0, 1.0];
    let jordan = m0
        .entries()
        .iter()
        .zip(expected)
        .map(|(z, e)| (z - e).norm())
        .fold(0.0, f64::max);
    out.push(Check::new("jordan_form", jordan, 1e-6));

    let delta_id = (ind.delta + prof.gamma() * ind.period_e).abs() / (1.0 + ind.delta.abs());
    out.push(Check::new("delta_identity", delta_id, 1e-4));

    let r = &ind.rho_routes;
    let routes = rel(r.m12, r.from_period_e)
        .max(rel(r.m12, r.from_delta))
        .max(rel(r.from_period_e, r.from_delta));
    out.push(Check::new("rho_routes", routes, 1e-4));

    out.push(Check::new(
        "evans_curvature",
        rel(ind.d2_evans, ind.d2_closed_form),
        1e-4,
    ));

    let energy = prof
        .samples(256)
        .iter()
        .map(|s| s.energy_residual)
        .fold(0.0, f64::max);
    out.push(Check::new("energy_residual", energy, 1e-9));

    let h = 1e-5 * (1.0 + prof.energy().abs());
    let at = |e: f64| {
        wavetrain::averaged_w_with(
            pot,
            &kgwave::WaveParameters {
                energy: e,
                ..prof.params
            },
            &prof.settings,
        )
    };
    let w_e = (at(prof.energy() + h)? - at(prof.energy() - h)?) / (2.0 * h);
    out.push(Check::new("w_e_equals_period", rel(w_e, prof.period), 1e-4));

    if ind.rho != 0 {
        out.push(Check::flag(
            "discriminant_slope_sign",
            slope.signum() as i32 == ind.rho,
        ));
    }
    Ok(out)
}

pub fn build(
    pot: &Potential,
    settings: &Settings,
    prof: &WaveProfile,
    args: &WaveArgs,
) -> Result<StabilityReport> {
    let ind = spectrum::indices(prof)?;
    let slope = floquet::hill_discriminant_slope(prof)?;
    let modulational = spectrum::classify_modulational(&ind);

    let whitham = match modulation::whitham_classify_with(pot, &prof.params, settings) {
        Ok(w) => WhithamSummary {
            kind: Some(w.kind.label()),
            velocities: Some(w.velocities),
            error: None,
        },
        Err(e) => WhithamSummary {
            kind: None,
            velocities: None,
            error: Some(e.to_string()),
        },
    };

    let hill = spectrum::hill_spectrum_default(prof)?;
    let periodic = spectrum::real_periodic_eigenvalues(prof, false)?;
    let antiperiodic = spectrum::real_periodic_eigenvalues(prof, true)?;

    let mut certificates = Vec::new();
    for (roots, anti) in [(&periodic, false), (&antiperiodic, true)] {
        for root in roots.iter() {
            certificates.push(spectrum::real_eigenvalue_certificate(prof, root, anti)?);
        }
    }
    if ind.rho == -1 {
        let curve =
            spectrum::trace_curve_with(prof, &ind, Branch::Plus, std::f64::consts::PI / 8.0, 32)?;
        certificates.extend(spectrum::curve_certificate(prof, &curve)?);
    }
    if prof.class.is_superluminal() && (prof.class.is_rotational() || ind.rho == -1) {
        certificates.push(spectrum::find_unstable_point(prof)?);
    }

    let (verdict, basis) = match prof.class {
        WaveClass::SubluminalRotational => (
            "spectrally stable",
            "subluminal rotational waves are spectrally stable",
        ),
        WaveClass::SuperluminalRotational => (
            "spectrally unstable",
            "superluminal rotational waves are spectrally unstable (G-function certificate)",
        ),
        _ if ind.rho == -1 => (
            "spectrally unstable",
            "rho = -1: strong modulational instability",
        ),
        _ if ind.gamma == Some(-1) => (
            "spectrally unstable",
            "gamma = -1: positive real periodic eigenvalue",
        ),
        _ if !certificates.is_empty() => ("spectrally unstable", "instability certificate found"),
        _ => ("undetermined", "no index or certificate decides this wave"),
    };

    let checks = checks(pot, prof, &ind, slope)?;
    Ok(StabilityReport {
        schema: 1,
        tool: Tool {
            name: "kgwave",
            version: env!("CARGO_PKG_VERSION"),
        },
        config: ConfigEcho {
            potential: args.common.potential.clone(),
            energy: args.energy,
            speed: args.speed,
            family: args.family,
            settings: *settings,
        },
        wave: WaveSummary {
            class: prof.class.label(),
            family: prof.family,
            period: prof.period,
            period_e: ind.period_e,
            delta: ind.delta,
            u0: prof.u0,
            v0: prof.v0,
            q: ind.q,
            kappa: ind.kappa,
            turning_points: prof.turning,
        },
        indices: IndexSummary {
            gamma: ind.gamma,
            rho: ind.rho,
            vanish_order_p: ind.vanish_order_p,
            degenerate: ind.degenerate,
            d2_evans: ind.d2_evans,
            d2_closed_form: ind.d2_closed_form,
            rho_routes: ind.rho_routes,
            local_tangents: spectrum::local_tangents(&ind).ok(),
        },
        modulational,
        whitham,
        hill: HillSummary {
            top_periodic_eigenvalue: hill.periodic_eigenvalues.first().copied(),
            bands: hill.bands,
            gaps: hill.gaps,
            discriminant_slope: slope,
            scan_window: hill.scan_window,
        },
        real_eigenvalues: RealEigenvalues {
            periodic: periodic.iter().map(|r| r.lambda).collect(),
            antiperiodic: antiperiodic.iter().map(|r| r.lambda).collect(),
        },
        certificates,
        verdict,
        basis,
        checks,
    })
}
