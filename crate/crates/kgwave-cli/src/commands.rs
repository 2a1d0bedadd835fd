use crate::args::{
    BranchArg, Cli, Command, Common, HillArgs, NlsArgs, ProfileArgs, ScanArgs, TraceArgs, WaveArgs,
};
use crate::report;
use anyhow::{Context, Result};
use kgwave::modulation::{self, WhithamKind};
use kgwave::spectrum::{self, Branch, SpectralCurve};
use kgwave::wavetrain::{self, WaveProfile};
use kgwave::{Potential, Settings, WaveParameters};
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;

/// Margin used to keep scan points off separatrix energies and c² = 1.
const SCAN_MARGIN: f64 = 1e-3;

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Report(a) => cmd_report(&a),
        Command::Scan(a) => cmd_scan(&a),
        Command::Trace(a) => cmd_trace(&a),
        Command::Hill(a) => cmd_hill(&a),
        Command::Nls(a) => cmd_nls(&a),
        Command::Whitham(a) => cmd_whitham(&a),
        Command::Profile(a) => cmd_profile(&a),
    }
}

pub fn load_potential(source: &str) -> Result<Potential> {
    match source {
        "sine-gordon" | "sine_gordon" => Ok(Potential::sine_gordon()),
        path => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading potential file {path}"))?;
            Ok(Potential::from_json(&text)?)
        }
    }
}

pub fn settings(common: &Common) -> Result<Settings> {
    let d = Settings::default();
    let s = Settings {
        ode_rtol: common.tol_ode_rtol.unwrap_or(d.ode_rtol),
        ode_atol: common.tol_ode_atol.unwrap_or(d.ode_atol),
        quad_tol: common.tol_quad.unwrap_or(d.quad_tol),
        abel_alarm: common.tol_abel.unwrap_or(d.abel_alarm),
    };
    s.validate()?;
    Ok(s)
}

fn setup(common: &Common) -> Result<(Potential, Settings)> {
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(kgwave::Error::InvalidConfig("--threads must be positive".into()).into());
        }
        // A second initialization only fails if a pool already exists.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok((load_potential(&common.potential)?, settings(common)?))
}

fn params(a: &WaveArgs) -> WaveParameters {
    let p = WaveParameters::new(a.energy, a.speed);
    match a.family {
        Some(f) => p.with_family(f),
        None => p,
    }
}

fn wave(a: &WaveArgs) -> Result<(Potential, Settings, WaveProfile)> {
    let (pot, settings) = setup(&a.common)?;
    let prof = wavetrain::profile_with(&pot, &params(a), &settings)?;
    Ok((pot, settings, prof))
}

fn sink(common: &Common) -> Result<Box<dyn Write>> {
    Ok(match &common.out {
        Some(path) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn write_json<T: Serialize>(common: &Common, value: &T) -> Result<()> {
    let mut w = sink(common)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn fmt(x: f64) -> String {
    format!("{x:.17e}")
}

fn cmd_report(a: &WaveArgs) -> Result<()> {
    let (pot, settings, prof) = wave(a)?;
    let rep = report::build(&pot, &settings, &prof, a)?;
    write_json(&a.common, &rep)
}

#[derive(Serialize)]
struct ScanRow {
    #[serde(rename = "E")]
    energy: f64,
    c: f64,
    region: String,
    rho: Option<i32>,
    gamma: Option<i32>,
    whitham_kind: String,
    v1_re: Option<f64>,
    v1_im: Option<f64>,
    v2_re: Option<f64>,
    v2_im: Option<f64>,
    error: String,
}

fn excluded(pot: &Potential, e: f64, c: f64) -> bool {
    (c * c - 1.0).abs() <= SCAN_MARGIN
        || pot
            .canonical_critical_points()
            .iter()
            .any(|cp| (e - cp.value).abs() <= SCAN_MARGIN)
}

fn scan_row(pot: &Potential, settings: &Settings, e: f64, c: f64) -> ScanRow {
    let mut row = ScanRow {
        energy: e,
        c,
        region: String::new(),
        rho: None,
        gamma: None,
        whitham_kind: String::new(),
        v1_re: None,
        v1_im: None,
        v2_re: None,
        v2_im: None,
        error: String::new(),
    };
    let params = WaveParameters::new(e, c);
    let result = (|| -> kgwave::Result<()> {
        let prof = wavetrain::profile_with(pot, &params, settings)?;
        row.region = prof.class.label().to_string();
        let ind = spectrum::indices(&prof)?;
        row.rho = Some(ind.rho);
        row.gamma = ind.gamma;
        match modulation::whitham_classify_with(pot, &params, settings) {
            Ok(w) => {
                row.whitham_kind = w.kind.label().to_string();
                row.v1_re = Some(w.velocities.0.re);
                row.v1_im = Some(w.velocities.0.im);
                row.v2_re = Some(w.velocities.1.re);
                row.v2_im = Some(w.velocities.1.im);
            }
            Err(kgwave::Error::SingularSystem(_)) => {
                row.whitham_kind = WhithamKind::Singular.label().to_string()
            }
            Err(e) => return Err(e),
        }
        Ok(())
    })();
    if let Err(err) = result {
        row.error = err.to_string();
    }
    row
}

fn cmd_scan(a: &ScanArgs) -> Result<()> {
    let (pot, settings) = setup(&a.common)?;
    let grid: Vec<(f64, f64)> = a
        .energies
        .iter()
        .flat_map(|&e| a.speeds.iter().map(move |&c| (e, c)))
        .filter(|&(e, c)| !excluded(&pot, e, c))
        .collect();
    let rows: Vec<ScanRow> = grid
        .par_iter()
        .map(|&(e, c)| scan_row(&pot, &settings, e, c))
        .collect();
    let mut w = csv::Writer::from_writer(sink(&a.common)?);
    if rows.is_empty() {
        w.write_record([
            "E",
            "c",
            "region",
            "rho",
            "gamma",
            "whitham_kind",
            "v1_re",
            "v1_im",
            "v2_re",
            "v2_im",
            "error",
        ])?;
    }
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_trace(a: &TraceArgs) -> Result<()> {
    let (_, _, prof) = wave(&a.wave)?;
    let ind = spectrum::indices(&prof)?;
    let branches: &[Branch] = match a.branch {
        BranchArg::Plus => &[Branch::Plus],
        BranchArg::Minus => &[Branch::Minus],
        BranchArg::Both => &[Branch::Plus, Branch::Minus],
    };
    let curves: Vec<SpectralCurve> = branches
        .par_iter()
        .map(|&b| spectrum::trace_curve_with(&prof, &ind, b, a.theta_max, a.steps))
        .collect::<kgwave::Result<_>>()?;
    let mut w = csv::Writer::from_writer(sink(&a.wave.common)?);
    w.write_record(["theta", "re_lambda", "im_lambda", "branch", "abs_evans"])?;
    for curve in &curves {
        if let Some(d) = &curve.diagnostic {
            eprintln!("branch {}: {d}", curve.branch.label());
        }
        for p in &curve.points {
            w.write_record([
                fmt(p.theta),
                fmt(p.lambda.re),
                fmt(p.lambda.im),
                curve.branch.label().to_string(),
                fmt(p.evans_residual),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct HillOutput {
    schema: u32,
    bands: Vec<(f64, f64)>,
    periodic: Vec<f64>,
    antiperiodic: Vec<f64>,
    gaps: Vec<(f64, f64)>,
    scan_window: (f64, f64),
}

fn cmd_hill(a: &HillArgs) -> Result<()> {
    let (_, _, prof) = wave(&a.wave)?;
    let h = match a.nu_min {
        Some(nu) => spectrum::hill_spectrum(&prof, nu)?,
        None => spectrum::hill_spectrum_default(&prof)?,
    };
    write_json(
        &a.wave.common,
        &HillOutput {
            schema: 1,
            bands: h.bands,
            periodic: h.periodic_eigenvalues,
            antiperiodic: h.antiperiodic_eigenvalues,
            gaps: h.gaps,
            scan_window: h.scan_window,
        },
    )
}

#[derive(Serialize)]
struct NlsOutput {
    schema: u32,
    #[serde(flatten)]
    coefficients: modulation::NlsCoefficients,
    kind_label: &'static str,
    focusing_product: f64,
    /// (5V‴² − 3V″V⁗)/(12ω⁴), which β·ω″ must reproduce.
    focusing_closed_form: f64,
    near_equilibrium_te_sign: i32,
    near_equilibrium: Option<modulation::NearEquilibriumWave>,
    near_equilibrium_error: Option<String>,
    /// sgn(β·ω″) = −ρ of the near-equilibrium wave.
    rho_consistent: Option<bool>,
}

fn cmd_nls(a: &NlsArgs) -> Result<()> {
    let (pot, _) = setup(&a.common)?;
    let coeffs = modulation::nls_coefficients(&pot, a.u0, a.k)?;
    let d = pot.derivs(a.u0);
    let closed = (5.0 * d[3] * d[3] - 3.0 * d[2] * d[4]) / (12.0 * coeffs.omega.powi(4));
    let sign = modulation::near_equilibrium_te_sign(&pot, a.u0)?;
    let near = modulation::near_equilibrium_wave(&pot, a.u0, a.k, a.offset);
    let product = coeffs.focusing_product();
    let rho_consistent = near.as_ref().ok().map(|w| {
        let s = if product > 0.0 {
            1
        } else if product < 0.0 {
            -1
        } else {
            0
        };
        s == -w.rho
    });
    write_json(
        &a.common,
        &NlsOutput {
            schema: 1,
            coefficients: coeffs,
            kind_label: coeffs.kind.label(),
            focusing_product: product,
            focusing_closed_form: closed,
            near_equilibrium_te_sign: sign,
            near_equilibrium_error: near.as_ref().err().map(|e| e.to_string()),
            near_equilibrium: near.ok(),
            rho_consistent,
        },
    )
}

#[derive(Serialize)]
struct WhithamOutput {
    schema: u32,
    kind_label: &'static str,
    #[serde(flatten)]
    classification: modulation::WhithamClassification,
}

fn cmd_whitham(a: &WaveArgs) -> Result<()> {
    let (pot, settings) = setup(&a.common)?;
    let w = modulation::whitham_classify_with(&pot, &params(a), &settings)?;
    write_json(
        &a.common,
        &WhithamOutput {
            schema: 1,
            kind_label: w.kind.label(),
            classification: w,
        },
    )
}

fn cmd_profile(a: &ProfileArgs) -> Result<()> {
    let (_, _, prof) = wave(&a.wave)?;
    let mut w = csv::Writer::from_writer(sink(&a.wave.common)?);
    w.write_record(["z", "f", "f_z", "energy_residual"])?;
    for s in prof.samples(a.samples) {
        w.write_record([fmt(s.z), fmt(s.f), fmt(s.f_z), fmt(s.energy_residual)])?;
    }
    w.flush()?;
    Ok(())
}
