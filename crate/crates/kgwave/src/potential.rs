//! Potentials V(u) with analytic derivatives through fourth order.
//!
//! Three families are supported: finite trigonometric series (2π-periodic),
//! polynomials, and the built-in sine-Gordon potential V(u) = −cos u.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Offset of the canonical period window used to list critical points.
/// Chosen so that common symmetric potentials have no critical point on
/// the window edge.
const WINDOW_START: f64 = -0.123_456_789;
const SCAN_POINTS: usize = 1024;
const NEWTON_MAX_ITER: usize = 50;
const NEWTON_TOL: f64 = 1e-12;
const DEGENERATE_TOL: f64 = 1e-8;
const NORMALIZATION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PotentialKind {
    /// V(u) = Σₙ aₙ cos(nu) + bₙ sin(nu), n = 1..N.
    TrigSeries { cos: Vec<f64>, sin: Vec<f64> },
    /// V(u) = Σₖ cₖ uᵏ.
    Polynomial { coeffs: Vec<f64> },
    /// V(u) = −cos u.
    SineGordon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CriticalKind {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub u: f64,
    pub value: f64,
    pub kind: CriticalKind,
    pub second_derivative: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// On-disk potential description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub name: String,
    pub kind: String,
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
    #[serde(default)]
    pub poly: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    name: String,
    kind: PotentialKind,
    // derivative coefficient tables for polynomials, orders 0..=4
    poly_derivs: Vec<Vec<f64>>,
    critical: Vec<CriticalPoint>,
    normalized: bool,
}

impl Potential {
    pub fn new(name: impl Into<String>, kind: PotentialKind) -> Result<Self> {
        let poly_derivs = match &kind {
            PotentialKind::Polynomial { coeffs } => {
                let mut tables = vec![coeffs.clone()];
                for k in 1..=4 {
                    let prev: &Vec<f64> = &tables[k - 1];
                    let next: Vec<f64> = prev
                        .iter()
                        .enumerate()
                        .skip(1)
                        .map(|(i, c)| c * i as f64)
                        .collect();
                    tables.push(next);
                }
                tables
            }
            _ => Vec::new(),
        };
        for c in match &kind {
            PotentialKind::TrigSeries { cos, sin } => {
                cos.iter().chain(sin.iter()).copied().collect::<Vec<_>>()
            }
            PotentialKind::Polynomial { coeffs } => coeffs.clone(),
            PotentialKind::SineGordon => Vec::new(),
        } {
            if !c.is_finite() {
                return Err(Error::InvalidConfig("non-finite coefficient".into()));
            }
        }
        let mut p = Potential {
            name: name.into(),
            kind,
            poly_derivs,
            critical: Vec::new(),
            normalized: false,
        };
        let window = p.canonical_window();
        p.critical = p.critical_points(window.0, window.1)?;
        p.normalized = p.check_normalized();
        Ok(p)
    }

    pub fn sine_gordon() -> Self {
        Potential::new("sine-Gordon", PotentialKind::SineGordon).expect("sine-Gordon is admissible")
    }

    pub fn trig(name: impl Into<String>, cos: Vec<f64>, sin: Vec<f64>) -> Result<Self> {
        Potential::new(name, PotentialKind::TrigSeries { cos, sin })
    }

    pub fn polynomial(name: impl Into<String>, coeffs: Vec<f64>) -> Result<Self> {
        Potential::new(name, PotentialKind::Polynomial { coeffs })
    }

    /// Quartic V = ½a u² + ¼b u⁴.
    pub fn quartic(a: f64, b: f64) -> Result<Self> {
        Potential::polynomial(
            format!("quartic(a={a},b={b})"),
            vec![0.0, 0.0, 0.5 * a, 0.0, 0.25 * b],
        )
    }

    pub fn from_config(cfg: &PotentialConfig) -> Result<Self> {
        match cfg.kind.as_str() {
            "sine_gordon" => {
                if !(cfg.cos.is_empty() && cfg.sin.is_empty() && cfg.poly.is_empty()) {
                    return Err(Error::InvalidConfig(
                        "sine_gordon takes no coefficients".into(),
                    ));
                }
                Potential::new(cfg.name.clone(), PotentialKind::SineGordon)
            }
            "trig" => {
                if !cfg.poly.is_empty() {
                    return Err(Error::InvalidConfig(
                        "trig potential with poly coefficients".into(),
                    ));
                }
                Potential::trig(cfg.name.clone(), cfg.cos.clone(), cfg.sin.clone())
            }
            "poly" => {
                if !(cfg.cos.is_empty() && cfg.sin.is_empty()) {
                    return Err(Error::InvalidConfig(
                        "poly potential with trig coefficients".into(),
                    ));
                }
                Potential::polynomial(cfg.name.clone(), cfg.poly.clone())
            }
            other => Err(Error::InvalidConfig(format!(
                "unknown potential kind '{other}'"
            ))),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: PotentialConfig =
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        Potential::from_config(&cfg)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    /// Fundamental period, if any.
    pub fn period(&self) -> Option<f64> {
        match self.kind {
            PotentialKind::Polynomial { .. } => None,
            _ => Some(TAU),
        }
    }

    /// Whether min V = −1 and max V = +1, each attained once per period.
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Critical points in the canonical window (one period for periodic
    /// kinds, a root bound interval for polynomials), sorted by u.
    pub fn canonical_critical_points(&self) -> &[CriticalPoint] {
        &self.critical
    }

    pub fn eval(&self, u: f64, order: usize) -> Result<f64> {
        if order > 4 {
            return Err(Error::UnsupportedOrder(order));
        }
        Ok(self.derivs(u)[order])
    }

    #[inline]
    pub fn v(&self, u: f64) -> f64 {
        self.deriv(u, 0)
    }

    #[inline]
    pub fn dv(&self, u: f64) -> f64 {
        self.deriv(u, 1)
    }

    #[inline]
    pub fn d2v(&self, u: f64) -> f64 {
        self.deriv(u, 2)
    }

    /// Single derivative of order `k ≤ 4`.
    #[inline]
    pub fn deriv(&self, u: f64, k: usize) -> f64 {
        match &self.kind {
            PotentialKind::SineGordon => {
                let (s, c) = u.sin_cos();
                [-c, s, c, -s, -c][k]
            }
            PotentialKind::TrigSeries { cos, sin } => {
                let mut acc = 0.0;
                for (i, a) in cos.iter().enumerate() {
                    let n = (i + 1) as f64;
                    let (s, c) = (n * u).sin_cos();
                    acc += a * n.powi(k as i32) * [c, -s, -c, s][k % 4];
                }
                for (i, b) in sin.iter().enumerate() {
                    let n = (i + 1) as f64;
                    let (s, c) = (n * u).sin_cos();
                    acc += b * n.powi(k as i32) * [s, c, -s, -c][k % 4];
                }
                acc
            }
            PotentialKind::Polynomial { .. } => horner(&self.poly_derivs[k], u),
        }
    }

    /// [V, V′, V″, V‴, V⁗] at u.
    pub fn derivs(&self, u: f64) -> [f64; 5] {
        let mut out = [0.0; 5];
        for (k, o) in out.iter_mut().enumerate() {
            *o = self.deriv(u, k);
        }
        out
    }

    /// All non-degenerate critical points in `[a, b]`, sorted by u.
    pub fn critical_points(&self, a: f64, b: f64) -> Result<Vec<CriticalPoint>> {
        if !(b > a) {
            return Err(Error::InvalidConfig(format!("empty interval [{a}, {b}]")));
        }
        if let Some(p) = self.period() {
            if b - a > p + 1e-12 {
                return Err(Error::InvalidConfig(
                    "interval longer than one period".into(),
                ));
            }
        }
        let n = SCAN_POINTS;
        let grid: Vec<f64> = (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect();
        let vals: Vec<f64> = grid.iter().map(|&u| self.dv(u)).collect();
        let mut roots: Vec<f64> = Vec::new();
        for i in 0..n {
            if vals[i] == 0.0 {
                roots.push(grid[i]);
            } else if i + 1 < n && vals[i + 1] != 0.0 && vals[i].signum() != vals[i + 1].signum() {
                roots.push(self.polish_root(grid[i], grid[i + 1]));
            }
        }
        roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
        roots.dedup_by(|x, y| (*x - *y).abs() < 1e-9);
        let mut out = Vec::with_capacity(roots.len());
        for u in roots {
            let d2 = self.d2v(u);
            if d2.abs() <= DEGENERATE_TOL {
                return Err(Error::DegenerateCritical {
                    u,
                    second_derivative: d2,
                });
            }
            out.push(CriticalPoint {
                u,
                value: self.v(u),
                kind: if d2 > 0.0 {
                    CriticalKind::Min
                } else {
                    CriticalKind::Max
                },
                second_derivative: d2,
            });
        }
        Ok(out)
    }

    /// Safeguarded Newton on V′ inside a sign-change bracket.
    fn polish_root(&self, mut lo: f64, mut hi: f64) -> f64 {
        let f_lo = self.dv(lo);
        let mut x = 0.5 * (lo + hi);
        for _ in 0..NEWTON_MAX_ITER {
            let fx = self.dv(x);
            if fx == 0.0 {
                return x;
            }
            if fx.signum() == f_lo.signum() {
                lo = x;
            } else {
                hi = x;
            }
            let d = self.d2v(x);
            let mut next = x - fx / d;
            if !(next > lo.min(hi) && next < lo.max(hi)) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            let step = (next - x).abs();
            x = next;
            if step <= NEWTON_TOL * (1.0 + x.abs()) {
                // one more Newton step: the last accepted step bounds the
                // error only linearly
                let polished = x - self.dv(x) / self.d2v(x);
                if polished.is_finite() && (polished - x).abs() <= step {
                    x = polished;
                }
                break;
            }
        }
        x
    }

    /// N±(u) = 6[V±1]V″² − 3V′²V″ − 2[V±1]V′V‴.
    pub fn chicone_n(&self, u: f64, sign: Sign) -> Result<f64> {
        if !self.normalized {
            return Err(Error::NotNormalized);
        }
        let [v, v1, v2, v3, _] = self.derivs(u);
        let w = match sign {
            Sign::Plus => v + 1.0,
            Sign::Minus => v - 1.0,
        };
        Ok(6.0 * w * v2 * v2 - 3.0 * v1 * v1 * v2 - 2.0 * w * v1 * v3)
    }

    /// Bounds of the critical values in the canonical window.
    pub fn critical_value_range(&self) -> Option<(f64, f64)> {
        let lo = self
            .critical
            .iter()
            .map(|c| c.value)
            .fold(f64::INFINITY, f64::min);
        let hi = self
            .critical
            .iter()
            .map(|c| c.value)
            .fold(f64::NEG_INFINITY, f64::max);
        (lo.is_finite() && hi.is_finite()).then_some((lo, hi))
    }

    /// max |V″| over `[a, b]`, by dense sampling and Newton polish on V‴.
    pub fn max_abs_d2(&self, a: f64, b: f64) -> f64 {
        let n = 4096;
        let mut best = (a, self.d2v(a).abs());
        for i in 1..=n {
            let u = a + (b - a) * i as f64 / n as f64;
            let v = self.d2v(u).abs();
            if v > best.1 {
                best = (u, v);
            }
        }
        let mut u = best.0;
        let h = (b - a) / n as f64;
        for _ in 0..8 {
            let d4 = self.deriv(u, 4);
            if d4 == 0.0 {
                break;
            }
            let next = u - self.deriv(u, 3) / d4;
            if !next.is_finite() || (next - best.0).abs() > h || next < a || next > b {
                break;
            }
            u = next;
        }
        best.1.max(self.d2v(u).abs())
    }

    /// max |V″| over the whole line; `None` when unbounded.
    pub fn max_abs_d2_global(&self) -> Option<f64> {
        self.period().map(|p| self.max_abs_d2(0.0, p))
    }

    fn canonical_window(&self) -> (f64, f64) {
        match &self.kind {
            PotentialKind::Polynomial { coeffs } => {
                // Cauchy bound for roots of V′
                let d: Vec<f64> = coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(i, c)| c * i as f64)
                    .collect();
                let lead = d.iter().rposition(|c| *c != 0.0);
                let r = match lead {
                    Some(k) if k > 0 => {
                        1.0 + d[..k].iter().map(|c| (c / d[k]).abs()).fold(0.0, f64::max)
                    }
                    _ => 1.0,
                };
                (-r * 1.000_123, r * 1.000_123)
            }
            _ => (WINDOW_START, WINDOW_START + TAU * (1.0 - 1e-12)),
        }
    }

    fn check_normalized(&self) -> bool {
        if self.period().is_none() || self.critical.len() != 2 {
            return false;
        }
        let mins: Vec<_> = self
            .critical
            .iter()
            .filter(|c| c.kind == CriticalKind::Min)
            .collect();
        let maxs: Vec<_> = self
            .critical
            .iter()
            .filter(|c| c.kind == CriticalKind::Max)
            .collect();
        mins.len() == 1
            && maxs.len() == 1
            && (mins[0].value + 1.0).abs() <= NORMALIZATION_TOL
            && (maxs[0].value - 1.0).abs() <= NORMALIZATION_TOL
    }
}

fn horner(c: &[f64], u: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &x| acc * u + x)
}
