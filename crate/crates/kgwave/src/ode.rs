//! Dormand-Prince 5(4) integrator with adaptive steps and dense output.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const MAX_STEPS: usize = 1_000_000;

/// Error tolerances for one integration.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

/// Continuous extension of an accepted trajectory.
#[derive(Debug, Clone)]
pub struct DenseOutput {
    dim: usize,
    t: Vec<f64>,
    h: Vec<f64>,
    // five coefficient vectors per step, each of length dim
    coef: Vec<f64>,
}

impl DenseOutput {
    /// State at `t`, clamped to the integration interval.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(t, &mut out);
        out
    }

    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        let n = self.t.len();
        let i = match self.t.partition_point(|&s| s <= t) {
            0 => 0,
            k => (k - 1).min(n - 1),
        };
        let th = ((t - self.t[i]) / self.h[i]).clamp(0.0, 1.0);
        let th1 = 1.0 - th;
        let base = i * 5 * self.dim;
        for (j, o) in out.iter_mut().enumerate() {
            let r = |k: usize| self.coef[base + k * self.dim + j];
            *o = r(0) + th * (r(1) + th1 * (r(2) + th * (r(3) + th1 * r(4))));
        }
    }

    pub fn t_start(&self) -> f64 {
        self.t[0]
    }

    pub fn t_end(&self) -> f64 {
        let n = self.t.len();
        self.t[n - 1] + self.h[n - 1]
    }

    pub fn steps(&self) -> usize {
        self.t.len()
    }
}

/// Result of an integration.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub y_end: Vec<f64>,
    pub dense: Option<DenseOutput>,
    pub steps: usize,
}

/// Integrates `y' = f(t, y)` from `t0` to `t1` (`t1 > t0`).
pub fn integrate<F>(
    mut f: F,
    t0: f64,
    y0: &[f64],
    t1: f64,
    tol: Tolerance,
    dense: bool,
) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y0.len();
    if !(t1 > t0) {
        if t1 == t0 {
            return Ok(Trajectory {
                y_end: y0.to_vec(),
                dense: None,
                steps: 0,
            });
        }
        return Err(Error::IntegrationFailure("t1 must exceed t0".into()));
    }
    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut ys = vec![0.0; n];
    let mut y1 = vec![0.0; n];
    let mut out = dense.then(|| DenseOutput {
        dim: n,
        t: Vec::new(),
        h: Vec::new(),
        coef: Vec::new(),
    });

    f(t0, &y, &mut k1);
    let span = t1 - t0;
    let mut h = initial_step(&mut f, t0, &y, &k1, span, tol);
    let mut t = t0;
    let mut steps = 0;
    let mut fac_old: f64 = 1e-4;
    let mut reject = false;

    while t < t1 {
        if steps >= MAX_STEPS {
            return Err(Error::IntegrationFailure("step budget exhausted".into()));
        }
        let last = t + 1.01 * h >= t1;
        if last {
            h = t1 - t;
        }
        for i in 0..n {
            ys[i] = y[i] + h * A21 * k1[i];
        }
        f(t + C2 * h, &ys, &mut k2);
        for i in 0..n {
            ys[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        f(t + C3 * h, &ys, &mut k3);
        for i in 0..n {
            ys[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        f(t + C4 * h, &ys, &mut k4);
        for i in 0..n {
            ys[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        f(t + C5 * h, &ys, &mut k5);
        for i in 0..n {
            ys[i] =
                y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        f(t + h, &ys, &mut k6);
        for i in 0..n {
            y1[i] =
                y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        let t_new = if last { t1 } else { t + h };
        f(t_new, &y1, &mut k7);
        steps += 1;

        let mut err = 0.0;
        for i in 0..n {
            let e =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sk = tol.atol + tol.rtol * y[i].abs().max(y1[i].abs());
            err += (e / sk) * (e / sk);
        }
        let err = (err / n as f64).sqrt();
        if !err.is_finite() {
            h *= 0.1;
            reject = true;
            if h.abs() < 1e-14 * span {
                return Err(Error::IntegrationFailure("non-finite state".into()));
            }
            continue;
        }

        // PI step-size control
        let fac11 = err.powf(0.17);
        let mut fac = fac11 / fac_old.powf(0.04);
        fac = (fac / 0.9).clamp(0.1, 5.0);
        let h_new = h / fac;

        if err <= 1.0 {
            fac_old = err.max(1e-4);
            if let Some(d) = out.as_mut() {
                d.t.push(t);
                d.h.push(h);
                d.coef.extend_from_slice(&y[..n]);
                for i in 0..n {
                    d.coef.push(y1[i] - y[i]);
                }
                for i in 0..n {
                    d.coef.push(h * k1[i] - (y1[i] - y[i]));
                }
                for i in 0..n {
                    let ydiff = y1[i] - y[i];
                    let bspl = h * k1[i] - ydiff;
                    d.coef.push(ydiff - h * k7[i] - bspl);
                }
                for i in 0..n {
                    d.coef.push(
                        h * (D1 * k1[i]
                            + D3 * k3[i]
                            + D4 * k4[i]
                            + D5 * k5[i]
                            + D6 * k6[i]
                            + D7 * k7[i]),
                    );
                }
            }
            std::mem::swap(&mut y, &mut y1);
            std::mem::swap(&mut k1, &mut k7);
            t = t_new;
            h = if reject { h_new.min(h) } else { h_new };
            reject = false;
        } else {
            h /= (fac11 / 0.9).min(5.0);
            reject = true;
            if h < 1e-14 * span {
                return Err(Error::IntegrationFailure(format!(
                    "step size underflow at t = {t}"
                )));
            }
        }
    }
    Ok(Trajectory {
        y_end: y,
        dense: out,
        steps,
    })
}

fn initial_step<F>(f: &mut F, t0: f64, y0: &[f64], f0: &[f64], span: f64, tol: Tolerance) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y0.len();
    let sk = |i: usize| tol.atol + tol.rtol * y0[i].abs();
    let dnf: f64 = (0..n).map(|i| (f0[i] / sk(i)).powi(2)).sum::<f64>() / n as f64;
    let dny: f64 = (0..n).map(|i| (y0[i] / sk(i)).powi(2)).sum::<f64>() / n as f64;
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
        1e-6
    } else {
        0.01 * (dny / dnf).sqrt()
    };
    h = h.min(span);
    let y1: Vec<f64> = (0..n).map(|i| y0[i] + h * f0[i]).collect();
    let mut f1 = vec![0.0; n];
    f(t0 + h, &y1, &mut f1);
    let der2 = ((0..n)
        .map(|i| ((f1[i] - f0[i]) / sk(i)).powi(2))
        .sum::<f64>()
        / n as f64)
        .sqrt()
        / h;
    let der12 = der2.max(dnf.sqrt());
    let h1 = if der12 <= 1e-15 {
        (h * 1e-3).max(1e-6)
    } else {
        (0.01 / der12).powf(0.2)
    };
    (100.0 * h).min(h1).min(span)
}
