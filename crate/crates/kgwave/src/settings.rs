use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by the integrators and solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Relative tolerance of the Runge-Kutta integrator.
    pub ode_rtol: f64,
    /// Absolute tolerance of the Runge-Kutta integrator.
    pub ode_atol: f64,
    /// Absolute tolerance of tanh-sinh quadrature.
    pub quad_tol: f64,
    /// Relative Abel residual above which a monodromy evaluation is rejected.
    pub abel_alarm: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            ode_rtol: 1e-11,
            ode_atol: 1e-13,
            quad_tol: 1e-11,
            abel_alarm: 1e-6,
        }
    }
}

impl Settings {
    /// Rejects non-positive or non-finite tolerances.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("ode_rtol", self.ode_rtol),
            ("ode_atol", self.ode_atol),
            ("quad_tol", self.quad_tol),
            ("abel_alarm", self.abel_alarm),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}
