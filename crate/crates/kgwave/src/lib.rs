//! Periodic traveling waves of nonlinear Klein-Gordon equations
//! u_tt − u_xx + V′(u) = 0.
//!
//! The crate builds wave profiles, integrates the linearized Floquet
//! system, evaluates the periodic Evans function and Hill discriminant,
//! computes the parity and modulational stability indices, and classifies
//! the Whitham and NLS modulation systems.

// Tolerance checks are written `!(x <= tol)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod floquet;
pub mod modulation;
pub mod ode;
pub mod potential;
pub mod quad;
pub mod settings;
pub mod spectrum;
pub mod wavetrain;

pub use error::{Error, Result};
pub use potential::Potential;
pub use settings::Settings;
pub use wavetrain::{WaveClass, WaveParameters, WaveProfile};
