use thiserror::Error;

/// Failures raised by the library.
///
/// Variants split into domain errors (the request is outside the admissible
/// parameter set) and numerical failures (a method did not meet its tolerance);
/// see [`Error::is_domain`].
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("derivative order {0} not supported (max 4)")]
    UnsupportedOrder(usize),
    #[error("degenerate critical point at u = {u} (V'' = {second_derivative:e})")]
    DegenerateCritical { u: f64, second_derivative: f64 },
    #[error("potential is not normalized (min V = -1, max V = +1 required)")]
    NotNormalized,
    #[error("energy {energy} lies on the separatrix value {critical_value}")]
    OnSeparatrix { energy: f64, critical_value: f64 },
    #[error("wave speed {0} is sonic (c^2 = 1)")]
    SonicSpeed(f64),
    #[error("parameters outside the admissible set: {0}")]
    NotInDomain(String),
    #[error("wave is not librational")]
    NotLibrational,
    #[error("not an equilibrium: V'({u}) = {derivative:e}")]
    NotEquilibrium { u: f64, derivative: f64 },
    #[error("evanescent carrier: omega^2 = {0} <= 0")]
    EvanescentCarrier(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("quadrature failed to reach tolerance (estimate {estimate:e})")]
    QuadratureFailure { estimate: f64 },
    #[error("period overflow: T = {0:e} exceeds 1e6")]
    Overflow(f64),
    #[error("ODE integration failed: {0}")]
    IntegrationFailure(String),
    #[error("no finite-difference step fits inside the admissible set")]
    StepUnderflow,
    #[error("failed to locate zeros of f_z: {0}")]
    ZeroLocationFailure(String),
    #[error("Abel identity violated: relative residual {0:e}")]
    AbelViolation(f64),
    #[error("degenerate tangent: kappa = {kappa:e}, q^2 = {q2:e}")]
    DegenerateTangent { kappa: f64, q2: f64 },
    #[error("Newton iteration diverged at theta = {0}")]
    NewtonDivergence(f64),
    #[error("no Hill gap found in the scan window")]
    NoGapFound,
    #[error("Hill scan window contains no band")]
    WindowTooNarrow,
    #[error("singular Whitham system: c^2 W_E^2 + W W_EE = {0:e}")]
    SingularSystem(f64),
}

impl Error {
    /// True when the error reflects an inadmissible request rather than a
    /// numerical breakdown.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::UnsupportedOrder(_)
                | Error::DegenerateCritical { .. }
                | Error::NotNormalized
                | Error::OnSeparatrix { .. }
                | Error::SonicSpeed(_)
                | Error::NotInDomain(_)
                | Error::NotLibrational
                | Error::NotEquilibrium { .. }
                | Error::EvanescentCarrier(_)
                | Error::InvalidConfig(_)
                | Error::Precondition(_)
                | Error::DegenerateTangent { .. }
                | Error::SingularSystem(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
