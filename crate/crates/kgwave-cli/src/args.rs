use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "kgwave",
    version,
    about = "Periodic traveling waves of nonlinear Klein-Gordon equations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Full stability report for one wave (JSON).
    Report(WaveArgs),
    /// Region, indices and Whitham type over an (E, c) grid (CSV).
    Scan(ScanArgs),
    /// Spectral curves through the origin (CSV).
    Trace(TraceArgs),
    /// Hill band/gap spectrum (JSON).
    Hill(HillArgs),
    /// NLS coefficients at an equilibrium (JSON).
    Nls(NlsArgs),
    /// Whitham modulation system (JSON).
    Whitham(WaveArgs),
    /// Sampled wave profile (CSV).
    Profile(ProfileArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Potential config file, or `sine-gordon`.
    #[arg(long, default_value = "sine-gordon")]
    pub potential: String,
    /// Output path (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for parallel scans.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub tol_ode_rtol: Option<f64>,
    #[arg(long)]
    pub tol_ode_atol: Option<f64>,
    #[arg(long)]
    pub tol_quad: Option<f64>,
    #[arg(long)]
    pub tol_abel: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct WaveArgs {
    #[command(flatten)]
    pub common: Common,
    /// Energy E.
    #[arg(long = "E", short = 'E', allow_hyphen_values = true)]
    pub energy: f64,
    /// Wave speed c.
    #[arg(long = "c", short = 'c', allow_hyphen_values = true)]
    pub speed: f64,
    /// Librational family (index of the enclosed critical point).
    #[arg(long)]
    pub family: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct ScanArgs {
    #[command(flatten)]
    pub common: Common,
    /// Comma-separated energies.
    #[arg(
        long = "E",
        short = 'E',
        value_delimiter = ',',
        allow_hyphen_values = true
    )]
    pub energies: Vec<f64>,
    /// Comma-separated speeds.
    #[arg(
        long = "c",
        short = 'c',
        value_delimiter = ',',
        allow_hyphen_values = true
    )]
    pub speeds: Vec<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchArg {
    Plus,
    Minus,
    Both,
}

#[derive(Args, Debug, Clone)]
pub struct TraceArgs {
    #[command(flatten)]
    pub wave: WaveArgs,
    #[arg(long, value_enum, default_value = "both")]
    pub branch: BranchArg,
    /// Half-width of the θ interval (at most π).
    #[arg(long, default_value_t = std::f64::consts::PI)]
    pub theta_max: f64,
    #[arg(long, default_value_t = 512)]
    pub steps: usize,
}

#[derive(Args, Debug, Clone)]
pub struct HillArgs {
    #[command(flatten)]
    pub wave: WaveArgs,
    /// Lower end of the ν window (negative; automatic when absent).
    #[arg(long, allow_hyphen_values = true)]
    pub nu_min: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct NlsArgs {
    #[command(flatten)]
    pub common: Common,
    /// Equilibrium u₀.
    #[arg(long, allow_hyphen_values = true)]
    pub u0: f64,
    /// Carrier wavenumber.
    #[arg(long, allow_hyphen_values = true)]
    pub k: f64,
    /// Energy offset of the near-equilibrium comparison wave.
    #[arg(long, default_value_t = kgwave::modulation::NEAR_EQUILIBRIUM_OFFSET)]
    pub offset: f64,
}

#[derive(Args, Debug, Clone)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub wave: WaveArgs,
    /// Number of samples over [0, T].
    #[arg(long, default_value_t = 256)]
    pub samples: usize,
}
