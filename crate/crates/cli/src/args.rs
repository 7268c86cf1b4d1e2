//! Command-line grammar.
//!
//! Every physics flag is optional at the parser level so that a `--config`
//! JSON file can supply it; [`crate::resolve::Resolver`] enforces which
//! values are actually required, with explicit flags always winning over
//! config entries.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use readout_core::SchemeKind;

#[derive(Parser, Debug)]
#[command(
    name = "readout-forge",
    version,
    about = "Trajectories, SNR curves, gain maps, and full-model simulations \
             for dispersive and prearmed cavity readout"
)]
pub struct Cli {
    /// Unit system: `dimensionless` reads frequencies in units of kappa and
    /// times in units of 1/kappa; `mhz` reads frequencies in MHz (linear,
    /// value/2pi) and times in microseconds
    #[arg(long, global = true, value_enum, default_value_t = Units::Dimensionless)]
    pub units: Units,

    /// JSON object with default parameter values, merged under explicit flags
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Directory for output files (created if missing)
    #[arg(long, global = true, default_value = ".", value_name = "DIR")]
    pub out_dir: PathBuf,

    /// Worker threads for gainmap and fullsim; falls back to
    /// READOUT_FORGE_JOBS, then to the logical core count
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Closed-form pointer-state trajectory plus a phase-space plot
    Trajectory(TrajectoryArgs),
    /// Matched-filter SNR vs integration time for all three schemes
    Snr(CurveArgs),
    /// Assignment error vs integration time for all three schemes
    Error(CurveArgs),
    /// Relative-gain maps of the armed schemes over (|chi|/kappa, kappa*tau)
    Gainmap(GainmapArgs),
    /// Best scheme and settings for one operating point, as JSON
    Recommend(RecommendArgs),
    /// Drive-envelope table for a scheme
    DriveProfile(DriveProfileArgs),
    /// Integral-equation residual certificate for the holding drive
    VolterraCheck(VolterraArgs),
    /// Full transmon-cavity master-equation run (parameters in MHz)
    Fullsim(FullsimArgs),
    /// Dressed-level dispersive-shift table (parameters in MHz)
    ChiTable(ChiTableArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Units {
    Dimensionless,
    Mhz,
}

impl Units {
    pub fn as_str(self) -> &'static str {
        match self {
            Units::Dimensionless => "dimensionless",
            Units::Mhz => "mhz",
        }
    }
}

/// Scheme selector; accepts the short names used throughout and the full
/// snake-case names emitted in JSON outputs.
#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemeArg {
    /// Constant resonant drive from vacuum
    Dispersive,
    /// Arm, then release with a constant drive
    #[value(alias = "arm-and-release", alias = "arm_and_release")]
    Ar,
    /// Arm, then hold the branches apart with the shaped envelope
    #[value(alias = "arm-and-longitudinal", alias = "arm_and_longitudinal")]
    Al,
}

impl SchemeArg {
    pub fn kind(self) -> SchemeKind {
        match self {
            SchemeArg::Dispersive => SchemeKind::Dispersive,
            SchemeArg::Ar => SchemeKind::ArmRelease,
            SchemeArg::Al => SchemeKind::ArmLongitudinal,
        }
    }
}

#[derive(clap::Args, Debug)]
pub struct TrajectoryArgs {
    /// Readout scheme [default: dispersive]
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    /// Dispersive shift over kappa (dimensionless units)
    #[arg(long, allow_negative_numbers = true)]
    pub chi_over_kappa: Option<f64>,
    /// Dispersive shift in MHz (mhz units)
    #[arg(long, allow_negative_numbers = true)]
    pub chi: Option<f64>,
    /// Cavity decay rate in MHz (mhz units)
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Peak mean photon number budget
    #[arg(long)]
    pub n_max: Option<f64>,
    /// End of the sampled window
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Number of samples [default: 501]
    #[arg(long)]
    pub points: Option<usize>,
    /// Override the arming amplitude instead of deriving it from the scheme
    #[arg(long)]
    pub alpha_arm: Option<f64>,
    /// Override the constant drive amplitude instead of saturating the budget
    #[arg(long)]
    pub epsilon1: Option<f64>,
}

#[derive(clap::Args, Debug)]
pub struct CurveArgs {
    /// Dispersive shift over kappa (dimensionless units)
    #[arg(long, allow_negative_numbers = true)]
    pub chi_over_kappa: Option<f64>,
    /// Dispersive shift in MHz (mhz units)
    #[arg(long, allow_negative_numbers = true)]
    pub chi: Option<f64>,
    /// Cavity decay rate in MHz (mhz units)
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Peak mean photon number budget
    #[arg(long)]
    pub n_max: Option<f64>,
    /// Shortest integration time [default: 0.1]
    #[arg(long)]
    pub tau_min: Option<f64>,
    /// Longest integration time [default: 30]
    #[arg(long)]
    pub tau_max: Option<f64>,
    /// Number of log-spaced integration times [default: 120]
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(clap::Args, Debug)]
pub struct GainmapArgs {
    /// Peak mean photon number budget
    #[arg(long)]
    pub n_max: Option<f64>,
    /// Smallest |chi|/kappa [default: 0.1]
    #[arg(long)]
    pub chi_min: Option<f64>,
    /// Largest |chi|/kappa [default: 5]
    #[arg(long)]
    pub chi_max: Option<f64>,
    /// Smallest kappa*tau [default: 0.1]
    #[arg(long)]
    pub tau_min: Option<f64>,
    /// Largest kappa*tau [default: 30]
    #[arg(long)]
    pub tau_max: Option<f64>,
    /// Log-spaced points on the |chi|/kappa axis [default: 60]
    #[arg(long)]
    pub chi_points: Option<usize>,
    /// Log-spaced points on the kappa*tau axis [default: 60]
    #[arg(long)]
    pub tau_points: Option<usize>,
}

#[derive(clap::Args, Debug)]
pub struct RecommendArgs {
    /// Dispersive shift over kappa (dimensionless units)
    #[arg(long, allow_negative_numbers = true)]
    pub chi_over_kappa: Option<f64>,
    /// Dispersive shift in MHz (mhz units)
    #[arg(long, allow_negative_numbers = true)]
    pub chi: Option<f64>,
    /// Cavity decay rate in MHz (mhz units)
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Integration time as kappa*tau (either unit system)
    #[arg(long)]
    pub kappa_tau: Option<f64>,
    /// Integration time in microseconds (mhz units)
    #[arg(long)]
    pub tau: Option<f64>,
    /// Peak mean photon number budget
    #[arg(long)]
    pub n_max: Option<f64>,
}

#[derive(clap::Args, Debug)]
pub struct DriveProfileArgs {
    /// Readout scheme [default: al]
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    /// Dispersive shift over kappa (dimensionless units)
    #[arg(long, allow_negative_numbers = true)]
    pub chi_over_kappa: Option<f64>,
    /// Dispersive shift in MHz (mhz units)
    #[arg(long, allow_negative_numbers = true)]
    pub chi: Option<f64>,
    /// Cavity decay rate in MHz (mhz units)
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Peak mean photon number budget
    #[arg(long)]
    pub n_max: Option<f64>,
    /// End of the sampled window
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Number of samples [default: 501]
    #[arg(long)]
    pub points: Option<usize>,
    /// Override the arming amplitude instead of deriving it from the scheme
    #[arg(long)]
    pub alpha_arm: Option<f64>,
    /// Override the constant drive amplitude instead of saturating the budget
    #[arg(long)]
    pub epsilon1: Option<f64>,
}

#[derive(clap::Args, Debug)]
pub struct VolterraArgs {
    /// Dispersive shift over kappa (dimensionless units)
    #[arg(long, allow_negative_numbers = true)]
    pub chi_over_kappa: Option<f64>,
    /// Dispersive shift in MHz (mhz units)
    #[arg(long, allow_negative_numbers = true)]
    pub chi: Option<f64>,
    /// Cavity decay rate in MHz (mhz units)
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Peak mean photon number budget (sets alpha_arm unless overridden)
    #[arg(long)]
    pub n_max: Option<f64>,
    /// Arming amplitude; derived from --n-max when absent
    #[arg(long)]
    pub alpha_arm: Option<f64>,
    /// End of the sampled window [default: 20]
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Number of sampled times [default: 10]
    #[arg(long)]
    pub points: Option<usize>,
    /// Fail (exit 1) if any |residual| exceeds this bound
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(clap::Args, Debug)]
pub struct FullsimArgs {
    /// Transmon Josephson energy in MHz [default: 16930]
    #[arg(long)]
    pub ej: Option<f64>,
    /// Transmon charging energy in MHz [default: 200.4]
    #[arg(long)]
    pub ec: Option<f64>,
    /// Transmon-cavity coupling in MHz [default: 159.1]
    #[arg(long)]
    pub g: Option<f64>,
    /// Bare cavity frequency in MHz [default: 7655]
    #[arg(long)]
    pub omega_r: Option<f64>,
    /// Cavity decay rate in MHz [default: 10.1]
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Readout scheme [default: al]
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    /// Target photon number for the shift [default: 1]
    #[arg(long)]
    pub n_tar: Option<usize>,
    /// Peak mean photon number budget [default: 2]
    #[arg(long)]
    pub n_max: Option<f64>,
    /// Simulated window as kappa*t [default: 3]
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Kept transmon eigenlevels [default: 6]
    #[arg(long)]
    pub n_levels: Option<usize>,
    /// Cavity Fock-space cutoff [default: 25]
    #[arg(long)]
    pub fock_cutoff: Option<usize>,
    /// Charge-basis cutoff for the transmon diagonalization [default: 40]
    #[arg(long)]
    pub charge_cutoff: Option<usize>,
    /// Integrator steps per drive period [default: 96]
    #[arg(long)]
    pub steps_per_period: Option<usize>,
    /// Number of output samples [default: 301]
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(clap::Args, Debug)]
pub struct ChiTableArgs {
    /// Transmon Josephson energy in MHz [default: 16930]
    #[arg(long)]
    pub ej: Option<f64>,
    /// Transmon charging energy in MHz [default: 200.4]
    #[arg(long)]
    pub ec: Option<f64>,
    /// Transmon-cavity coupling in MHz [default: 159.1]
    #[arg(long)]
    pub g: Option<f64>,
    /// Bare cavity frequency in MHz [default: 7655]
    #[arg(long)]
    pub omega_r: Option<f64>,
    /// Cavity decay rate in MHz [default: 10.1]
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Target photon number for the summary [default: 1]
    #[arg(long)]
    pub n_tar: Option<usize>,
    /// Kept transmon eigenlevels [default: 6]
    #[arg(long)]
    pub n_levels: Option<usize>,
    /// Cavity Fock-space cutoff [default: 25]
    #[arg(long)]
    pub fock_cutoff: Option<usize>,
    /// Charge-basis cutoff for the transmon diagonalization [default: 40]
    #[arg(long)]
    pub charge_cutoff: Option<usize>,
}
