//! Semiclassical models, SNR metrics, and scheme selection for
//! cavity-based qubit readout.
//!
//! Three readout schemes share one interface: plain dispersive driving, the
//! release scheme (pre-arm the cavity, then drive), and the
//! longitudinal-style scheme (pre-arm, then hold the qubit-dependent field
//! apart with a shaped drive). Everything here is semiclassical: cavity
//! amplitudes follow the two pointer-state equations of motion
//!
//!   dα_{g,e}/dt = −[i(Δ ∓ χ/2) + κ/2] α_{g,e} + i ε₁(t)/2,
//!
//! with the ground branch taking −χ/2. Quantities are dimensionless
//! (frequencies in units of κ, times in units of 1/κ) unless a caller
//! supplies a unit system of its own; nothing in this crate converts units.
//!
//! The crate is organized bottom-up:
//! - [`params`]: scheme parameters, drive profiles, sampled trajectories;
//! - [`numerics`]: the generic ODE, quadrature, search, and erfc kernels;
//! - [`semiclassical`]: closed forms and integrators for the pointer states,
//!   photon-budget solving, and the integral-equation certificate for the
//!   holding drive;
//! - [`metrics`]: matched-filter SNR (stable closed forms and numeric
//!   quadrature), asymptotic scalings, assignment error;
//! - [`optimizer`]: arming-amplitude optimization, relative gains over
//!   budget-matched dispersive readout, gain maps, recommendations.

pub mod error;
pub mod metrics;
pub mod numerics;
pub mod optimizer;
pub mod params;
pub mod semiclassical;

pub use error::{CoreError, Result};
pub use metrics::{
    assignment_error, snr_al_closed, snr_ar_closed, snr_asymptote, snr_longitudinal_reference,
    snr_numeric, Regime, SnrMethod, SnrResult,
};
pub use optimizer::{
    default_axes, gain_al, gain_ar, gain_map, gain_ratio, log_axis, optimize_alpha_arm, recommend,
    BoundaryFlag, GainCell, GainMap, OptimumArm, Recommendation, SearchOptions,
};
pub use params::{DriveProfile, SchemeKind, SchemeParams, Trajectory};
pub use semiclassical::{
    alpha_arm_for_al, amplitude_al, amplitude_ar, drive_al, epsilon_for_peak, integrate_eom,
    integrate_eom_on, mean_photon, mean_photon_ar_closed, mean_photon_ar_quoted, peak_photon,
    volterra_kernel, volterra_residual, PeakPhotonResult,
};
