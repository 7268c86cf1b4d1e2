//! Full transmon-cavity readout model: charge-basis transmon
//! diagonalization, dressed spectra with number-resolved dispersive shifts,
//! and lab-frame Lindblad propagation of readout runs without a
//! rotating-wave approximation.
//!
//! The crate validates and extends the semiclassical pictures in
//! `readout-core`: the budget solvers there pick arming amplitudes and
//! drives from χ_{n_tar} and κ alone, and the modules here check those
//! choices against the driven, dissipative two-body model.
//!
//! Pipeline: [`transmon::diagonalize_transmon`] →
//! [`spectrum::dressed_spectrum`] / [`spectrum::chi_at_target`] →
//! [`evolve::evolve_master_equation`] or the packaged
//! [`fullsim::run_readout_fullsim`]. All public interfaces use linear MHz
//! (value/2π) and microseconds; angular conversion happens inside the
//! integrator only.

pub mod error;
pub mod evolve;
pub mod fullsim;
pub mod io;
pub mod spectrum;
pub mod transmon;

pub use error::{LindbladError, Result};
pub use evolve::{evolve_master_equation, EvolveOutput, StepControl};
pub use fullsim::{displaced_dressed_state, run_readout_fullsim, FullSimResult};
pub use io::{metadata_json, read_config, write_csv, write_metadata, RunConfig};
pub use spectrum::{chi_at_target, dressed_spectrum, DressedSpectrum};
pub use transmon::{diagonalize_transmon, TransmonEigs, TransmonParams};
