//! End-to-end readout runs against the full transmon-cavity model.
//!
//! The semiclassical budget machinery from `readout-core` picks the arming
//! amplitude and drive for the requested scheme using the number-resolved
//! shift χ_{n_tar} from the dressed spectrum; the master equation then
//! propagates both qubit branches in parallel from the displaced dressed
//! initial states D(iα_arm)|ī, 0̄⟩.

use nalgebra::DMatrix;
use num_complex::Complex64;
use readout_core::optimizer::{optimize_alpha_arm, SearchOptions};
use readout_core::params::{DriveProfile, SchemeKind};
use readout_core::semiclassical::{alpha_arm_for_al, epsilon_for_peak};

use crate::error::{LindbladError, Result};
use crate::evolve::{displacement_real, evolve_master_equation, EvolveOutput, StepControl, TWO_PI};
use crate::spectrum::{chi_at_target, dressed_spectrum, DressedSpectrum};
use crate::transmon::TransmonParams;

/// Everything one readout run produces, both branches side by side.
/// Amplitudes are demodulated at ω₁; times are microseconds.
#[derive(Debug, Clone)]
pub struct FullSimResult {
    pub scheme: SchemeKind,
    pub n_tar: usize,
    pub n_max: f64,
    /// Dimensionless horizon: the run covers κt ∈ [0, horizon].
    pub horizon: f64,
    /// χ_{n_tar} = χ_{e,n_tar} − χ_{g,n_tar} in linear MHz.
    pub chi_ntar: f64,
    /// Drive and demodulation frequency, linear MHz.
    pub omega_1: f64,
    /// Arming amplitude the budget solver chose (0 for dispersive).
    pub alpha_arm: f64,
    /// Drive envelope handed to the integrator; amplitudes are angular.
    pub drive: DriveProfile,
    pub times: Vec<f64>,
    pub kappa_t: Vec<f64>,
    pub a_g: Vec<Complex64>,
    pub a_e: Vec<Complex64>,
    pub photon_g: Vec<f64>,
    pub photon_e: Vec<f64>,
    /// Population outside the labeled dressed branch of the initial state.
    pub leak_g: Vec<f64>,
    pub leak_e: Vec<f64>,
    pub level_pops_g: Vec<Vec<f64>>,
    pub level_pops_e: Vec<Vec<f64>>,
    pub trace_dev_g: Vec<f64>,
    pub trace_dev_e: Vec<f64>,
    pub top_fock_g: Vec<f64>,
    pub top_fock_e: Vec<f64>,
    pub max_step_halving_error: f64,
    /// χ table of the spectrum the run used, `[branch][n]`, linear MHz.
    pub chi_table: Vec<Vec<f64>>,
    pub omega_r_tilde: f64,
    pub steps_taken: usize,
}

impl FullSimResult {
    pub fn final_trace_dev(&self) -> f64 {
        self.trace_dev_g
            .last()
            .copied()
            .unwrap_or(0.0)
            .max(self.trace_dev_e.last().copied().unwrap_or(0.0))
    }

    pub fn max_trace_dev(&self) -> f64 {
        self.trace_dev_g
            .iter()
            .chain(self.trace_dev_e.iter())
            .cloned()
            .fold(0.0, f64::max)
    }

    pub fn max_top_fock(&self) -> f64 {
        self.top_fock_g
            .iter()
            .chain(self.top_fock_e.iter())
            .cloned()
            .fold(0.0, f64::max)
    }
}

/// Initial density matrix for branch `i`: the dressed state (i, 0) displaced
/// by iα_arm, expressed in the gauge basis.
pub fn displaced_dressed_state(
    spectrum: &DressedSpectrum,
    branch: usize,
    alpha_arm: f64,
) -> Result<DMatrix<Complex64>> {
    let p = &spectrum.params;
    if branch >= p.n_transmon_levels {
        return Err(LindbladError::RangeError(format!(
            "branch {branch} outside 0..{}",
            p.n_transmon_levels
        )));
    }
    let f = p.fock_cutoff;
    let dim = p.dim();
    let col = spectrum.col_of[branch][0];
    let d = displacement_real(f, alpha_arm);
    // ψ = (I ⊗ D) v, blockwise over transmon levels.
    let mut psi = vec![0.0f64; dim];
    for j in 0..p.n_transmon_levels {
        for n in 0..f {
            let mut s = 0.0;
            for m in 0..f {
                s += d[(n, m)] * spectrum.states[(j * f + m, col)];
            }
            psi[j * f + n] = s;
        }
    }
    let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            rho[(r, c)] = Complex64::new(psi[r] * psi[c], 0.0);
        }
    }
    Ok(rho)
}

/// Projector onto every labeled dressed state of `branch`.
fn branch_projector(spectrum: &DressedSpectrum, branch: usize) -> DMatrix<f64> {
    let dim = spectrum.params.dim();
    let mut p = DMatrix::<f64>::zeros(dim, dim);
    for n in 0..=spectrum.max_labeled_fock() {
        let col = spectrum.col_of[branch][n];
        let v = spectrum.states.column(col);
        for r in 0..dim {
            for c in 0..dim {
                p[(r, c)] += v[r] * v[c];
            }
        }
    }
    p
}

/// Arming amplitude and drive for `scheme` at the given shift and budget.
/// The returned profile is in angular units ready for the integrator; the
/// budget math itself runs on linear-MHz inputs, which is equivalent.
fn scheme_drive(
    scheme: SchemeKind,
    chi_ntar: f64,
    kappa: f64,
    n_max: f64,
    horizon: f64,
) -> Result<(f64, DriveProfile)> {
    let to_err = |e: readout_core::CoreError| LindbladError::domain("scheme", e.to_string());
    match scheme {
        SchemeKind::Dispersive => {
            let eps = epsilon_for_peak(0.0, chi_ntar, kappa, n_max).map_err(to_err)?;
            Ok((
                0.0,
                DriveProfile::Constant {
                    epsilon1: TWO_PI * eps,
                },
            ))
        }
        SchemeKind::ArmLongitudinal => {
            let alpha = alpha_arm_for_al(chi_ntar, kappa, n_max).map_err(to_err)?;
            Ok((
                alpha,
                DriveProfile::ArmLongitudinal {
                    alpha_arm: alpha,
                    chi: TWO_PI * chi_ntar,
                    kappa: TWO_PI * kappa,
                },
            ))
        }
        SchemeKind::ArmRelease => {
            // Arm at the SNR-optimal amplitude for this horizon, then hold
            // the matching budget-saturating constant drive.
            let opt = optimize_alpha_arm(
                chi_ntar,
                kappa,
                horizon / kappa,
                n_max,
                &SearchOptions::default(),
            )
            .map_err(to_err)?;
            Ok((
                opt.alpha_arm_opt,
                DriveProfile::Constant {
                    epsilon1: TWO_PI * opt.epsilon1_opt,
                },
            ))
        }
    }
}

/// Runs the full-model readout for both qubit branches.
///
/// `horizon` is the dimensionless span κt covered by the run; `n_tar` picks
/// the photon number the shift χ_{n_tar} and frame ω₁ are matched to.
pub fn run_readout_fullsim(
    scheme: SchemeKind,
    params: &TransmonParams,
    n_tar: usize,
    n_max: f64,
    horizon: f64,
    ctrl: &StepControl,
) -> Result<FullSimResult> {
    if !(n_max > 0.0 && n_max.is_finite()) {
        return Err(LindbladError::domain(
            "n_max",
            format!("photon budget must be positive, got {n_max}"),
        ));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(LindbladError::domain(
            "horizon",
            format!("must be positive, got {horizon}"),
        ));
    }
    let spectrum = dressed_spectrum(params)?;
    let (chi_ntar, omega_1) = chi_at_target(&spectrum, n_tar)?;
    let (alpha_arm, drive) = scheme_drive(scheme, chi_ntar, params.kappa, n_max, horizon)?;

    let t_end = horizon / (TWO_PI * params.kappa);
    let rho_g = displaced_dressed_state(&spectrum, 0, alpha_arm)?;
    let rho_e = displaced_dressed_state(&spectrum, 1, alpha_arm)?;
    let proj_g = branch_projector(&spectrum, 0);
    let proj_e = branch_projector(&spectrum, 1);

    let run = |rho0: &DMatrix<Complex64>, proj: &DMatrix<f64>| -> Result<EvolveOutput> {
        evolve_master_equation(
            &spectrum,
            &drive,
            omega_1,
            rho0,
            t_end,
            ctrl,
            std::slice::from_ref(proj),
        )
    };
    let (out_g, out_e) = rayon::join(|| run(&rho_g, &proj_g), || run(&rho_e, &proj_e));
    let (out_g, out_e) = (out_g?, out_e?);

    let kappa_ang = TWO_PI * params.kappa;
    let kappa_t = out_g.times.iter().map(|&t| kappa_ang * t).collect();
    let leak = |o: &EvolveOutput| -> Vec<f64> {
        o.observables.iter().map(|row| 1.0 - row[0]).collect()
    };

    Ok(FullSimResult {
        scheme,
        n_tar,
        n_max,
        horizon,
        chi_ntar,
        omega_1,
        alpha_arm,
        drive,
        times: out_g.times.clone(),
        kappa_t,
        leak_g: leak(&out_g),
        leak_e: leak(&out_e),
        a_g: out_g.a_demod,
        a_e: out_e.a_demod,
        photon_g: out_g.photon,
        photon_e: out_e.photon,
        level_pops_g: out_g.level_pops,
        level_pops_e: out_e.level_pops,
        trace_dev_g: out_g.trace_dev,
        trace_dev_e: out_e.trace_dev,
        top_fock_g: out_g.top_fock,
        top_fock_e: out_e.top_fock,
        max_step_halving_error: out_g
            .max_step_halving_error
            .max(out_e.max_step_halving_error),
        chi_table: spectrum.chi.clone(),
        omega_r_tilde: spectrum.omega_r_tilde,
        steps_taken: out_g.steps_taken,
    })
}
