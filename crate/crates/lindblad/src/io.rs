//! Serialization for full-model runs: JSON run configs in, CSV trajectories
//! and a JSON metadata blob out.
//!
//! CSV values are printed with 17 significant digits so that re-parsing
//! reproduces the binary doubles exactly.

use std::io::Write;

use readout_core::params::SchemeKind;
use serde::{Deserialize, Serialize};

use crate::error::{LindbladError, Result};
use crate::evolve::{StepControl, TRACE_TOL, TRUNCATION_TOL};
use crate::fullsim::{run_readout_fullsim, FullSimResult};
use crate::transmon::TransmonParams;

fn default_steps_per_period() -> usize {
    StepControl::default().steps_per_period
}

fn default_samples() -> usize {
    StepControl::default().samples
}

/// One full-model run, as read from a JSON config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub transmon: TransmonParams,
    pub scheme: SchemeKind,
    pub n_tar: usize,
    pub n_max: f64,
    /// Dimensionless horizon κt.
    pub horizon: f64,
    #[serde(default = "default_steps_per_period")]
    pub steps_per_period: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

impl RunConfig {
    pub fn step_control(&self) -> StepControl {
        StepControl {
            steps_per_period: self.steps_per_period,
            samples: self.samples,
        }
    }

    pub fn run(&self) -> Result<FullSimResult> {
        run_readout_fullsim(
            self.scheme,
            &self.transmon,
            self.n_tar,
            self.n_max,
            self.horizon,
            &self.step_control(),
        )
    }
}

pub fn read_config(json: &str) -> Result<RunConfig> {
    serde_json::from_str(json)
        .map_err(|e| LindbladError::domain("config", format!("bad run config: {e}")))
}

/// CSV with one row per sample. `t` is in microseconds; amplitudes are the
/// demodulated ⟨a⟩ per branch; `n` is ⟨a†a⟩; `leak` is the population
/// outside the initial dressed branch.
pub fn write_csv<W: Write>(mut w: W, r: &FullSimResult) -> std::io::Result<()> {
    writeln!(
        w,
        "t,re_a_g,im_a_g,re_a_e,im_a_e,n_g,n_e,leak_g,leak_e"
    )?;
    for i in 0..r.times.len() {
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.times[i],
            r.a_g[i].re,
            r.a_g[i].im,
            r.a_e[i].re,
            r.a_e[i].im,
            r.photon_g[i],
            r.photon_e[i],
            r.leak_g[i],
            r.leak_e[i],
        )?;
    }
    Ok(())
}

/// Metadata blob recording what produced a CSV: device parameters, cutoffs,
/// monitor tolerances and what they measured, the χ table, and the
/// demodulation frame.
pub fn metadata_json(params: &TransmonParams, r: &FullSimResult) -> serde_json::Value {
    serde_json::json!({
        "scheme": r.scheme,
        "n_tar": r.n_tar,
        "n_max": r.n_max,
        "horizon_kappa_t": r.horizon,
        "device_mhz": {
            "ej": params.ej,
            "ec": params.ec,
            "g": params.g,
            "omega_r": params.omega_r,
            "kappa": params.kappa,
        },
        "cutoffs": {
            "n_transmon_levels": params.n_transmon_levels,
            "fock_cutoff": params.fock_cutoff,
            "charge_cutoff": params.charge_cutoff,
        },
        "frame": {
            "omega_1_mhz": r.omega_1,
            "omega_r_tilde_mhz": r.omega_r_tilde,
            "note": "amplitudes demodulated as e^{i omega_1 t} <a>_lab",
        },
        "budget": {
            "alpha_arm": r.alpha_arm,
            "chi_ntar_mhz": r.chi_ntar,
        },
        "chi_table_mhz": r.chi_table,
        "tolerances": {
            "trace_monitor": TRACE_TOL,
            "truncation_monitor": TRUNCATION_TOL,
            "max_trace_dev_measured": r.max_trace_dev(),
            "final_trace_dev_measured": r.final_trace_dev(),
            "max_top_fock_measured": r.max_top_fock(),
            "max_step_halving_error": r.max_step_halving_error,
        },
        "stepper": {
            "steps_taken": r.steps_taken,
            "samples": r.times.len(),
        },
        "units": {
            "t": "microseconds",
            "frequencies": "MHz (linear, value/2pi)",
        },
    })
}

pub fn write_metadata<W: Write>(
    w: W,
    params: &TransmonParams,
    r: &FullSimResult,
) -> std::io::Result<()> {
    serde_json::to_writer_pretty(w, &metadata_json(params, r)).map_err(std::io::Error::from)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn tiny_result() -> (TransmonParams, FullSimResult) {
        let params = TransmonParams::new(16930.0, 200.4, 120.0, 3600.0, 15.0, 3, 12, 25);
        let r = FullSimResult {
            scheme: SchemeKind::Dispersive,
            n_tar: 1,
            n_max: 1.0,
            horizon: 0.5,
            chi_ntar: -1.8,
            omega_1: 3598.5,
            alpha_arm: 0.0,
            drive: readout_core::params::DriveProfile::Constant { epsilon1: 10.0 },
            times: vec![0.0, 1e-3],
            kappa_t: vec![0.0, 0.094],
            a_g: vec![Complex64::new(0.0, 0.0), Complex64::new(0.1, -0.25)],
            a_e: vec![Complex64::new(0.0, 0.0), Complex64::new(-0.1, -0.25)],
            photon_g: vec![0.0, 0.07],
            photon_e: vec![0.0, 0.07],
            leak_g: vec![0.0, 1e-6],
            leak_e: vec![0.0, 2e-6],
            level_pops_g: vec![vec![1.0, 0.0, 0.0]; 2],
            level_pops_e: vec![vec![0.0, 1.0, 0.0]; 2],
            trace_dev_g: vec![0.0, 1e-12],
            trace_dev_e: vec![0.0, 3e-12],
            top_fock_g: vec![0.0, 1e-9],
            top_fock_e: vec![0.0, 1e-9],
            max_step_halving_error: 1e-9,
            chi_table: vec![vec![-0.9, -0.9], vec![0.9, 0.9]],
            omega_r_tilde: 3600.4,
            steps_taken: 128,
        };
        (params, r)
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = RunConfig {
            transmon: TransmonParams::new(16930.0, 200.4, 159.1, 7655.0, 10.1, 6, 25, 40),
            scheme: SchemeKind::ArmLongitudinal,
            n_tar: 1,
            n_max: 2.0,
            horizon: 3.0,
            steps_per_period: 96,
            samples: 301,
        };
        let s = serde_json::to_string(&cfg).unwrap();
        let back = read_config(&s).unwrap();
        assert_eq!(back.transmon, cfg.transmon);
        assert_eq!(back.scheme, cfg.scheme);
        assert_eq!(back.samples, 301);
    }

    #[test]
    fn config_defaults_fill_missing_step_fields() {
        let s = r#"{
            "transmon": {"ej": 16930.0, "ec": 200.4, "g": 159.1, "omega_r": 7655.0,
                         "kappa": 10.1, "n_transmon_levels": 6, "fock_cutoff": 25,
                         "charge_cutoff": 40},
            "scheme": "dispersive", "n_tar": 1, "n_max": 2.0, "horizon": 3.0
        }"#;
        let cfg = read_config(s).unwrap();
        assert_eq!(cfg.steps_per_period, 96);
        assert_eq!(cfg.samples, 301);
    }

    #[test]
    fn csv_round_trips_doubles_exactly() {
        let (_, r) = tiny_result();
        let mut buf = Vec::new();
        write_csv(&mut buf, &r).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("t,re_a_g"));
        let fields: Vec<f64> = lines[2]
            .split(',')
            .map(|s| s.parse().unwrap())
            .collect();
        assert_eq!(fields[0], 1e-3);
        assert_eq!(fields[2], -0.25);
        assert_eq!(fields[7], 1e-6);
    }

    #[test]
    fn metadata_records_frame_and_tolerances() {
        let (p, r) = tiny_result();
        let m = metadata_json(&p, &r);
        assert_eq!(m["frame"]["omega_1_mhz"], 3598.5);
        assert_eq!(m["tolerances"]["trace_monitor"], 1e-5);
        assert_eq!(m["cutoffs"]["fock_cutoff"], 12);
        assert_eq!(m["chi_table_mhz"][1][0], 0.9);
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.contains("microseconds"));
    }
}
