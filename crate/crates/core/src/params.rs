//! Model parameters, drive profiles and sampled trajectories.
//!
//! All internal computation is dimensionless: frequencies in units of the
//! cavity decay rate κ, time in units of 1/κ. [`SchemeParams::to_dimensionless`]
//! converts linear-frequency (MHz) inputs; since every quantity of interest is
//! a ratio of like frequencies, the 2π between linear and angular conventions
//! cancels.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Readout scheme selector.
///
/// `Dispersive` is `ArmRelease` with `alpha_arm = 0`; every operation that
/// accepts a scheme honors that equivalence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SchemeKind {
    #[serde(rename = "dispersive")]
    Dispersive,
    #[serde(rename = "arm_and_release")]
    ArmRelease,
    #[serde(rename = "arm_and_longitudinal")]
    ArmLongitudinal,
}

impl std::fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SchemeKind::Dispersive => "dispersive",
            SchemeKind::ArmRelease => "arm_and_release",
            SchemeKind::ArmLongitudinal => "arm_and_longitudinal",
        };
        f.write_str(s)
    }
}

/// Cavity/readout parameters for one operating point.
///
/// Sign convention: the cavity frequency is pulled by −χ/2 for the qubit
/// ground state and +χ/2 for the excited state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeParams {
    /// Full dispersive shift χ (may be negative).
    pub chi: f64,
    /// Cavity decay rate κ > 0; sets the time unit 1/κ.
    pub kappa: f64,
    /// Constant drive amplitude ε₁ ≥ 0.
    pub epsilon1: f64,
    /// Arming amplitude α_arm ≥ 0; the cavity starts at i·α_arm.
    pub alpha_arm: f64,
    /// Drive detuning ω_r − ω₁ (zero for all closed forms).
    pub detuning: f64,
    /// Photon budget: the largest mean photon number any trajectory may visit.
    pub n_max: f64,
}

impl SchemeParams {
    /// Convenience constructor for the common resonant case.
    pub fn resonant(chi: f64, kappa: f64, epsilon1: f64, alpha_arm: f64, n_max: f64) -> Self {
        SchemeParams {
            chi,
            kappa,
            epsilon1,
            alpha_arm,
            detuning: 0.0,
            n_max,
        }
    }

    /// Checks every invariant and returns the parameters unchanged.
    ///
    /// # Errors
    /// `DomainError` naming the violated field: κ must be positive, n_max
    /// positive, ε₁ and α_arm nonnegative, α_arm² ≤ n_max, all fields finite.
    pub fn validate(self) -> Result<Self> {
        let finite = |field: &'static str, v: f64| -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(CoreError::domain(field, format!("must be finite, got {v}")))
            }
        };
        finite("chi", self.chi)?;
        finite("kappa", self.kappa)?;
        finite("epsilon1", self.epsilon1)?;
        finite("alpha_arm", self.alpha_arm)?;
        finite("detuning", self.detuning)?;
        finite("n_max", self.n_max)?;
        if self.kappa <= 0.0 {
            return Err(CoreError::domain(
                "kappa",
                format!("must be positive, got {}", self.kappa),
            ));
        }
        if self.n_max <= 0.0 {
            return Err(CoreError::domain(
                "n_max",
                format!("must be positive, got {}", self.n_max),
            ));
        }
        if self.epsilon1 < 0.0 {
            return Err(CoreError::domain(
                "epsilon1",
                format!("must be nonnegative, got {}", self.epsilon1),
            ));
        }
        if self.alpha_arm < 0.0 {
            return Err(CoreError::domain(
                "alpha_arm",
                format!("must be nonnegative, got {}", self.alpha_arm),
            ));
        }
        if self.alpha_arm * self.alpha_arm > self.n_max {
            return Err(CoreError::domain(
                "alpha_arm",
                format!(
                    "armed state exceeds the photon budget: alpha_arm^2 = {} > n_max = {}",
                    self.alpha_arm * self.alpha_arm,
                    self.n_max
                ),
            ));
        }
        Ok(self)
    }

    /// Rescales parameters quoted as linear frequencies (MHz, value/2π) into
    /// dimensionless units: every frequency-like field is divided by κ and κ
    /// itself becomes 1, so later times are in units of 1/κ.
    ///
    /// Ratios of like frequencies are identical in linear and angular
    /// conventions, so no 2π appears.
    pub fn to_dimensionless(self) -> Result<Self> {
        if !(self.kappa > 0.0) {
            return Err(CoreError::domain(
                "kappa",
                format!("must be positive for unit conversion, got {}", self.kappa),
            ));
        }
        SchemeParams {
            chi: self.chi / self.kappa,
            kappa: 1.0,
            epsilon1: self.epsilon1 / self.kappa,
            alpha_arm: self.alpha_arm,
            detuning: self.detuning / self.kappa,
            n_max: self.n_max,
        }
        .validate()
    }
}

/// Time-dependent drive amplitude ε₁(t).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DriveProfile {
    /// Constant amplitude.
    Constant { epsilon1: f64 },
    /// Envelope that holds the armed state and moves the pointer states along
    /// the real axis: ε₁(t) = α_arm(χ²/κ)(1 − e^{−κt/2}) + α_arm κ.
    ArmLongitudinal { alpha_arm: f64, chi: f64, kappa: f64 },
    /// Piecewise-linear table; clamped to the end values outside its range.
    Tabulated { times: Vec<f64>, values: Vec<f64> },
}

/// ε₁(t) of the arm-and-longitudinal envelope. Shared by [`DriveProfile`] and
/// the public `drive_al`, which adds domain validation.
pub(crate) fn al_envelope(alpha_arm: f64, chi: f64, kappa: f64, t: f64) -> f64 {
    alpha_arm * (chi * chi / kappa) * (1.0 - (-kappa * t / 2.0).exp()) + alpha_arm * kappa
}

impl DriveProfile {
    /// Checks that the profile evaluates to a finite nonnegative amplitude
    /// for all t ≥ 0.
    pub fn validate(&self) -> Result<()> {
        match self {
            DriveProfile::Constant { epsilon1 } => {
                if !(epsilon1.is_finite() && *epsilon1 >= 0.0) {
                    return Err(CoreError::domain(
                        "epsilon1",
                        format!("must be finite and nonnegative, got {epsilon1}"),
                    ));
                }
            }
            DriveProfile::ArmLongitudinal {
                alpha_arm,
                chi,
                kappa,
            } => {
                if !(alpha_arm.is_finite() && *alpha_arm > 0.0) {
                    return Err(CoreError::domain(
                        "alpha_arm",
                        format!("arm-and-longitudinal drive requires alpha_arm > 0, got {alpha_arm}"),
                    ));
                }
                if !(kappa.is_finite() && *kappa > 0.0) {
                    return Err(CoreError::domain(
                        "kappa",
                        format!("must be positive, got {kappa}"),
                    ));
                }
                if !chi.is_finite() {
                    return Err(CoreError::domain("chi", format!("must be finite, got {chi}")));
                }
            }
            DriveProfile::Tabulated { times, values } => {
                if times.len() != values.len() || times.is_empty() {
                    return Err(CoreError::domain(
                        "times",
                        format!(
                            "table needs equal, nonzero lengths; got {} times and {} values",
                            times.len(),
                            values.len()
                        ),
                    ));
                }
                if !times.windows(2).all(|w| w[1] > w[0]) {
                    return Err(CoreError::domain(
                        "times",
                        "table times must be strictly increasing".to_string(),
                    ));
                }
                if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                    return Err(CoreError::domain(
                        "values",
                        format!("table values must be finite and nonnegative, got {v}"),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Drive amplitude at time t ≥ 0.
    pub fn value(&self, t: f64) -> f64 {
        match self {
            DriveProfile::Constant { epsilon1 } => *epsilon1,
            DriveProfile::ArmLongitudinal {
                alpha_arm,
                chi,
                kappa,
            } => al_envelope(*alpha_arm, *chi, *kappa, t),
            DriveProfile::Tabulated { times, values } => {
                if t <= times[0] {
                    return values[0];
                }
                if t >= *times.last().unwrap() {
                    return *values.last().unwrap();
                }
                // partition_point: first index with times[i] > t
                let hi = times.partition_point(|&x| x <= t);
                let (t0, t1) = (times[hi - 1], times[hi]);
                let (v0, v1) = (values[hi - 1], values[hi]);
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }
}

/// Time-sampled pointer-state amplitudes for both qubit initializations.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Sample times, strictly increasing, starting at 0 (units 1/κ).
    pub times: Vec<f64>,
    pub alpha_g: Vec<Complex64>,
    pub alpha_e: Vec<Complex64>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, alpha_g: Vec<Complex64>, alpha_e: Vec<Complex64>) -> Result<Self> {
        let traj = Trajectory {
            times,
            alpha_g,
            alpha_e,
        };
        traj.validate()?;
        Ok(traj)
    }

    pub fn validate(&self) -> Result<()> {
        if self.times.len() < 2 {
            return Err(CoreError::domain(
                "times",
                format!("need at least 2 samples, got {}", self.times.len()),
            ));
        }
        if self.alpha_g.len() != self.times.len() || self.alpha_e.len() != self.times.len() {
            return Err(CoreError::domain(
                "alpha_g",
                format!(
                    "amplitude arrays must match times: {} times, {} alpha_g, {} alpha_e",
                    self.times.len(),
                    self.alpha_g.len(),
                    self.alpha_e.len()
                ),
            ));
        }
        if self.times[0] != 0.0 {
            return Err(CoreError::domain(
                "times",
                format!("must start at 0, got {}", self.times[0]),
            ));
        }
        if !self.times.windows(2).all(|w| w[1] > w[0]) {
            return Err(CoreError::domain(
                "times",
                "must be strictly increasing".to_string(),
            ));
        }
        Ok(())
    }

    /// Uniform grid 0..=t_end with n points (n ≥ 2).
    pub fn uniform_times(t_end: f64, n: usize) -> Vec<f64> {
        let n = n.max(2);
        let h = t_end / (n - 1) as f64;
        (0..n)
            .map(|i| if i == n - 1 { t_end } else { i as f64 * h })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> SchemeParams {
        SchemeParams::resonant(1.0, 1.0, 1.0, 0.0, 2.44)
    }

    #[test]
    fn validate_accepts_budgeted_params() {
        assert!(base().validate().is_ok());
    }

    #[test]
    fn validate_rejects_zero_kappa() {
        let p = SchemeParams {
            kappa: 0.0,
            ..base()
        };
        match p.validate() {
            Err(CoreError::DomainError { field, .. }) => assert_eq!(field, "kappa"),
            other => panic!("expected kappa domain error, got {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_overbudget_arming() {
        let p = SchemeParams {
            alpha_arm: 2.0,
            n_max: 1.0,
            ..base()
        };
        match p.validate() {
            Err(CoreError::DomainError { field, .. }) => assert_eq!(field, "alpha_arm"),
            other => panic!("expected alpha_arm domain error, got {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_nan() {
        let p = SchemeParams {
            chi: f64::NAN,
            ..base()
        };
        assert!(matches!(
            p.validate(),
            Err(CoreError::DomainError { field: "chi", .. })
        ));
    }

    #[test]
    fn to_dimensionless_divides_by_kappa() {
        // Linear MHz in, ratios out; equal frequencies give ratio 1.
        let p = SchemeParams::resonant(1.0, 1.0, 0.5, 0.0, 2.44)
            .to_dimensionless()
            .unwrap();
        assert_eq!(p.chi, 1.0);
        assert_eq!(p.kappa, 1.0);

        let p = SchemeParams::resonant(0.42, 1.0, 0.0, 0.0, 2.44)
            .to_dimensionless()
            .unwrap();
        assert!((p.chi - 0.42).abs() < 1e-15);

        let p = SchemeParams::resonant(3.0, 1.0, 0.0, 0.0, 2.44)
            .to_dimensionless()
            .unwrap();
        assert!((p.chi - 3.0).abs() < 1e-15);

        // Common rescaling of all frequencies leaves the ratios unchanged.
        let a = SchemeParams::resonant(0.9, 2.7, 1.3, 0.4, 2.0)
            .to_dimensionless()
            .unwrap();
        let b = SchemeParams::resonant(9.0, 27.0, 13.0, 0.4, 2.0)
            .to_dimensionless()
            .unwrap();
        assert!((a.chi - b.chi).abs() < 1e-15);
        assert!((a.epsilon1 - b.epsilon1).abs() < 1e-15);
    }

    #[test]
    fn to_dimensionless_rejects_nonpositive_kappa() {
        let p = SchemeParams {
            kappa: -1.0,
            ..base()
        };
        assert!(matches!(
            p.to_dimensionless(),
            Err(CoreError::DomainError { field: "kappa", .. })
        ));
    }

    #[test]
    fn tabulated_drive_interpolates_and_clamps() {
        let d = DriveProfile::Tabulated {
            times: vec![0.0, 1.0, 3.0],
            values: vec![0.0, 2.0, 2.0],
        };
        d.validate().unwrap();
        assert_eq!(d.value(0.5), 1.0);
        assert_eq!(d.value(2.0), 2.0);
        assert_eq!(d.value(10.0), 2.0);
        assert_eq!(d.value(-1.0), 0.0);
    }

    #[test]
    fn al_profile_matches_envelope() {
        let d = DriveProfile::ArmLongitudinal {
            alpha_arm: 1.0,
            chi: 1.0,
            kappa: 1.0,
        };
        d.validate().unwrap();
        // kappa*t = 2: 1*(1 - e^{-1}) + 1
        let expect = 2.0 - (-1.0f64).exp();
        assert!((d.value(2.0) - expect).abs() < 1e-15);
    }

    #[test]
    fn trajectory_invariants() {
        let times = vec![0.0, 1.0];
        let a = vec![Complex64::new(0.0, 0.0); 2];
        assert!(Trajectory::new(times.clone(), a.clone(), a.clone()).is_ok());
        assert!(Trajectory::new(vec![0.5, 1.0], a.clone(), a.clone()).is_err());
        assert!(Trajectory::new(vec![0.0, 0.0], a.clone(), a.clone()).is_err());
        assert!(Trajectory::new(vec![0.0], a[..1].to_vec(), a[..1].to_vec()).is_err());
    }
}
