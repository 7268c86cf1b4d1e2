//! Arming-amplitude optimization, relative gains, gain maps, and the
//! scheme recommendation rule.
//!
//! All comparisons share one photon budget n_max: each candidate arming
//! amplitude α_arm gets the largest constant resonant drive whose transient
//! peak photon number stays at n_max, and the three schemes are scored by
//! their matched-filter SNR at the measurement time. Gains are quoted
//! relative to the budget-saturating dispersive configuration (α_arm = 0).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::metrics::{assignment_error, snr_al_closed, snr_ar_value};
use crate::numerics::golden_max;
use crate::params::{DriveProfile, SchemeKind};
use crate::semiclassical::{alpha_arm_for_al, epsilon_for_peak_with_scan, ArPhotonScan};

/// Where the optimal arming amplitude sits in the closed search interval
/// [0, √n_max].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryFlag {
    Interior,
    /// Optimum at α_arm = 0: plain dispersive drive is best.
    AtZero,
    /// Optimum at α_arm = √n_max: the budget is spent entirely on arming.
    AtBudget,
}

/// Result of maximizing the release-scheme SNR over the arming amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimumArm {
    pub alpha_arm_opt: f64,
    /// alpha_arm_opt / √n_max, in [0, 1]; independent of n_max.
    pub alpha_tilde: f64,
    pub snr_opt: f64,
    /// Budget-saturating drive amplitude at the optimum.
    pub epsilon1_opt: f64,
    pub boundary: BoundaryFlag,
}

/// Knobs for [`optimize_alpha_arm`]. The defaults are what every gain
/// computation uses; they are deliberately deterministic.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Coarse-grid resolution over [0, √n_max] before refinement.
    pub grid_points: usize,
    /// Golden-section half-width tolerance, relative to √n_max.
    pub xtol_rel: f64,
    /// Skip the α_arm = 0 endpoint (report the best strictly armed point).
    pub interior_only: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            grid_points: 64,
            xtol_rel: 1e-9,
            interior_only: false,
        }
    }
}

/// One cell of a gain map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainCell {
    pub gain_ar: f64,
    pub gain_al: f64,
    pub gain_ratio: f64,
    pub alpha_tilde: f64,
    pub recommended: SchemeKind,
}

/// Relative gains of both armed schemes on a (|χ|/κ, κτ) grid.
///
/// `cells[i][j]` corresponds to `chi_over_kappa_axis[i]` and
/// `kappa_tau_axis[j]`; a cell that failed to evaluate carries the error
/// message instead of aborting the whole map.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GainMap {
    pub chi_over_kappa_axis: Vec<f64>,
    pub kappa_tau_axis: Vec<f64>,
    pub cells: Vec<Vec<std::result::Result<GainCell, String>>>,
}

/// The final answer: which scheme to run and with what settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Recommendation {
    pub scheme: SchemeKind,
    pub alpha_arm: f64,
    pub drive: DriveProfile,
    pub expected_snr: f64,
    pub expected_error: f64,
    pub gain_over_dispersive: f64,
    pub rationale: String,
}

fn validate_inputs(chi: f64, kappa: f64, tau: f64, n_max: f64) -> Result<()> {
    if !chi.is_finite() {
        return Err(CoreError::domain("chi", format!("must be finite, got {chi}")));
    }
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(CoreError::domain(
            "kappa",
            format!("must be positive and finite, got {kappa}"),
        ));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(CoreError::domain(
            "tau",
            format!("must be positive and finite, got {tau}"),
        ));
    }
    if !(n_max > 0.0 && n_max.is_finite()) {
        return Err(CoreError::domain(
            "n_max",
            format!("must be positive and finite, got {n_max}"),
        ));
    }
    Ok(())
}

/// Maximizes the release-scheme SNR at time `tau` over the arming amplitude
/// α_arm ∈ [0, √n_max], pairing every candidate with its budget-saturating
/// drive. Deterministic: a fixed coarse grid, golden-section refinement of
/// the best bracket, then an exact comparison against both endpoints. Ties
/// resolve toward smaller α_arm, so a flat landscape reports `AtZero`.
pub fn optimize_alpha_arm(
    chi: f64,
    kappa: f64,
    tau: f64,
    n_max: f64,
    options: &SearchOptions,
) -> Result<OptimumArm> {
    validate_inputs(chi, kappa, tau, n_max)?;
    let a_max = n_max.sqrt();
    let scan = ArPhotonScan::new(chi, kappa);
    let objective = |alpha: f64| -> Result<f64> {
        let eps = epsilon_for_peak_with_scan(&scan, alpha, n_max)?;
        Ok(snr_ar_value(chi, kappa, eps, alpha, tau))
    };

    let n = options.grid_points.max(2);
    let mut grid = Vec::with_capacity(n);
    for i in 0..n {
        let alpha = if i + 1 == n {
            a_max
        } else {
            a_max * i as f64 / (n - 1) as f64
        };
        grid.push((alpha, objective(alpha)?));
    }
    let start = usize::from(options.interior_only);
    let mut best = start;
    for (i, g) in grid.iter().enumerate().skip(start + 1) {
        if g.1 > grid[best].1 {
            best = i;
        }
    }

    // Refine inside the bracket around the best grid point. Errors inside
    // the golden closure are stashed and re-raised afterwards.
    let lo = grid[best.saturating_sub(1)].0;
    let hi = grid[(best + 1).min(n - 1)].0;
    let mut stashed: Option<CoreError> = None;
    let (mut alpha_opt, mut snr_opt) = if hi > lo {
        let stash = std::cell::RefCell::new(None);
        let got = golden_max(
            |x| match objective(x) {
                Ok(v) => v,
                Err(e) => {
                    *stash.borrow_mut() = Some(e);
                    f64::NEG_INFINITY
                }
            },
            lo,
            hi,
            options.xtol_rel * a_max,
        );
        stashed = stash.into_inner();
        got
    } else {
        grid[best]
    };
    if let Some(e) = stashed {
        return Err(e);
    }
    if grid[best].1 > snr_opt {
        (alpha_opt, snr_opt) = grid[best];
    }

    // Exact endpoint comparison; prefer smaller α_arm on ties.
    let floor = if options.interior_only {
        grid[1]
    } else {
        grid[0]
    };
    if floor.1 >= snr_opt {
        (alpha_opt, snr_opt) = floor;
    }
    if grid[n - 1].1 > snr_opt {
        (alpha_opt, snr_opt) = grid[n - 1];
    }

    let boundary = if alpha_opt == 0.0 {
        BoundaryFlag::AtZero
    } else if alpha_opt == a_max {
        BoundaryFlag::AtBudget
    } else {
        BoundaryFlag::Interior
    };
    Ok(OptimumArm {
        alpha_arm_opt: alpha_opt,
        alpha_tilde: alpha_opt / a_max,
        snr_opt,
        epsilon1_opt: epsilon_for_peak_with_scan(&scan, alpha_opt, n_max)?,
        boundary,
    })
}

struct Gains {
    opt: OptimumArm,
    alpha_al: f64,
    snr_al: f64,
    gain_ar: f64,
    gain_al: f64,
    gain_ratio: f64,
}

fn gains(chi: f64, kappa: f64, tau: f64, n_max: f64) -> Result<Gains> {
    validate_inputs(chi, kappa, tau, n_max)?;
    if chi == 0.0 {
        return Err(CoreError::domain(
            "chi",
            "relative gains are undefined at chi = 0 where every scheme's SNR vanishes"
                .to_string(),
        ));
    }
    let opt = optimize_alpha_arm(chi, kappa, tau, n_max, &SearchOptions::default())?;
    let scan = ArPhotonScan::new(chi, kappa);
    let eps_disp = epsilon_for_peak_with_scan(&scan, 0.0, n_max)?;
    let snr_disp = snr_ar_value(chi, kappa, eps_disp, 0.0, tau);
    let alpha_al = alpha_arm_for_al(chi, kappa, n_max)?;
    let snr_al = snr_al_closed(alpha_al, chi, kappa, tau)?.snr;
    let gain_ar = opt.snr_opt / snr_disp;
    let gain_al = snr_al / snr_disp;
    Ok(Gains {
        opt,
        alpha_al,
        snr_al,
        gain_ar,
        gain_al,
        gain_ratio: gain_al / gain_ar,
    })
}

/// SNR gain of optimally armed release readout over budget-matched
/// dispersive readout; ≥ 1 because α_arm = 0 lies in the search domain.
pub fn gain_ar(chi: f64, kappa: f64, tau: f64, n_max: f64) -> Result<f64> {
    Ok(gains(chi, kappa, tau, n_max)?.gain_ar)
}

/// SNR gain of the longitudinal-style scheme (α_arm at its budget value)
/// over budget-matched dispersive readout.
pub fn gain_al(chi: f64, kappa: f64, tau: f64, n_max: f64) -> Result<f64> {
    Ok(gains(chi, kappa, tau, n_max)?.gain_al)
}

/// gain_al / gain_ar; > 1 where the longitudinal-style scheme wins.
pub fn gain_ratio(chi: f64, kappa: f64, tau: f64, n_max: f64) -> Result<f64> {
    Ok(gains(chi, kappa, tau, n_max)?.gain_ratio)
}

fn cell_at(r: f64, x: f64, n_max: f64) -> std::result::Result<GainCell, String> {
    // Dimensionless convention: κ = 1, χ = |χ|/κ, τ = κτ.
    let g = gains(r, 1.0, x, n_max).map_err(|e| e.to_string())?;
    Ok(GainCell {
        gain_ar: g.gain_ar,
        gain_al: g.gain_al,
        gain_ratio: g.gain_ratio,
        alpha_tilde: g.opt.alpha_tilde,
        recommended: if g.gain_ratio > 1.0 {
            SchemeKind::ArmLongitudinal
        } else {
            SchemeKind::ArmRelease
        },
    })
}

fn validate_axis(name: &'static str, axis: &[f64]) -> Result<()> {
    if axis.is_empty() {
        return Err(CoreError::domain(name, "axis must be nonempty".to_string()));
    }
    if axis.iter().any(|v| !v.is_finite()) {
        return Err(CoreError::domain(name, "axis values must be finite".to_string()));
    }
    if axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CoreError::domain(
            name,
            "axis must be strictly increasing".to_string(),
        ));
    }
    Ok(())
}

/// Evaluates the relative gains over a (|χ|/κ, κτ) grid, one independent
/// pure computation per cell, in parallel. The output is deterministic and
/// identical to a serial evaluation.
pub fn gain_map(chi_axis: &[f64], tau_axis: &[f64], n_max: f64) -> Result<GainMap> {
    validate_axis("chi_axis", chi_axis)?;
    validate_axis("tau_axis", tau_axis)?;
    if !(n_max > 0.0 && n_max.is_finite()) {
        return Err(CoreError::domain(
            "n_max",
            format!("must be positive and finite, got {n_max}"),
        ));
    }
    let cells = chi_axis
        .par_iter()
        .map(|&r| tau_axis.iter().map(|&x| cell_at(r, x, n_max)).collect())
        .collect();
    Ok(GainMap {
        chi_over_kappa_axis: chi_axis.to_vec(),
        kappa_tau_axis: tau_axis.to_vec(),
        cells,
    })
}

/// Serial twin of [`gain_map`]; used to check that parallel evaluation
/// changes nothing.
#[doc(hidden)]
pub fn gain_map_serial(chi_axis: &[f64], tau_axis: &[f64], n_max: f64) -> Result<GainMap> {
    validate_axis("chi_axis", chi_axis)?;
    validate_axis("tau_axis", tau_axis)?;
    let cells = chi_axis
        .iter()
        .map(|&r| tau_axis.iter().map(|&x| cell_at(r, x, n_max)).collect())
        .collect();
    Ok(GainMap {
        chi_over_kappa_axis: chi_axis.to_vec(),
        kappa_tau_axis: tau_axis.to_vec(),
        cells,
    })
}

/// Logarithmically spaced axis from `lo` to `hi` inclusive.
pub fn log_axis(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && n >= 2) {
        return Err(CoreError::domain(
            "axis",
            format!("need 0 < lo < hi and n >= 2, got lo={lo}, hi={hi}, n={n}"),
        ));
    }
    let (l0, l1) = (lo.ln(), hi.ln());
    Ok((0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i + 1 == n {
                hi
            } else {
                (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect())
}

/// Default map axes: |χ|/κ ∈ [0.1, 5] and κτ ∈ [0.1, 30], 60 log-spaced
/// points each.
pub fn default_axes() -> (Vec<f64>, Vec<f64>) {
    (
        log_axis(0.1, 5.0, 60).unwrap(),
        log_axis(0.1, 30.0, 60).unwrap(),
    )
}

/// Picks the better armed scheme for the given operating point.
///
/// The longitudinal-style scheme wins when gain_al/gain_ar > 1, and also on
/// an exact tie because its drive caps the photon number monotonically
/// instead of overshooting toward it. Otherwise the release scheme is
/// returned with the optimizer's arming amplitude and drive.
pub fn recommend(chi: f64, kappa: f64, tau: f64, n_max: f64) -> Result<Recommendation> {
    let g = gains(chi, kappa, tau, n_max)?;
    if g.gain_ratio >= 1.0 {
        let tie = g.gain_ratio == 1.0;
        Ok(Recommendation {
            scheme: SchemeKind::ArmLongitudinal,
            alpha_arm: g.alpha_al,
            drive: DriveProfile::ArmLongitudinal {
                alpha_arm: g.alpha_al,
                chi,
                kappa,
            },
            expected_snr: g.snr_al,
            expected_error: assignment_error(g.snr_al)?,
            gain_over_dispersive: g.gain_al,
            rationale: if tie {
                "tie between schemes; arm-and-longitudinal preferred because its drive \
                 approaches the photon budget monotonically"
                    .to_string()
            } else {
                format!(
                    "arm-and-longitudinal beats optimized arm-and-release by {:.4}x here",
                    g.gain_ratio
                )
            },
        })
    } else {
        Ok(Recommendation {
            scheme: SchemeKind::ArmRelease,
            alpha_arm: g.opt.alpha_arm_opt,
            drive: DriveProfile::Constant {
                epsilon1: g.opt.epsilon1_opt,
            },
            expected_snr: g.opt.snr_opt,
            expected_error: assignment_error(g.opt.snr_opt)?,
            gain_over_dispersive: g.gain_ar,
            rationale: format!(
                "optimized arm-and-release beats arm-and-longitudinal by {:.4}x here",
                1.0 / g.gain_ratio
            ),
        })
    }
}
