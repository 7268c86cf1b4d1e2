//! Subcommands over the (|chi|/kappa, kappa*tau) operating plane: gainmap
//! and recommend.

use std::fmt::Write as _;

use readout_core::{gain_map, log_axis, recommend as core_recommend, DriveProfile, GainMap};
use serde_json::Value;

use super::{scheme_str, Outputs, UnitCtx};
use crate::args::{Cli, GainmapArgs, RecommendArgs, Units};
use crate::resolve::{CliError, CliResult, Resolver};
use crate::svg::{self, Axes};

pub fn gainmap(cli: &Cli, a: &GainmapArgs) -> CliResult<()> {
    let mut r = Resolver::new(cli.config.as_deref(), "gainmap")?;
    // The map is dimensionless by construction: both axes are ratios.
    r.note("units", "dimensionless");
    let n_max = r.f64("n-max", a.n_max, None)?;
    let chi_min = r.f64("chi-min", a.chi_min, Some(0.1))?;
    let chi_max = r.f64("chi-max", a.chi_max, Some(5.0))?;
    let tau_min = r.f64("tau-min", a.tau_min, Some(0.1))?;
    let tau_max = r.f64("tau-max", a.tau_max, Some(30.0))?;
    let chi_points = r.usize("chi-points", a.chi_points, Some(60))?;
    let tau_points = r.usize("tau-points", a.tau_points, Some(60))?;

    let chi_axis = log_axis(chi_min, chi_max, chi_points)?;
    let tau_axis = log_axis(tau_min, tau_max, tau_points)?;
    let map = gain_map(&chi_axis, &tau_axis, n_max)?;

    let mut out = Outputs::new(&cli.out_dir, "gainmap", &r);
    out.write("gainmap.csv", &map_csv(&map))?;

    let field = |pick: &dyn Fn(&readout_core::GainCell) -> f64| -> Vec<Vec<f64>> {
        map.cells
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| c.as_ref().map(pick).unwrap_or(f64::NAN))
                    .collect()
            })
            .collect()
    };
    let heat = |title: &str, values: &[Vec<f64>]| -> String {
        svg::heatmap(
            &Axes {
                title,
                x_label: "kappa*tau",
                y_label: "|chi|/kappa",
                log_x: true,
                log_y: true,
            },
            &tau_axis,
            &chi_axis,
            values,
            true,
        )
    };
    out.write(
        "gainmap_gain_ar.svg",
        &heat("SNR gain of arm-and-release over dispersive", &field(&|c| c.gain_ar)),
    )?;
    out.write(
        "gainmap_gain_al.svg",
        &heat("SNR gain of arm-and-longitudinal over dispersive", &field(&|c| c.gain_al)),
    )?;
    out.write(
        "gainmap_gain_ratio.svg",
        &heat(
            "Arm-and-longitudinal over arm-and-release",
            &field(&|c| c.gain_ratio),
        ),
    )?;
    out.finish()
}

fn map_csv(map: &GainMap) -> String {
    let mut s =
        String::from("chi_over_kappa,kappa_tau,gain_ar,gain_al,gain_ratio,alpha_tilde,recommended\n");
    for (i, &c) in map.chi_over_kappa_axis.iter().enumerate() {
        for (j, &t) in map.kappa_tau_axis.iter().enumerate() {
            match &map.cells[i][j] {
                Ok(cell) => {
                    let _ = writeln!(
                        s,
                        "{c:.16e},{t:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                        cell.gain_ar,
                        cell.gain_al,
                        cell.gain_ratio,
                        cell.alpha_tilde,
                        scheme_str(cell.recommended)
                    );
                }
                Err(_) => {
                    let _ = writeln!(s, "{c:.16e},{t:.16e},nan,nan,nan,nan,error");
                }
            }
        }
    }
    s
}

pub fn recommend(cli: &Cli, a: &RecommendArgs) -> CliResult<()> {
    let mut r = Resolver::new(cli.config.as_deref(), "recommend")?;
    let u = UnitCtx::new(cli.units);
    r.note("units", cli.units.as_str());
    let (chi, kappa) = u.chi_kappa(&mut r, a.chi_over_kappa, a.chi, a.kappa)?;
    let kt = match cli.units {
        Units::Dimensionless => {
            r.reject("tau", &a.tau, "applies only with --units mhz; use --kappa-tau")?;
            r.f64("kappa-tau", a.kappa_tau, None)?
        }
        Units::Mhz => {
            if a.kappa_tau.is_some() && a.tau.is_some() {
                return Err(CliError::Usage(
                    "error: give either --kappa-tau or --tau, not both".to_string(),
                ));
            }
            match r.f64_opt("kappa-tau", a.kappa_tau)? {
                Some(x) => x,
                None => kappa * r.f64("tau", a.tau, None)?,
            }
        }
    };
    r.note("kappa_tau", kt);
    let n_max = r.f64("n-max", a.n_max, None)?;

    let rec = core_recommend(chi, kappa, kt / kappa, n_max)?;
    let mut doc = serde_json::to_value(&rec)?;
    doc["drive"] = serde_json::to_value(scale_drive(&rec.drive, u.freq_out()))?;
    doc.as_object_mut()
        .expect("recommendation serializes to an object")
        .insert("inputs".to_string(), Value::Object(r.resolved.clone()));
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');

    let mut out = Outputs::new(&cli.out_dir, "recommend", &r);
    out.write("recommendation.json", &text)?;
    out.finish()?;
    print!("{text}");
    Ok(())
}

/// Converts the frequency-like fields of a drive back to reporting units.
fn scale_drive(d: &DriveProfile, s: f64) -> DriveProfile {
    match d {
        DriveProfile::Constant { epsilon1 } => DriveProfile::Constant { epsilon1: epsilon1 * s },
        DriveProfile::ArmLongitudinal { alpha_arm, chi, kappa } => DriveProfile::ArmLongitudinal {
            alpha_arm: *alpha_arm,
            chi: chi * s,
            kappa: kappa * s,
        },
        DriveProfile::Tabulated { times, values } => DriveProfile::Tabulated {
            times: times.clone(),
            values: values.iter().map(|v| v * s).collect(),
        },
    }
}
