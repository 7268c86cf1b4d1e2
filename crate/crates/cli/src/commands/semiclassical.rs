//! Subcommands built on the closed-form pointer-state model: trajectory,
//! snr, error, drive-profile, and volterra-check.

use num_complex::Complex64;
use readout_core::{
    alpha_arm_for_al, amplitude_al, amplitude_ar, assignment_error, drive_al, epsilon_for_peak,
    log_axis, optimize_alpha_arm, snr_al_closed, snr_ar_closed, volterra_residual, DriveProfile,
    SchemeParams, SearchOptions,
};

use super::{csv_table, uniform_times, Outputs, UnitCtx};
use crate::args::{Cli, CurveArgs, DriveProfileArgs, SchemeArg, TrajectoryArgs, VolterraArgs};
use crate::resolve::{CliError, CliResult, Resolver};
use crate::svg::{self, Axes, Series};

const COLOR_G: &str = "#1f77b4";
const COLOR_E: &str = "#d62728";
const COLOR_DISP: &str = "#7f7f7f";
const COLOR_AR: &str = "#1f77b4";
const COLOR_AL: &str = "#2ca02c";

fn scheme_title(s: SchemeArg) -> &'static str {
    match s {
        SchemeArg::Dispersive => "dispersive",
        SchemeArg::Ar => "arm-and-release",
        SchemeArg::Al => "arm-and-longitudinal",
    }
}

/// Arming amplitude for a scheme: the explicit override, otherwise the
/// scheme's natural choice under the photon budget (0 for dispersive, the
/// release-time optimum for arm-and-release, the budget-filling value for
/// arm-and-longitudinal).
fn resolve_alpha_arm(
    scheme: SchemeArg,
    override_alpha: Option<f64>,
    chi: f64,
    kappa: f64,
    n_max: f64,
    tau: f64,
) -> CliResult<f64> {
    if let Some(a) = override_alpha {
        return Ok(a);
    }
    Ok(match scheme {
        SchemeArg::Dispersive => 0.0,
        SchemeArg::Ar => {
            optimize_alpha_arm(chi, kappa, tau, n_max, &SearchOptions::default())?.alpha_arm_opt
        }
        SchemeArg::Al => alpha_arm_for_al(chi, kappa, n_max)?,
    })
}

pub fn trajectory(cli: &Cli, a: &TrajectoryArgs) -> CliResult<()> {
    let mut r = Resolver::new(cli.config.as_deref(), "trajectory")?;
    let u = UnitCtx::new(cli.units);
    r.note("units", cli.units.as_str());
    let scheme = r.scheme(a.scheme, SchemeArg::Dispersive)?;
    let (chi, kappa) = u.chi_kappa(&mut r, a.chi_over_kappa, a.chi, a.kappa)?;
    let n_max = r.f64("n-max", a.n_max, None)?;
    let t_end = r.f64("t-end", a.t_end, None)?;
    let points = r.usize("points", a.points, Some(501))?;
    let alpha_override = r.f64_opt("alpha-arm", a.alpha_arm)?;
    let eps_override = r.f64_opt("epsilon1", a.epsilon1)?.map(|e| e * u.freq_in());
    let times = uniform_times(t_end, points)?;

    let alpha_arm = resolve_alpha_arm(scheme, alpha_override, chi, kappa, n_max, t_end)?;
    r.note("alpha_arm", alpha_arm);

    let mut alpha_g = Vec::with_capacity(points);
    let mut alpha_e = Vec::with_capacity(points);
    match scheme {
        SchemeArg::Dispersive | SchemeArg::Ar => {
            let eps = match eps_override {
                Some(e) => e,
                None => epsilon_for_peak(alpha_arm, chi, kappa, n_max)?,
            };
            r.note("epsilon1", eps * u.freq_out());
            let p = SchemeParams::resonant(chi, kappa, eps, alpha_arm, n_max).validate()?;
            for &t in &times {
                let (g, e) = amplitude_ar(&p, t)?;
                alpha_g.push(g);
                alpha_e.push(e);
            }
        }
        SchemeArg::Al => {
            if eps_override.is_some() {
                return Err(CliError::domain(anyhow::anyhow!(
                    "the holding envelope is fixed by alpha_arm; \
                     --epsilon1 does not apply to scheme al"
                )));
            }
            for &t in &times {
                let (g, e) = amplitude_al(alpha_arm, chi, kappa, t)?;
                alpha_g.push(g);
                alpha_e.push(e);
            }
        }
    }

    let rows: Vec<Vec<f64>> = times
        .iter()
        .zip(alpha_g.iter().zip(&alpha_e))
        .map(|(&t, (g, e))| vec![t, g.re, g.im, e.re, e.im, g.norm_sqr(), e.norm_sqr()])
        .collect();
    let csv = csv_table("t,re_a_g,im_a_g,re_a_e,im_a_e,n_g,n_e", &rows);

    let to_xy = |v: &[Complex64]| v.iter().map(|a| (a.re, a.im)).collect::<Vec<_>>();
    let title = format!("Pointer-state paths ({})", scheme_title(scheme));
    let plot = svg::line_plot(
        &Axes {
            title: &title,
            x_label: "Re <a>",
            y_label: "Im <a>",
            log_x: false,
            log_y: false,
        },
        &[
            Series { name: "ground", color: COLOR_G, points: to_xy(&alpha_g) },
            Series { name: "excited", color: COLOR_E, points: to_xy(&alpha_e) },
        ],
    );

    let mut out = Outputs::new(&cli.out_dir, "trajectory", &r);
    out.write("trajectory.csv", &csv)?;
    out.write("trajectory_phase.svg", &plot)?;
    out.finish()
}

struct Curves {
    taus: Vec<f64>,
    kappa: f64,
    disp: Vec<f64>,
    ar: Vec<f64>,
    al: Vec<f64>,
    ar_alpha: Vec<f64>,
    ar_eps: Vec<f64>,
}

/// Budget-matched SNR of all three schemes on a log grid of integration
/// times: plain dispersive, arm-and-release re-optimized at every time, and
/// arm-and-longitudinal.
fn scheme_curves(u: UnitCtx, r: &mut Resolver, a: &CurveArgs) -> CliResult<Curves> {
    let (chi, kappa) = u.chi_kappa(r, a.chi_over_kappa, a.chi, a.kappa)?;
    let n_max = r.f64("n-max", a.n_max, None)?;
    let tau_min = r.f64("tau-min", a.tau_min, Some(0.1 / kappa))?;
    let tau_max = r.f64("tau-max", a.tau_max, Some(30.0 / kappa))?;
    let points = r.usize("points", a.points, Some(120))?;
    let taus = log_axis(tau_min, tau_max, points)?;

    let eps_d = epsilon_for_peak(0.0, chi, kappa, n_max)?;
    let p_d = SchemeParams::resonant(chi, kappa, eps_d, 0.0, n_max).validate()?;
    let alpha_al = alpha_arm_for_al(chi, kappa, n_max)?;
    r.note("epsilon1_dispersive", eps_d * u.freq_out());
    r.note("alpha_arm_al", alpha_al);

    let opts = SearchOptions::default();
    let mut c = Curves {
        taus: taus.clone(),
        kappa,
        disp: Vec::with_capacity(points),
        ar: Vec::with_capacity(points),
        al: Vec::with_capacity(points),
        ar_alpha: Vec::with_capacity(points),
        ar_eps: Vec::with_capacity(points),
    };
    for &tau in &taus {
        c.disp.push(snr_ar_closed(&p_d, tau)?.snr);
        let o = optimize_alpha_arm(chi, kappa, tau, n_max, &opts)?;
        c.ar.push(o.snr_opt);
        c.ar_alpha.push(o.alpha_arm_opt);
        c.ar_eps.push(o.epsilon1_opt);
        c.al.push(snr_al_closed(alpha_al, chi, kappa, tau)?.snr);
    }
    Ok(c)
}

pub fn snr(cli: &Cli, a: &CurveArgs) -> CliResult<()> {
    let mut r = Resolver::new(cli.config.as_deref(), "snr")?;
    let u = UnitCtx::new(cli.units);
    r.note("units", cli.units.as_str());
    let c = scheme_curves(u, &mut r, a)?;

    let rows: Vec<Vec<f64>> = (0..c.taus.len())
        .map(|i| {
            vec![
                c.taus[i],
                c.kappa * c.taus[i],
                c.disp[i],
                c.ar[i],
                c.al[i],
                c.ar_alpha[i],
                c.ar_eps[i] * u.freq_out(),
            ]
        })
        .collect();
    let csv = csv_table(
        "tau,kappa_tau,snr_dispersive,snr_arm_release,snr_arm_longitudinal,\
         alpha_arm_ar,epsilon1_ar",
        &rows,
    );

    let series = |vals: &[f64], name: &'static str, color: &'static str| Series {
        name,
        color,
        points: c.taus.iter().copied().zip(vals.iter().copied()).collect(),
    };
    let plot = svg::line_plot(
        &Axes {
            title: "Matched-filter SNR under a shared photon budget",
            x_label: u.time_label(),
            y_label: "SNR",
            log_x: true,
            log_y: true,
        },
        &[
            series(&c.disp, "dispersive", COLOR_DISP),
            series(&c.ar, "arm-and-release", COLOR_AR),
            series(&c.al, "arm-and-longitudinal", COLOR_AL),
        ],
    );

    let mut out = Outputs::new(&cli.out_dir, "snr", &r);
    out.write("snr.csv", &csv)?;
    out.write("snr.svg", &plot)?;
    out.finish()
}

pub fn error(cli: &Cli, a: &CurveArgs) -> CliResult<()> {
    let mut r = Resolver::new(cli.config.as_deref(), "error")?;
    let u = UnitCtx::new(cli.units);
    r.note("units", cli.units.as_str());
    let c = scheme_curves(u, &mut r, a)?;

    let errs = |vals: &[f64]| -> CliResult<Vec<f64>> {
        vals.iter().map(|&s| assignment_error(s).map_err(Into::into)).collect()
    };
    let (e_disp, e_ar, e_al) = (errs(&c.disp)?, errs(&c.ar)?, errs(&c.al)?);

    let rows: Vec<Vec<f64>> = (0..c.taus.len())
        .map(|i| vec![c.taus[i], c.kappa * c.taus[i], e_disp[i], e_ar[i], e_al[i]])
        .collect();
    let csv = csv_table(
        "tau,kappa_tau,err_dispersive,err_arm_release,err_arm_longitudinal",
        &rows,
    );

    let series = |vals: &[f64], name: &'static str, color: &'static str| Series {
        name,
        color,
        points: c.taus.iter().copied().zip(vals.iter().copied()).collect(),
    };
    let plot = svg::line_plot(
        &Axes {
            title: "Assignment error under a shared photon budget",
            x_label: u.time_label(),
            y_label: "error probability",
            log_x: true,
            log_y: true,
        },
        &[
            series(&e_disp, "dispersive", COLOR_DISP),
            series(&e_ar, "arm-and-release", COLOR_AR),
            series(&e_al, "arm-and-longitudinal", COLOR_AL),
        ],
    );

    let mut out = Outputs::new(&cli.out_dir, "error", &r);
    out.write("error.csv", &csv)?;
    out.write("error.svg", &plot)?;
    out.finish()
}

pub fn drive_profile(cli: &Cli, a: &DriveProfileArgs) -> CliResult<()> {
    let mut r = Resolver::new(cli.config.as_deref(), "drive-profile")?;
    let u = UnitCtx::new(cli.units);
    r.note("units", cli.units.as_str());
    let scheme = r.scheme(a.scheme, SchemeArg::Al)?;
    let (chi, kappa) = u.chi_kappa(&mut r, a.chi_over_kappa, a.chi, a.kappa)?;
    let n_max = r.f64("n-max", a.n_max, None)?;
    let t_end = r.f64("t-end", a.t_end, Some(20.0 / kappa))?;
    let points = r.usize("points", a.points, Some(501))?;
    let alpha_override = r.f64_opt("alpha-arm", a.alpha_arm)?;
    let eps_override = r.f64_opt("epsilon1", a.epsilon1)?.map(|e| e * u.freq_in());
    let times = uniform_times(t_end, points)?;

    let alpha_arm = resolve_alpha_arm(scheme, alpha_override, chi, kappa, n_max, t_end)?;
    r.note("alpha_arm", alpha_arm);

    let values: Vec<f64> = match scheme {
        SchemeArg::Al => {
            if eps_override.is_some() {
                return Err(CliError::domain(anyhow::anyhow!(
                    "the holding envelope is fixed by alpha_arm; \
                     --epsilon1 does not apply to scheme al"
                )));
            }
            times
                .iter()
                .map(|&t| drive_al(alpha_arm, chi, kappa, t))
                .collect::<Result<_, _>>()?
        }
        SchemeArg::Dispersive | SchemeArg::Ar => {
            let eps = match eps_override {
                Some(e) => e,
                None => epsilon_for_peak(alpha_arm, chi, kappa, n_max)?,
            };
            r.note("epsilon1", eps * u.freq_out());
            vec![eps; times.len()]
        }
    };

    let rows: Vec<Vec<f64>> = times
        .iter()
        .zip(&values)
        .map(|(&t, &v)| vec![t, v * u.freq_out()])
        .collect();
    let csv = csv_table("t,epsilon1", &rows);

    let title = format!("Drive envelope ({})", scheme_title(scheme));
    let plot = svg::line_plot(
        &Axes {
            title: &title,
            x_label: u.time_label(),
            y_label: "epsilon1",
            log_x: false,
            log_y: false,
        },
        &[Series {
            name: "epsilon1(t)",
            color: COLOR_AR,
            points: rows.iter().map(|row| (row[0], row[1])).collect(),
        }],
    );

    let mut out = Outputs::new(&cli.out_dir, "drive-profile", &r);
    out.write("drive_profile.csv", &csv)?;
    out.write("drive_profile.svg", &plot)?;
    out.finish()
}

pub fn volterra_check(cli: &Cli, a: &VolterraArgs) -> CliResult<()> {
    let mut r = Resolver::new(cli.config.as_deref(), "volterra-check")?;
    let u = UnitCtx::new(cli.units);
    r.note("units", cli.units.as_str());
    let (chi, kappa) = u.chi_kappa(&mut r, a.chi_over_kappa, a.chi, a.kappa)?;
    let alpha_arm = match r.f64_opt("alpha-arm", a.alpha_arm)? {
        Some(x) => x,
        None => alpha_arm_for_al(chi, kappa, r.f64("n-max", a.n_max, None)?)?,
    };
    r.note("alpha_arm", alpha_arm);
    let t_end = r.f64("t-end", a.t_end, Some(20.0 / kappa))?;
    let points = r.usize("points", a.points, Some(10))?;
    let tol = r.f64_opt("tol", a.tol)?;
    if points == 0 {
        return Err(CliError::domain(anyhow::anyhow!("points must be at least 1")));
    }

    let drive = DriveProfile::ArmLongitudinal { alpha_arm, chi, kappa };
    drive.validate()?;
    let mut rows = Vec::with_capacity(points);
    let mut worst: f64 = 0.0;
    for i in 1..=points {
        let t = t_end * i as f64 / points as f64;
        let res = volterra_residual(&drive, alpha_arm, chi, kappa, t)?;
        worst = worst.max(res.abs());
        rows.push(vec![t, drive.value(t) * u.freq_out(), res * u.freq_out()]);
    }
    let csv = csv_table("t,epsilon1,residual", &rows);

    let mut out = Outputs::new(&cli.out_dir, "volterra-check", &r);
    out.write("volterra_check.csv", &csv)?;
    out.finish()?;
    println!(
        "max |residual| = {:.3e} over {points} sampled times",
        worst * u.freq_out()
    );
    if let Some(tol) = tol {
        if worst * u.freq_out() > tol {
            return Err(CliError::domain(anyhow::anyhow!(
                "holding-drive residual {:.3e} exceeds --tol {tol:.3e}",
                worst * u.freq_out()
            )));
        }
    }
    Ok(())
}
