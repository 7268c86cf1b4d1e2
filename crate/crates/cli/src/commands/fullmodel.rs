//! Subcommands backed by the full transmon-cavity model: fullsim and
//! chi-table. Device parameters are always linear MHz (value/2pi) and the
//! `--units` flag is ignored here.

use std::fmt::Write as _;

use readout_lindblad::io::{metadata_json, write_csv, RunConfig};
use readout_lindblad::{chi_at_target, dressed_spectrum, FullSimResult, TransmonParams};

use super::Outputs;
use crate::args::{ChiTableArgs, Cli, FullsimArgs, SchemeArg};
use crate::resolve::{CliResult, Resolver};
use crate::svg::{self, Axes, Series};

/// Shared device resolution with the reference-device defaults.
#[allow(clippy::too_many_arguments)]
fn resolve_device(
    r: &mut Resolver,
    ej: Option<f64>,
    ec: Option<f64>,
    g: Option<f64>,
    omega_r: Option<f64>,
    kappa: Option<f64>,
    n_levels: Option<usize>,
    fock_cutoff: Option<usize>,
    charge_cutoff: Option<usize>,
) -> CliResult<TransmonParams> {
    // Accept a nested {"transmon": {...}} config block too.
    r.adopt_nested("transmon", &[("n_transmon_levels", "n_levels")]);
    let ej = r.f64("ej", ej, Some(16930.0))?;
    let ec = r.f64("ec", ec, Some(200.4))?;
    let g = r.f64("g", g, Some(159.1))?;
    let omega_r = r.f64("omega-r", omega_r, Some(7655.0))?;
    let kappa = r.f64("kappa", kappa, Some(10.1))?;
    let n_levels = r.usize("n-levels", n_levels, Some(6))?;
    let fock = r.usize("fock-cutoff", fock_cutoff, Some(25))?;
    let charge = r.usize("charge-cutoff", charge_cutoff, Some(40))?;
    Ok(TransmonParams::new(ej, ec, g, omega_r, kappa, n_levels, fock, charge))
}

pub fn fullsim(cli: &Cli, a: &FullsimArgs) -> CliResult<()> {
    let mut r = Resolver::new(cli.config.as_deref(), "fullsim")?;
    let transmon = resolve_device(
        &mut r,
        a.ej,
        a.ec,
        a.g,
        a.omega_r,
        a.kappa,
        a.n_levels,
        a.fock_cutoff,
        a.charge_cutoff,
    )?;
    let scheme = r.scheme(a.scheme, SchemeArg::Al)?;
    let config = RunConfig {
        transmon,
        scheme: scheme.kind(),
        n_tar: r.usize("n-tar", a.n_tar, Some(1))?,
        n_max: r.f64("n-max", a.n_max, Some(2.0))?,
        horizon: r.f64("horizon", a.horizon, Some(3.0))?,
        steps_per_period: r.usize("steps-per-period", a.steps_per_period, Some(96))?,
        samples: r.usize("samples", a.samples, Some(301))?,
    };

    let result = config.run()?;

    let mut csv = Vec::new();
    write_csv(&mut csv, &result)?;
    let csv = String::from_utf8(csv).expect("CSV is ASCII");
    let mut meta = serde_json::to_string_pretty(&metadata_json(&config.transmon, &result))?;
    meta.push('\n');

    let mut out = Outputs::new(&cli.out_dir, "fullsim", &r);
    out.write("fullsim.csv", &csv)?;
    out.write("fullsim_metadata.json", &meta)?;
    out.write("fullsim_trajectory.svg", &trajectory_plot(&result))?;
    out.finish()?;

    let last = result.a_g.len() - 1;
    println!(
        "separation Re<a>_g - Re<a>_e at kappa*t = {:.2}: {:.4}",
        result.kappa_t[last],
        result.a_g[last].re - result.a_e[last].re
    );
    println!("alpha_arm = {:.4}, chi_ntar = {:.4} MHz", result.alpha_arm, result.chi_ntar);
    println!(
        "max trace deviation {:.2e}, max top-Fock population {:.2e}",
        result.max_trace_dev(),
        result.max_top_fock()
    );
    Ok(())
}

fn trajectory_plot(r: &FullSimResult) -> String {
    let curve = |f: &dyn Fn(usize) -> f64| -> Vec<(f64, f64)> {
        (0..r.kappa_t.len()).map(|i| (r.kappa_t[i], f(i))).collect()
    };
    svg::line_plot(
        &Axes {
            title: "Demodulated cavity amplitude (full model)",
            x_label: "kappa*t",
            y_label: "<a> components",
            log_x: false,
            log_y: false,
        },
        &[
            Series { name: "Re, ground", color: "#1f77b4", points: curve(&|i| r.a_g[i].re) },
            Series { name: "Re, excited", color: "#d62728", points: curve(&|i| r.a_e[i].re) },
            Series { name: "Im, ground", color: "#9edae5", points: curve(&|i| r.a_g[i].im) },
            Series { name: "Im, excited", color: "#ff9896", points: curve(&|i| r.a_e[i].im) },
        ],
    )
}

pub fn chi_table(cli: &Cli, a: &ChiTableArgs) -> CliResult<()> {
    let mut r = Resolver::new(cli.config.as_deref(), "chi-table")?;
    let params = resolve_device(
        &mut r,
        a.ej,
        a.ec,
        a.g,
        a.omega_r,
        a.kappa,
        a.n_levels,
        a.fock_cutoff,
        a.charge_cutoff,
    )?;
    let n_tar = r.usize("n-tar", a.n_tar, Some(1))?;

    let spectrum = dressed_spectrum(&params)?;
    let (chi_ntar, omega_1) = chi_at_target(&spectrum, n_tar)?;

    let mut csv = String::from("level,n,energy_mhz,chi_mhz\n");
    for (i, (energies, chis)) in spectrum.energies.iter().zip(&spectrum.chi).enumerate() {
        for (n, (&e, &x)) in energies.iter().zip(chis).enumerate() {
            let _ = writeln!(csv, "{i},{n},{e:.16e},{x:.16e}");
        }
    }

    let summary = serde_json::json!({
        "omega_r_tilde_mhz": spectrum.omega_r_tilde,
        "n_tar": n_tar,
        "chi_ntar_mhz": chi_ntar,
        "chi_ntar_over_kappa": chi_ntar.abs() / params.kappa,
        "omega_1_mhz": omega_1,
        "max_labeled_fock": spectrum.max_labeled_fock(),
        "device_mhz": {
            "ej": params.ej,
            "ec": params.ec,
            "g": params.g,
            "omega_r": params.omega_r,
            "kappa": params.kappa,
        },
    });
    let mut summary_text = serde_json::to_string_pretty(&summary)?;
    summary_text.push('\n');

    let mut out = Outputs::new(&cli.out_dir, "chi-table", &r);
    out.write("chi_table.csv", &csv)?;
    out.write("chi_table_summary.json", &summary_text)?;
    out.finish()?;

    println!("omega_r_tilde = {:.4} MHz", spectrum.omega_r_tilde);
    println!(
        "chi at n_tar = {n_tar}: {chi_ntar:.4} MHz ({:.4} kappa)",
        chi_ntar.abs() / params.kappa
    );
    println!("recommended drive frequency omega_1 = {omega_1:.4} MHz");
    Ok(())
}
