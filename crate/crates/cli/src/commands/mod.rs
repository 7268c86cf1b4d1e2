//! Subcommand implementations and the plumbing they share: unit handling,
//! CSV formatting, output collection, and worker-pool setup.

pub mod fullmodel;
pub mod maps;
pub mod semiclassical;

use std::env;
use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use readout_core::SchemeKind;

use crate::args::{Cli, Cmd, Units};
use crate::manifest::RunManifest;
use crate::resolve::{CliError, CliResult, Resolver};

pub fn dispatch(cli: Cli) -> CliResult<()> {
    init_jobs(cli.jobs)?;
    fs::create_dir_all(&cli.out_dir)?;
    match &cli.cmd {
        Cmd::Trajectory(a) => semiclassical::trajectory(&cli, a),
        Cmd::Snr(a) => semiclassical::snr(&cli, a),
        Cmd::Error(a) => semiclassical::error(&cli, a),
        Cmd::Gainmap(a) => maps::gainmap(&cli, a),
        Cmd::Recommend(a) => maps::recommend(&cli, a),
        Cmd::DriveProfile(a) => semiclassical::drive_profile(&cli, a),
        Cmd::VolterraCheck(a) => semiclassical::volterra_check(&cli, a),
        Cmd::Fullsim(a) => fullmodel::fullsim(&cli, a),
        Cmd::ChiTable(a) => fullmodel::chi_table(&cli, a),
    }
}

/// Sizes the global worker pool from --jobs, then READOUT_FORGE_JOBS, else
/// leaves the default (one worker per logical core).
fn init_jobs(jobs: Option<usize>) -> CliResult<()> {
    let n = match jobs {
        Some(n) => Some(n),
        None => match env::var("READOUT_FORGE_JOBS") {
            Ok(s) => Some(s.parse::<usize>().map_err(|_| {
                CliError::Usage(format!(
                    "error: READOUT_FORGE_JOBS must be a positive integer, got \"{s}\""
                ))
            })?),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        if n == 0 {
            return Err(CliError::Usage(
                "error: --jobs (or READOUT_FORGE_JOBS) must be at least 1".to_string(),
            ));
        }
        // Err only if a pool already exists, which is fine.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Unit handling. Internally, `mhz` runs with angular frequencies (rad/us)
/// so that rate-time products with times in microseconds stay dimensionless;
/// `dimensionless` runs with kappa = 1 defining the scale. Reported drive
/// amplitudes are converted back to the input convention (linear MHz or
/// units of kappa).
#[derive(Clone, Copy)]
pub struct UnitCtx {
    pub units: Units,
}

impl UnitCtx {
    pub fn new(units: Units) -> Self {
        UnitCtx { units }
    }

    /// chi and kappa in internal units, from whichever flags the active
    /// unit system accepts.
    pub fn chi_kappa(
        &self,
        r: &mut Resolver,
        chi_over_kappa: Option<f64>,
        chi: Option<f64>,
        kappa: Option<f64>,
    ) -> CliResult<(f64, f64)> {
        match self.units {
            Units::Dimensionless => {
                r.reject("chi", &chi, "applies only with --units mhz; use --chi-over-kappa")?;
                r.reject("kappa", &kappa, "applies only with --units mhz; use --chi-over-kappa")?;
                Ok((r.f64("chi-over-kappa", chi_over_kappa, None)?, 1.0))
            }
            Units::Mhz => {
                r.reject(
                    "chi-over-kappa",
                    &chi_over_kappa,
                    "applies only with --units dimensionless; use --chi and --kappa",
                )?;
                let c = r.f64("chi", chi, None)?;
                let k = r.f64("kappa", kappa, None)?;
                Ok((TAU * c, TAU * k))
            }
        }
    }

    /// Multiplies a flag-supplied drive amplitude into internal units.
    pub fn freq_in(&self) -> f64 {
        match self.units {
            Units::Dimensionless => 1.0,
            Units::Mhz => TAU,
        }
    }

    /// Multiplies an internal drive amplitude into the reporting units.
    pub fn freq_out(&self) -> f64 {
        match self.units {
            Units::Dimensionless => 1.0,
            Units::Mhz => 1.0 / TAU,
        }
    }

    pub fn time_label(&self) -> &'static str {
        match self.units {
            Units::Dimensionless => "time [1/kappa]",
            Units::Mhz => "time [us]",
        }
    }
}

/// `n` uniform samples of [0, t_end], endpoints included.
pub fn uniform_times(t_end: f64, n: usize) -> CliResult<Vec<f64>> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(CliError::domain(anyhow::anyhow!(
            "t-end must be positive and finite, got {t_end}"
        )));
    }
    if n < 2 {
        return Err(CliError::domain(anyhow::anyhow!("points must be at least 2, got {n}")));
    }
    Ok((0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect())
}

/// CSV with a header row and full double precision (17 significant digits).
pub fn csv_table(header: &str, rows: &[Vec<f64>]) -> String {
    let mut s = String::with_capacity(64 * (rows.len() + 1));
    s.push_str(header);
    s.push('\n');
    for row in rows {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(s, "{v:.16e}");
        }
        s.push('\n');
    }
    s
}

pub fn scheme_str(k: SchemeKind) -> &'static str {
    match k {
        SchemeKind::Dispersive => "dispersive",
        SchemeKind::ArmRelease => "arm_and_release",
        SchemeKind::ArmLongitudinal => "arm_and_longitudinal",
    }
}

/// Collects output files as they are written and finishes with the manifest.
pub struct Outputs<'a> {
    dir: &'a Path,
    manifest: RunManifest,
}

impl<'a> Outputs<'a> {
    pub fn new(dir: &'a Path, command: &str, resolver: &Resolver) -> Self {
        let params = serde_json::Value::Object(resolver.resolved.clone());
        Outputs {
            dir,
            manifest: RunManifest::new(command, params),
        }
    }

    pub fn write(&mut self, name: &str, content: &str) -> CliResult<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, content)?;
        self.manifest.add_file(&path)?;
        Ok(path)
    }

    /// Writes the manifest, re-checks every recorded output against its
    /// checksum, and lists everything produced.
    pub fn finish(self) -> CliResult<()> {
        let manifest_path = self.manifest.write(self.dir)?;
        self.manifest.verify(self.dir)?;
        for entry in &self.manifest.outputs {
            println!("wrote {}", self.dir.join(&entry.file).display());
        }
        println!("wrote {}", manifest_path.display());
        Ok(())
    }
}
