//! `zeta` and `gb-check`: cutoff sweeps of the heat-trace fit.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::Args;
use matconf_numerics::{
    custom_fields, gauss_bonnet_report, profile_fields, CustomProfile, FitOptions, GbOptions, GbReport, Guard, Profile,
    ProfileFields, ProfileParams, TWindow, DEFAULT_GRID, ROTATION_AMPLITUDE,
};
use serde::{Deserialize, Serialize};

use crate::config::{emit, load, load_required, workers};
use crate::{CliError, Status};

#[derive(Args, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZetaArgs {
    /// P1..P4, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub profile: Option<Vec<String>>,
    /// TOML/JSON profile given by Fourier coefficients of H, U and A.
    #[arg(long)]
    pub profile_file: Option<PathBuf>,
    /// Matrix size.
    #[arg(long)]
    pub n: Option<usize>,
    /// Cutoffs, comma separated.
    #[arg(long = "N", value_delimiter = ',')]
    #[serde(rename = "N")]
    pub cutoffs: Option<Vec<usize>>,
    /// `auto` or a fixed guard band.
    #[arg(long)]
    pub guard: Option<String>,
    /// Sampling grid of the coefficient fields.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Rotation amplitude of P3/P4.
    #[arg(long)]
    pub rotation: Option<f64>,
    #[arg(long)]
    pub c1: Option<f64>,
    #[arg(long)]
    pub c2: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Cutoff that fixes the small-t end of the window; default the largest cutoff.
    #[arg(long)]
    pub n_ref: Option<usize>,
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long)]
    pub kernel_rel_tol: Option<f64>,
    #[arg(long)]
    pub max_rel_residual: Option<f64>,
    /// Allowed |ζ_{D_h}(0) − ζ_D(0)| after extrapolation.
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV of (profile, N, t, trace) rows.
    #[arg(long)]
    pub traces: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ZetaConfig {
    pub profile: Vec<String>,
    pub profile_file: Option<PathBuf>,
    pub n: usize,
    #[serde(rename = "N")]
    pub cutoffs: Vec<usize>,
    pub guard: String,
    pub grid: usize,
    pub rotation: f64,
    pub c1: f64,
    pub c2: f64,
    pub points: usize,
    pub n_ref: usize,
    pub degree: usize,
    pub kernel_rel_tol: f64,
    pub max_rel_residual: f64,
    pub tolerance: f64,
    pub out: Option<PathBuf>,
    pub traces: Option<PathBuf>,
}

impl ZetaArgs {
    pub fn resolve(self, file: ZetaArgs) -> Result<ZetaConfig, CliError> {
        let cutoffs = self.cutoffs.or(file.cutoffs).unwrap_or_else(|| vec![8, 12, 16]);
        if cutoffs.is_empty() || cutoffs.contains(&0) {
            return Err(CliError::Input("cutoffs must be positive".into()));
        }
        let profile_file = self.profile_file.or(file.profile_file);
        let profile = self.profile.or(file.profile).unwrap_or_default();
        let profile = if profile.is_empty() && profile_file.is_none() { vec!["P2".into()] } else { profile };
        let window = TWindow::for_cutoff(*cutoffs.iter().max().unwrap());
        let fit = FitOptions::default();
        Ok(ZetaConfig {
            profile,
            profile_file,
            n: self.n.or(file.n).unwrap_or(2),
            guard: self.guard.or(file.guard).unwrap_or_else(|| "auto".into()),
            grid: self.grid.or(file.grid).unwrap_or(DEFAULT_GRID),
            rotation: self.rotation.or(file.rotation).unwrap_or(ROTATION_AMPLITUDE),
            c1: self.c1.or(file.c1).unwrap_or(window.c1),
            c2: self.c2.or(file.c2).unwrap_or(window.c2),
            points: self.points.or(file.points).unwrap_or(window.points),
            n_ref: self.n_ref.or(file.n_ref).unwrap_or(window.n_ref),
            degree: self.degree.or(file.degree).unwrap_or(fit.degree),
            kernel_rel_tol: self.kernel_rel_tol.or(file.kernel_rel_tol).unwrap_or(fit.kernel_rel_tol),
            max_rel_residual: self.max_rel_residual.or(file.max_rel_residual).unwrap_or(fit.max_rel_residual),
            tolerance: self.tolerance.or(file.tolerance).unwrap_or(0.05),
            out: self.out.or(file.out),
            traces: self.traces.or(file.traces),
            cutoffs,
        })
    }
}

impl ZetaConfig {
    pub fn options(&self) -> Result<GbOptions, CliError> {
        let guard: Guard = self.guard.parse()?;
        Ok(GbOptions {
            cutoffs: self.cutoffs.clone(),
            guard,
            window: TWindow { c1: self.c1, c2: self.c2, points: self.points, n_ref: self.n_ref },
            fit: FitOptions { degree: self.degree, kernel_rel_tol: self.kernel_rel_tol, max_rel_residual: self.max_rel_residual },
            tolerance: self.tolerance,
        })
    }

    /// Named fields for every requested profile.
    pub fn fields(&self) -> Result<Vec<(String, ProfileFields)>, CliError> {
        let mut out = Vec::new();
        for name in &self.profile {
            let prof: Profile = name.parse()?;
            let params = ProfileParams { n: self.n, grid: self.grid, rotation: self.rotation };
            out.push((prof.to_string(), profile_fields(prof, &params)?));
        }
        if let Some(path) = &self.profile_file {
            let custom: CustomProfile = load_required(path)?;
            let name = path.file_stem().map_or_else(|| "custom".into(), |s| s.to_string_lossy().into_owned());
            out.push((name, custom_fields(&custom, self.grid)?));
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceRow {
    pub profile: String,
    #[serde(rename = "N")]
    pub cutoff: usize,
    pub t: f64,
    pub trace: f64,
}

#[derive(Debug, Serialize)]
pub struct SweepReport {
    pub profiles: Vec<GbReport>,
}

/// Runs the profiles on a pool of `workers` threads, in input order.
pub fn sweep(cfg: &ZetaConfig, workers: usize) -> Result<(SweepReport, Vec<TraceRow>), CliError> {
    let opts = cfg.options()?;
    let jobs = cfg.fields()?;
    let results: Vec<Mutex<Option<Result<(GbReport, Vec<TraceRow>), CliError>>>> =
        jobs.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..workers.min(jobs.len()).max(1) {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::SeqCst);
                let Some((name, fields)) = jobs.get(k) else { break };
                let mut traces = Vec::new();
                let report = gauss_bonnet_report(name, fields, &opts, |row, fit| {
                    eprintln!(
                        "{name} N={:>3} dim={:>5} ζ_D(0)={:+.6} ζ_Dh(0)={:+.6} [{:+.6}, {:+.6}] {:.1}s",
                        row.cutoff, row.dim, row.zeta0_d, row.zeta0_dh, row.bracket.0, row.bracket.1, row.runtime
                    );
                    for (&t, &trace) in fit.t_grid.iter().zip(&fit.traces) {
                        traces.push(TraceRow { profile: name.clone(), cutoff: row.cutoff, t, trace });
                    }
                });
                *results[k].lock().unwrap() = Some(report.map(|r| (r, traces)).map_err(CliError::from));
            });
        }
    });
    let mut profiles = Vec::new();
    let mut traces = Vec::new();
    for r in results {
        let (report, t) = r.into_inner().unwrap().expect("every job ran")?;
        profiles.push(report);
        traces.extend(t);
    }
    Ok((SweepReport { profiles }, traces))
}

fn write_traces(path: &Path, rows: &[TraceRow]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    }
    w.flush()?;
    Ok(())
}

fn execute(command: &str, args: ZetaArgs, file: Option<&Path>) -> Result<SweepReport, CliError> {
    let cfg = args.resolve(load(file)?)?;
    let (report, traces) = sweep(&cfg, workers()?)?;
    if let Some(path) = &cfg.traces {
        write_traces(path, &traces)?;
    }
    emit(command, &cfg, &report, cfg.out.as_deref())?;
    Ok(report)
}

pub fn run_zeta(args: ZetaArgs, file: Option<&Path>) -> Result<Status, CliError> {
    execute("zeta", args, file).map(|_| Status::Pass)
}

/// Quality problems give 3; otherwise a failed comparison gives 2.
pub fn verdict(r: &GbReport) -> Status {
    if !r.kernel_stable {
        Status::NumericalFailure
    } else if !r.pass {
        Status::VerificationFailure
    } else {
        Status::Pass
    }
}

pub fn run_gb_check(args: ZetaArgs, file: Option<&Path>) -> Result<Status, CliError> {
    let report = execute("gb-check", args, file)?;
    let mut status = Status::Pass;
    for r in &report.profiles {
        let v = verdict(r);
        eprintln!(
            "{}: ζ_Dh(0) − ζ_D(0) = {:+.4e} (tolerance {:.0e}), kernel stable {} : {}",
            r.profile,
            r.difference,
            r.tolerance,
            r.kernel_stable,
            if v == Status::Pass { "PASS" } else { "FAIL" }
        );
        status = status.worst(v);
    }
    Ok(status)
}
