//! `curvature`: the closed-form density sampled on a grid for a profile.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use faer::c64;
use matconf_core::xi_integrate::{curvature_density, sample_grid, trace_integral, GridSample, PointData};
use matconf_numerics::{MatrixFunction, ProfileFields};
use serde::{Deserialize, Serialize};

use crate::config::{emit, load};
use crate::numerics::{ZetaArgs, ZetaConfig};
use crate::{CliError, Status};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Args, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CurvatureArgs {
    #[arg(long)]
    pub profile: Option<String>,
    #[arg(long)]
    pub profile_file: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Sampling grid of the fields; must be a multiple of `res`.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Output resolution per direction.
    #[arg(long)]
    pub res: Option<usize>,
    #[arg(long)]
    pub rotation: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CurvatureConfig {
    pub profile: Option<String>,
    pub profile_file: Option<PathBuf>,
    pub n: usize,
    pub grid: usize,
    pub res: usize,
    pub rotation: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl CurvatureArgs {
    pub fn resolve(self, file: CurvatureArgs) -> Result<CurvatureConfig, CliError> {
        let grid = self.grid.or(file.grid).unwrap_or(64);
        let res = self.res.or(file.res).unwrap_or(32);
        if res == 0 || grid % res != 0 {
            return Err(CliError::Input(format!("grid {grid} is not a multiple of res {res}")));
        }
        let profile_file = self.profile_file.or(file.profile_file);
        let profile = self.profile.or(file.profile);
        Ok(CurvatureConfig {
            profile: if profile.is_none() && profile_file.is_none() { Some("P4".into()) } else { profile },
            profile_file,
            n: self.n.or(file.n).unwrap_or(2),
            grid,
            res,
            rotation: self.rotation.or(file.rotation).unwrap_or(matconf_numerics::ROTATION_AMPLITUDE),
            format: self.format.or(file.format).unwrap_or_default(),
            out: self.out.or(file.out),
        })
    }

    fn zeta_view(cfg: &CurvatureConfig) -> Result<ZetaConfig, CliError> {
        ZetaArgs {
            profile: cfg.profile.clone().map(|p| vec![p]),
            profile_file: cfg.profile_file.clone(),
            n: Some(cfg.n),
            grid: Some(cfg.grid),
            rotation: Some(cfg.rotation),
            ..ZetaArgs::default()
        }
        .resolve(ZetaArgs::default())
    }
}

fn diagonal(m: &faer::Mat<c64>) -> Vec<c64> {
    (0..m.nrows()).map(|i| m[(i, i)]).collect()
}

/// Point data of `H(D+A)H` at grid node `(i, j)` of the field grid.
pub struct FieldSampler {
    big_h: MatrixFunction,
    dh: [MatrixFunction; 2],
    ddh: [[MatrixFunction; 2]; 2],
    a: [MatrixFunction; 2],
    da: [[MatrixFunction; 2]; 2],
}

impl FieldSampler {
    pub fn new(fields: &ProfileFields) -> Result<FieldSampler, CliError> {
        if !fields.big_h.is_diagonal(1e-12) {
            return Err(CliError::Input("H must be diagonal".into()));
        }
        let big_h = fields.big_h.clone();
        let dh = [big_h.delta(0), big_h.delta(1)];
        let ddh = [[dh[0].delta(0), dh[0].delta(1)], [dh[1].delta(0), dh[1].delta(1)]];
        let a = fields.gauge_field();
        let da = [[a[0].delta(0), a[0].delta(1)], [a[1].delta(0), a[1].delta(1)]];
        Ok(FieldSampler { big_h, dh, ddh, a, da })
    }

    pub fn point(&self, i: usize, j: usize) -> PointData {
        PointData {
            lambda: diagonal(self.big_h.sample(i, j)).iter().map(|z| z.re).collect(),
            delta_h: [diagonal(self.dh[0].sample(i, j)), diagonal(self.dh[1].sample(i, j))],
            hess_h: std::array::from_fn(|p| std::array::from_fn(|q| diagonal(self.ddh[p][q].sample(i, j)))),
            a: [self.a[0].sample(i, j).clone(), self.a[1].sample(i, j).clone()],
            delta_a: std::array::from_fn(|p| std::array::from_fn(|q| self.da[p][q].sample(i, j).clone())),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleRow {
    pub x: f64,
    pub y: f64,
    pub row: usize,
    pub col: usize,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Serialize)]
pub struct CurvatureReport {
    pub density: serde_json::Value,
    pub res: usize,
    /// `∫ Tr R`; zero on the torus.
    pub trace_integral: (f64, f64),
    pub samples: Vec<SampleRow>,
}

pub fn sample(cfg: &CurvatureConfig) -> Result<CurvatureReport, CliError> {
    let zeta = CurvatureArgs::zeta_view(cfg)?;
    let (_, fields) = zeta.fields()?.into_iter().next().ok_or_else(|| CliError::Input("no profile".into()))?;
    let sampler = FieldSampler::new(&fields)?;
    let density = curvature_density()?;
    let stride = cfg.grid / cfg.res;
    let res = cfg.res as f64;
    let samples: Vec<GridSample> = sample_grid(&density, cfg.res, |x, y| {
        sampler.point((x * res).round() as usize * stride, (y * res).round() as usize * stride)
    })?;
    let total = trace_integral(&samples);
    let mut rows = Vec::new();
    for s in &samples {
        for r in 0..s.density.nrows() {
            for c in 0..s.density.ncols() {
                let z = s.density[(r, c)];
                rows.push(SampleRow { x: s.x, y: s.y, row: r, col: c, re: z.re, im: z.im });
            }
        }
    }
    Ok(CurvatureReport { density: density.to_json(), res: cfg.res, trace_integral: (total.re, total.im), samples: rows })
}

pub fn run(args: CurvatureArgs, file: Option<&Path>) -> Result<Status, CliError> {
    let cfg = args.resolve(load(file)?)?;
    let report = sample(&cfg)?;
    eprintln!("∫ Tr R = {:+.3e} {:+.3e}i over a {}×{} grid", report.trace_integral.0, report.trace_integral.1, cfg.res, cfg.res);
    match cfg.format {
        Format::Json => emit("curvature", &cfg, &report, cfg.out.as_deref()),
        Format::Csv => {
            let sink: Box<dyn std::io::Write> = match &cfg.out {
                Some(p) => Box::new(std::fs::File::create(p)?),
                None => Box::new(std::io::stdout()),
            };
            let mut w = csv::Writer::from_writer(sink);
            for r in &report.samples {
                w.serialize(r).map_err(|e| CliError::Input(format!("csv: {e}")))?;
            }
            w.flush()?;
            if let Some(p) = &cfg.out {
                std::fs::write(crate::config::config_path(p), serde_json::to_string_pretty(&cfg).unwrap_or_default())?;
            }
            Ok(())
        }
    }?;
    Ok(Status::Pass)
}
