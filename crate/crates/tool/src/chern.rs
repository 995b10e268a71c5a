//! `chern`, `diag-check` and `field-example`.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use faer::{c64, Mat};
use matconf_chern::{
    bott_projection, chern_density, diagonalizability_verdict, embed_in_surface, make_torus_projection,
    projection_chern_plaquette, BumpTriple, ChernReport, HField, ProjectionCheck, ProjectionField, Surface,
    GAP_THRESHOLD,
};
use serde::{Deserialize, Serialize};

use crate::config::{emit, load, parse_grid};
use crate::{CliError, Status};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    Bott,
    Torus,
    Embed,
}

#[derive(Args, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChernArgs {
    #[arg(long, value_enum)]
    pub case: Option<Case>,
    #[arg(long)]
    pub genus: Option<usize>,
    /// `AxB`: `n_phi × n_theta` on the sphere, `nt × ns` on the torus chart.
    #[arg(long)]
    pub grid: Option<String>,
    /// Rise interval of `f` (support of `g`), `a,b`.
    #[arg(long, value_delimiter = ',')]
    pub rise: Option<Vec<f64>>,
    /// Fall interval of `f` (support of `h`), `a,b`.
    #[arg(long, value_delimiter = ',')]
    pub fall: Option<Vec<f64>>,
    /// Allowed distance of the Chern integral from an integer.
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChernConfig {
    pub case: Case,
    pub genus: usize,
    pub grid: String,
    pub rise: Vec<f64>,
    pub fall: Vec<f64>,
    pub tolerance: f64,
    pub out: Option<PathBuf>,
}

impl ChernArgs {
    pub fn resolve(self, file: ChernArgs) -> ChernConfig {
        let case = self.case.or(file.case).unwrap_or(Case::Bott);
        let b = BumpTriple::default();
        let default_grid = match case {
            Case::Bott => "200x100",
            Case::Torus => "400x128",
            Case::Embed => "200x24",
        };
        ChernConfig {
            case,
            genus: self.genus.or(file.genus).unwrap_or(match case {
                Case::Bott => 0,
                Case::Torus => 1,
                Case::Embed => 2,
            }),
            grid: self.grid.or(file.grid).unwrap_or_else(|| default_grid.into()),
            rise: self.rise.or(file.rise).unwrap_or_else(|| vec![b.rise.0, b.rise.1]),
            fall: self.fall.or(file.fall).unwrap_or_else(|| vec![b.fall.0, b.fall.1]),
            tolerance: self.tolerance.or(file.tolerance).unwrap_or(1e-3),
            out: self.out.or(file.out),
        }
    }
}

fn interval(v: &[f64], what: &str) -> Result<(f64, f64), CliError> {
    match v {
        [a, b] if 0.0 < *a && a < b && *b < 1.0 => Ok((*a, *b)),
        _ => Err(CliError::Input(format!("{what} must be two increasing numbers in (0, 1)"))),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SurfaceSummary {
    pub kind: &'static str,
    pub genus: usize,
    pub vertices: usize,
    pub faces: usize,
    pub euler_characteristic: i64,
}

fn summary(s: &Surface, genus: usize) -> SurfaceSummary {
    let kind = match s {
        Surface::Sphere { .. } => "sphere",
        Surface::Torus { .. } => "torus",
        Surface::Mesh { .. } => "mesh",
    };
    let euler_characteristic = if kind == "sphere" { 2 } else { s.euler_characteristic() };
    SurfaceSummary { kind, genus, vertices: s.vertex_count(), faces: s.faces().len(), euler_characteristic }
}

#[derive(Clone, Debug, Serialize)]
pub struct ChernCaseReport {
    pub surface: SurfaceSummary,
    pub projection: ProjectionCheck,
    /// `∫ (i/2π) Tr(p dp∧dp)` on the chart (the tube chart for embeddings).
    pub density_integral: Option<f64>,
    /// Density integral over the support of `h` (torus chart only).
    pub flux_on_supp_h: Option<f64>,
    pub plaquette: f64,
    pub chern: i64,
    pub residual: f64,
    pub tolerance: f64,
}

fn torus_chart(cfg: &ChernConfig) -> Result<(BumpTriple, ProjectionField), CliError> {
    let b = BumpTriple { rise: interval(&cfg.rise, "rise")?, fall: interval(&cfg.fall, "fall")?, ..BumpTriple::default() };
    let (nt, ns) = parse_grid(&cfg.grid)?;
    Ok((b, make_torus_projection(&b, Surface::torus(nt, ns)?)?))
}

pub fn chern_case(cfg: &ChernConfig) -> Result<ChernCaseReport, CliError> {
    let mut flux_on_supp_h = None;
    let (field, density_integral) = match cfg.case {
        Case::Bott => {
            let (n_phi, n_theta) = parse_grid(&cfg.grid)?;
            let p = bott_projection(Surface::sphere(n_phi, n_theta)?)?;
            let d = chern_density(&p)?.integral();
            (p, Some(d))
        }
        Case::Torus | Case::Embed => {
            let (b, tube) = torus_chart(cfg)?;
            let d = chern_density(&tube)?;
            let mut supp_h = 0.0;
            for i in 0..d.nu {
                let t = i as f64 / d.nu as f64;
                if b.fall.0 < t && t < b.fall.1 {
                    supp_h += (0..d.nv).map(|j| d.at(i, j)).sum::<f64>();
                }
            }
            flux_on_supp_h = Some(supp_h * d.du * d.dv);
            let field = if cfg.case == Case::Embed { embed_in_surface(&tube, cfg.genus)? } else { tube };
            (field, Some(d.integral()))
        }
    };
    let projection = field.validate()?;
    let plaquette = projection_chern_plaquette(&field)?;
    let value = density_integral.unwrap_or(plaquette);
    let chern = plaquette.round() as i64;
    let residual = (value - chern as f64).abs().max((plaquette - chern as f64).abs());
    let genus = match cfg.case {
        Case::Bott => 0,
        Case::Torus => 1,
        Case::Embed => cfg.genus,
    };
    Ok(ChernCaseReport {
        surface: summary(&field.surface, genus),
        projection,
        density_integral,
        flux_on_supp_h,
        plaquette,
        chern,
        residual,
        tolerance: cfg.tolerance,
    })
}

pub fn run_chern(args: ChernArgs, file: Option<&Path>) -> Result<Status, CliError> {
    let cfg = args.resolve(load(file)?);
    let r = chern_case(&cfg)?;
    let ok = r.residual <= cfg.tolerance;
    eprintln!(
        "{:?} (genus {}): c = {} (density {}, plaquette {:+.6}) : {}",
        cfg.case,
        r.surface.genus,
        r.chern,
        r.density_integral.map_or("n/a".into(), |d| format!("{d:+.6}")),
        r.plaquette,
        if ok { "INTEGRAL" } else { "NOT INTEGRAL" }
    );
    emit("chern", &cfg, &r, cfg.out.as_deref())?;
    Ok(if ok { Status::Pass } else { Status::NumericalFailure })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Sphere,
    Torus,
}

#[derive(Args, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagArgs {
    /// CSV rows `i, j, re_00, im_00, re_01, im_01, …` (row-major entries).
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub domain: Option<Domain>,
    /// Relative spectral gap below which bands count as touching.
    #[arg(long)]
    pub gap: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagConfig {
    pub input: PathBuf,
    pub domain: Domain,
    pub gap: f64,
    pub out: Option<PathBuf>,
}

impl DiagArgs {
    pub fn resolve(self, file: DiagArgs) -> Result<DiagConfig, CliError> {
        Ok(DiagConfig {
            input: self.input.or(file.input).ok_or_else(|| CliError::Input("--input is required".into()))?,
            domain: self.domain.or(file.domain).unwrap_or(Domain::Sphere),
            gap: self.gap.or(file.gap).unwrap_or(GAP_THRESHOLD),
            out: self.out.or(file.out),
        })
    }
}

/// Reads a sampled field; the grid size is inferred from the largest indices.
pub fn read_field(path: &Path, domain: Domain) -> Result<HField, CliError> {
    let bad = |msg: String| CliError::Input(format!("{}: {msg}", path.display()));
    let mut reader = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let mut rows: Vec<(usize, usize, Mat<c64>)> = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let nums: Vec<f64> = rec.iter().map(|f| f.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|e| bad(format!("row {}: {e}", line + 1)))?;
        let entries = nums.len().saturating_sub(2) / 2;
        let n = (entries as f64).sqrt().round() as usize;
        if nums.len() < 4 || n * n != entries || nums.len() != 2 + 2 * entries {
            return Err(bad(format!("row {} has {} columns, expected 2 + 2n²", line + 1, nums.len())));
        }
        if nums[0] < 0.0 || nums[1] < 0.0 || nums[0].fract() != 0.0 || nums[1].fract() != 0.0 {
            return Err(bad(format!("row {}: grid indices must be nonnegative integers", line + 1)));
        }
        let m = Mat::from_fn(n, n, |r, c| c64::new(nums[2 + 2 * (r * n + c)], nums[3 + 2 * (r * n + c)]));
        rows.push((nums[0] as usize, nums[1] as usize, m));
    }
    let n = rows.first().map(|r| r.2.nrows()).ok_or_else(|| bad("no rows".into()))?;
    if rows.iter().any(|r| r.2.nrows() != n) {
        return Err(bad("matrix size changes between rows".into()));
    }
    let ni = rows.iter().map(|r| r.0).max().unwrap_or(0);
    let nj = rows.iter().map(|r| r.1).max().unwrap_or(0) + 1;
    let surface = match domain {
        Domain::Sphere => Surface::sphere(nj, ni)?,
        Domain::Torus => Surface::torus(ni + 1, nj)?,
    };
    let mut values: Vec<Option<Mat<c64>>> = vec![None; surface.vertex_count()];
    for (i, j, m) in rows {
        let slot = &mut values[i * nj + j];
        if slot.is_some() {
            return Err(bad(format!("grid point ({i}, {j}) listed twice")));
        }
        *slot = Some(m);
    }
    let values: Vec<Mat<c64>> = values
        .into_iter()
        .enumerate()
        .map(|(v, m)| m.ok_or_else(|| bad(format!("grid point ({}, {}) missing", v / nj, v % nj))))
        .collect::<Result<_, _>>()?;
    Ok(HField { surface, values })
}

pub fn run_diag(args: DiagArgs, file: Option<&Path>) -> Result<Status, CliError> {
    let cfg = args.resolve(load(file)?)?;
    let field = read_field(&cfg.input, cfg.domain)?;
    let report: ChernReport = diagonalizability_verdict(&field, cfg.gap)?;
    let cherns: Vec<String> = report.bands.iter().map(|b| format!("{:+}", b.chern)).collect();
    eprintln!(
        "band Chern numbers ({}), minimum relative gap {:.3e} : {}",
        cherns.join(", "),
        report.min_relative_gap,
        if report.diagonalizable { "diagonalizable" } else { "not diagonalizable" }
    );
    emit("diag-check", &cfg, &report, cfg.out.as_deref())?;
    let worst = report.bands.iter().map(|b| b.residual).fold(0.0, f64::max);
    Ok(if worst > 1e-3 { Status::NumericalFailure } else { Status::Pass })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Example {
    /// `1 + p` for the Bott projection.
    OnePlusBott,
    /// `U diag(1, 2) U*` with `U = exp(iθσ³)`, `θ = x₁`.
    GlobalFrame,
}

#[derive(Args, Debug)]
pub struct FieldExampleArgs {
    #[arg(long, value_enum)]
    pub kind: Example,
    /// `n_phi × n_theta`.
    #[arg(long, default_value = "200x100")]
    pub grid: String,
    #[arg(long)]
    pub out: PathBuf,
}

/// Sphere fields used by the diagonalizability examples.
pub fn example_field(kind: Example, n_phi: usize, n_theta: usize) -> Result<HField, CliError> {
    let surface = Surface::sphere(n_phi, n_theta)?;
    let values = match kind {
        Example::OnePlusBott => {
            bott_projection(surface.clone())?.values.into_iter().map(|p| p + Mat::<c64>::identity(2, 2)).collect()
        }
        Example::GlobalFrame => (0..surface.vertex_count())
            .map(|v| {
                let (th, ph) = surface.coords(v).expect("sphere vertices have coordinates");
                let angle = th.sin() * ph.cos();
                let u = Mat::from_fn(2, 2, |r, c| match (r, c) {
                    (0, 0) => c64::new(angle.cos(), angle.sin()),
                    (1, 1) => c64::new(angle.cos(), -angle.sin()),
                    _ => c64::new(0.0, 0.0),
                });
                let d = Mat::from_fn(2, 2, |r, c| c64::new(if r == c { 1.0 + r as f64 } else { 0.0 }, 0.0));
                &u * d * u.adjoint()
            })
            .collect(),
    };
    Ok(HField { surface, values })
}

pub fn write_field(path: &Path, field: &HField) -> Result<(), CliError> {
    let Surface::Sphere { n_phi, .. } = field.surface else {
        return Err(CliError::Input("only sphere fields are written".into()));
    };
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let n = field.values.first().map_or(0, |m| m.nrows());
    let mut header = vec!["i".to_string(), "j".to_string()];
    for r in 0..n {
        for c in 0..n {
            header.push(format!("re_{r}{c}"));
            header.push(format!("im_{r}{c}"));
        }
    }
    let io = |e: csv::Error| CliError::Input(format!("{}: {e}", path.display()));
    w.write_record(&header).map_err(io)?;
    for (v, m) in field.values.iter().enumerate() {
        let mut rec = vec![(v / n_phi).to_string(), (v % n_phi).to_string()];
        for r in 0..n {
            for c in 0..n {
                rec.push(format!("{:e}", m[(r, c)].re));
                rec.push(format!("{:e}", m[(r, c)].im));
            }
        }
        w.write_record(&rec).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn run_field_example(args: FieldExampleArgs) -> Result<Status, CliError> {
    let (n_phi, n_theta) = parse_grid(&args.grid)?;
    write_field(&args.out, &example_field(args.kind, n_phi, n_theta)?)?;
    Ok(Status::Pass)
}
