//! `ζ_{D_h}(0)` against `ζ_D(0)` over a cutoff sweep.

use std::time::Instant;

use serde::Serialize;

use crate::heat::{fit_spectrum, FitOptions, HeatTraceFit, TWindow};
use crate::operator::{dimension, dirac_spectrum, Guard};
use crate::profiles::ProfileFields;
use crate::NumericsError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Extrapolation {
    /// Aitken Δ² on the last three equally spaced cutoffs.
    Aitken,
    /// Fallback: the value at the largest cutoff.
    Last,
}

#[derive(Clone, Debug, Serialize)]
pub struct Extrapolated {
    pub value: f64,
    pub method: Extrapolation,
    /// Half-width: the last bracket plus the extrapolation step.
    pub half_width: f64,
}

/// Limit of a sequence sampled at equally spaced cutoffs, assuming geometric convergence.
pub fn extrapolate(cutoffs: &[usize], values: &[f64], half_width_last: f64) -> Extrapolated {
    let last = *values.last().expect("nonempty sweep");
    let fallback = Extrapolated { value: last, method: Extrapolation::Last, half_width: half_width_last };
    let k = values.len();
    if k < 3 || cutoffs[k - 1] - cutoffs[k - 2] != cutoffs[k - 2] - cutoffs[k - 3] {
        return fallback;
    }
    let d1 = values[k - 2] - values[k - 3];
    let d2 = values[k - 1] - values[k - 2];
    let denom = d2 - d1;
    if denom.abs() <= 1e-12 * d1.abs().max(d2.abs()) || d1 == 0.0 || (d2 / d1).abs() >= 1.0 {
        return fallback;
    }
    let value = last - d2 * d2 / denom;
    Extrapolated { value, method: Extrapolation::Aitken, half_width: half_width_last + (value - last).abs() }
}

#[derive(Clone, Debug, Serialize)]
pub struct GbRow {
    #[serde(rename = "N")]
    pub cutoff: usize,
    pub dim: usize,
    pub zeta0_d: f64,
    pub zeta0_dh: f64,
    pub bracket: (f64, f64),
    pub kernel_dim: f64,
    pub gray_zone: usize,
    pub rel_residual: f64,
    pub compression_tail: f64,
    pub runtime: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GbReport {
    pub profile: String,
    pub n: usize,
    pub window: TWindow,
    pub fit: FitOptions,
    pub rows: Vec<GbRow>,
    pub extrapolated_d: Extrapolated,
    pub extrapolated_dh: Extrapolated,
    pub difference: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Kernel of every rescaled truncation has dimension `2n`.
    pub kernel_stable: bool,
    /// `|ζ(N) − ζ(N_max)|` decreases along the sweep.
    pub monotone: bool,
}

pub struct GbOptions {
    pub cutoffs: Vec<usize>,
    pub guard: Guard,
    pub window: TWindow,
    pub fit: FitOptions,
    pub tolerance: f64,
}

impl GbOptions {
    pub fn new(cutoffs: Vec<usize>) -> GbOptions {
        let n_ref = cutoffs.iter().copied().max().unwrap_or(1);
        GbOptions { cutoffs, guard: Guard::Auto, window: TWindow::for_cutoff(n_ref), fit: FitOptions::default(), tolerance: 0.05 }
    }
}

/// Per-cutoff fits for `D` and the profile's operator, with extrapolated limits.
pub fn gauss_bonnet_report(
    name: &str,
    fields: &ProfileFields,
    opts: &GbOptions,
    mut progress: impl FnMut(&GbRow, &HeatTraceFit),
) -> Result<GbReport, NumericsError> {
    if opts.cutoffs.is_empty() {
        return Err(NumericsError::Input("empty cutoff list".into()));
    }
    let n = fields.n;
    let mut rows = Vec::new();
    let mut fits_d: Vec<HeatTraceFit> = Vec::new();
    let mut fits_dh: Vec<HeatTraceFit> = Vec::new();
    for &cutoff in &opts.cutoffs {
        let start = Instant::now();
        let fd = fit_spectrum(&dirac_spectrum(cutoff, n), &opts.window, &opts.fit)?;
        let op = fields.operator(cutoff, opts.guard)?;
        let fdh = fit_spectrum(&op.eigenvalues()?, &opts.window, &opts.fit)?;
        let row = GbRow {
            cutoff,
            dim: dimension(cutoff, n),
            zeta0_d: fd.zeta0,
            zeta0_dh: fdh.zeta0,
            bracket: fdh.bracket,
            kernel_dim: fdh.kernel_dim,
            gray_zone: fdh.gray_zone,
            rel_residual: fdh.rel_residual,
            compression_tail: op.compression.as_ref().map_or(0.0, |c| c.tail),
            runtime: start.elapsed().as_secs_f64(),
        };
        progress(&row, &fdh);
        rows.push(row);
        fits_d.push(fd);
        fits_dh.push(fdh);
    }
    let vd: Vec<f64> = fits_d.iter().map(|f| f.zeta0).collect();
    let vdh: Vec<f64> = fits_dh.iter().map(|f| f.zeta0).collect();
    let extrapolated_d = extrapolate(&opts.cutoffs, &vd, fits_d.last().unwrap().half_width());
    let extrapolated_dh = extrapolate(&opts.cutoffs, &vdh, fits_dh.last().unwrap().half_width());
    let difference = extrapolated_dh.value - extrapolated_d.value;
    let last = *vdh.last().unwrap();
    let gaps: Vec<f64> = vdh.iter().map(|v| (v - last).abs()).collect();
    Ok(GbReport {
        profile: name.to_string(),
        n,
        window: opts.window,
        fit: opts.fit,
        kernel_stable: rows.iter().all(|r| r.kernel_dim == (2 * n) as f64 && r.gray_zone == 0),
        monotone: gaps.windows(2).all(|w| w[1] <= w[0]),
        rows,
        extrapolated_d,
        extrapolated_dh,
        difference,
        tolerance: opts.tolerance,
        pass: difference.abs() <= opts.tolerance,
    })
}
