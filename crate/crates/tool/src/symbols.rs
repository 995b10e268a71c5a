//! `symbols-verify`: the exact symbolic pipeline end to end.

use std::path::{Path, PathBuf};

use clap::Args;
use faer::{c64, Mat};
use matconf_core::symcalc::{
    build_a_symbols, build_b_symbols, parametrix_residue, resolved_operator, split_by_a_degree, term_census, ASymbols,
    BSymbols, Basis, Dir, Generator, SymbolPoly, TermCount,
};
use matconf_core::xi_integrate::{
    integrate_pure_h, integrate_sandwich, prepare, total_derivative_coefficient, verify_displays, CurvatureDensity,
    DensityPart, DisplayCheck, DisplayStatus, PointData, RecomputedDisplays,
};
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{emit, load};
use crate::{CliError, Status};

/// Lowest ξ-order at which the parametrix identity is enforced.
const PARAMETRIX_CUTOFF: i64 = -2;
const TRACE_TOL: f64 = 1e-10;

#[derive(Args, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SymbolsArgs {
    /// Random points for the trace-cancellation spot check.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also fail on the `a0` display and the reference curvature coefficients.
    #[arg(long, num_args = 0, default_missing_value = "true")]
    pub strict: Option<bool>,
    /// Test mode: add 1 to term `k` of a computed symbol, e.g. `b2:17`.
    #[arg(long, hide = true)]
    pub perturb: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymbolsConfig {
    pub samples: usize,
    pub seed: u64,
    pub strict: bool,
    pub perturb: Option<String>,
    pub out: Option<PathBuf>,
}

impl SymbolsArgs {
    pub fn resolve(self, file: SymbolsArgs) -> SymbolsConfig {
        SymbolsConfig {
            samples: self.samples.or(file.samples).unwrap_or(100),
            seed: self.seed.or(file.seed).unwrap_or(1),
            strict: self.strict.or(file.strict).unwrap_or(false),
            perturb: self.perturb.or(file.perturb),
            out: self.out.or(file.out),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ParametrixCheck {
    pub with_a: bool,
    pub cutoff: i64,
    pub residue_terms: usize,
    pub residue_orders: Vec<TermCount>,
    pub status: DisplayStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct CurvatureCheck {
    /// Coefficients of `π H⁻² δ_iH δ_iH` and `π H⁻¹ ΔH`.
    pub computed: [String; 2],
    pub reference: [String; 2],
    /// `c` with pure-H part `= c π δ_i(H⁻¹ δ_i H)`, when it is a total derivative.
    pub total_derivative: Option<String>,
    pub latex: String,
    pub status: DisplayStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceCheck {
    pub samples: usize,
    pub seed: u64,
    pub max_linear: f64,
    pub max_derivative: f64,
    pub max_quadratic: f64,
    pub tolerance: f64,
    pub status: DisplayStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymbolsReport {
    pub parametrix: Vec<ParametrixCheck>,
    pub displays: Vec<DisplayCheck>,
    pub curvature: Option<CurvatureCheck>,
    /// Absent when the ξ-integration itself failed.
    pub traces: Option<TraceCheck>,
    /// Items that set a nonzero exit code.
    pub failures: Vec<String>,
    /// Mismatches reported but not gating unless `strict`.
    pub discrepancies: Vec<String>,
}

fn status(ok: bool) -> DisplayStatus {
    if ok {
        DisplayStatus::Match
    } else {
        DisplayStatus::Mismatch
    }
}

fn perturb(a: &mut ASymbols, b: &mut BSymbols, token: &str) -> Result<(), CliError> {
    let bad = || CliError::Input(format!("perturbation {token:?} is not of the form a0|a1|a2|b0|b1|b2:k"));
    let (name, k) = token.split_once(':').ok_or_else(bad)?;
    let k: usize = k.parse().map_err(|_| bad())?;
    let poly = match name {
        "a0" => &mut a.a0,
        "a1" => &mut a.a1,
        "a2" => &mut a.a2,
        "b0" => &mut b.b0,
        "b1" => &mut b.b1,
        "b2" => &mut b.b2,
        _ => return Err(bad()),
    };
    let basis = perturb_basis(poly, k).ok_or_else(|| CliError::Input(format!("{name} has only {} terms", poly.len())))?;
    poly.add_term(BigRational::one(), basis);
    Ok(())
}

/// Basis of the `k`-th term, in the polynomial's own order.
pub fn perturb_basis(poly: &SymbolPoly, k: usize) -> Option<Basis> {
    poly.iter().nth(k).map(|(b, _)| b.clone())
}

fn parametrix(a: &ASymbols, b: &BSymbols, with_a: bool) -> Result<ParametrixCheck, CliError> {
    let r = parametrix_residue(&resolved_operator(a), &b.total(), PARAMETRIX_CUTOFF)?;
    Ok(ParametrixCheck {
        with_a,
        cutoff: PARAMETRIX_CUTOFF,
        residue_terms: r.len(),
        residue_orders: term_census(&r),
        status: status(r.is_zero()),
    })
}

fn curvature_check(pure_h: &SymbolPoly) -> CurvatureCheck {
    let word = |w: Vec<Generator>| Basis::from_word(w);
    let grad = |d: Dir| word(vec![Generator::HPow(-2), Generator::DeltaH(d), Generator::DeltaH(d)]);
    let lap = word(vec![Generator::HPow(-1), Generator::LapH]);
    let third = BigRational::new((-1).into(), 3.into());
    let mut reference = SymbolPoly::zero();
    for b in [grad(Dir::One), grad(Dir::Two), lap.clone()] {
        reference.add_term(third.clone(), b);
    }
    let fmt = matconf_core::symcalc::format_rational;
    CurvatureCheck {
        computed: [fmt(&pure_h.coefficient(&grad(Dir::One))), fmt(&pure_h.coefficient(&lap))],
        reference: [fmt(&third), fmt(&third)],
        total_derivative: total_derivative_coefficient(pure_h).map(|c| fmt(&c)),
        latex: pure_h.to_latex(),
        status: status(*pure_h == reference),
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> Mat<c64> {
    Mat::from_fn(n, n, |_, _| c64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// Random eigenvalues in `[0.5, 2]`, derivatives and non-Hermitian `A` entries in `[−1, 1]`.
pub fn random_point(rng: &mut ChaCha8Rng, n: usize) -> PointData {
    let vec = |rng: &mut ChaCha8Rng| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<f64>>();
    let lambda = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
    let grad = [vec(rng), vec(rng)];
    let h01 = vec(rng);
    let hessian = [[vec(rng), h01.clone()], [h01, vec(rng)]];
    let a = [random_matrix(rng, n), random_matrix(rng, n)];
    let grad_a = [[random_matrix(rng, n), random_matrix(rng, n)], [random_matrix(rng, n), random_matrix(rng, n)]];
    PointData::from_partials(lambda, grad, hessian, a, grad_a)
}

fn relative_trace(m: &Mat<c64>) -> f64 {
    let tr: c64 = (0..m.nrows()).map(|i| m[(i, i)]).sum();
    let mut scale = 1.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            scale = scale.max(m[(i, j)].norm());
        }
    }
    tr.norm() / scale
}

fn trace_check(density: &CurvatureDensity, samples: usize, seed: u64) -> Result<TraceCheck, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max = [0.0f64; 3];
    for case in 0..samples {
        let p = random_point(&mut rng, 2 + case % 3);
        let lin = &density.evaluate_part(DensityPart::LinearLeft, &p)? + &density.evaluate_part(DensityPart::LinearRight, &p)?;
        let der = density.evaluate_part(DensityPart::Derivative, &p)?;
        let quad = density.evaluate_part(DensityPart::Quadratic, &p)?;
        for (slot, m) in max.iter_mut().zip([lin, der, quad]) {
            *slot = slot.max(relative_trace(&m));
        }
    }
    Ok(TraceCheck {
        samples,
        seed,
        max_linear: max[0],
        max_derivative: max[1],
        max_quadratic: max[2],
        tolerance: TRACE_TOL,
        status: status(max.iter().all(|m| *m <= TRACE_TOL)),
    })
}

/// Runs every check; `cfg.perturb` injects a coefficient error first.
pub fn verify(cfg: &SymbolsConfig) -> Result<SymbolsReport, CliError> {
    let mut a_free = build_a_symbols(false);
    let mut a = build_a_symbols(true);
    let mut b_free = build_b_symbols(&a_free)?;
    let mut b = build_b_symbols(&a)?;
    if let Some(token) = &cfg.perturb {
        perturb(&mut a_free, &mut b_free, token)?;
        perturb(&mut a, &mut b, token)?;
    }
    let parametrix = vec![parametrix(&a_free, &b_free, false)?, parametrix(&a, &b, true)?];

    let split = split_by_a_degree(&b.b2)?;
    let recomputed = RecomputedDisplays {
        a1: a.a1.clone(),
        a0: a.a0.clone(),
        deg0: prepare(&split.deg0),
        lin_a: prepare(&split.lin_a),
        lin_da: prepare(&split.lin_da),
        quad_a: prepare(&split.quad_a),
    };
    let displays = verify_displays(&recomputed)?;

    let mut failures = Vec::new();
    let mut discrepancies = Vec::new();
    for p in &parametrix {
        if p.status == DisplayStatus::Mismatch {
            failures.push(format!("parametrix identity (with_a = {}): {} residual terms", p.with_a, p.residue_terms));
        }
    }
    for d in &displays {
        if d.status == DisplayStatus::Mismatch {
            let line = format!("display {}: {}/{} terms matched", d.name, d.matched_terms, d.printed_terms);
            if d.name == "a0" && !cfg.strict {
                discrepancies.push(line);
            } else {
                failures.push(line);
            }
        }
    }

    let integrated = integrate_pure_h(&recomputed.deg0).and_then(|pure_h| {
        let mut sandwich = Vec::new();
        for part in [&recomputed.lin_a, &recomputed.lin_da, &recomputed.quad_a] {
            sandwich.extend(integrate_sandwich(part)?);
        }
        Ok(CurvatureDensity { pure_h, sandwich })
    });
    let (curvature, traces) = match integrated {
        Ok(density) => (Some(curvature_check(&density.pure_h)), Some(trace_check(&density, cfg.samples, cfg.seed)?)),
        Err(e) => {
            failures.push(format!("ξ-integration: {e}"));
            (None, None)
        }
    };
    if let Some(c) = &curvature {
        if c.total_derivative.is_none() {
            failures.push("pure-H curvature is not a total derivative".into());
        }
        if c.status == DisplayStatus::Mismatch {
            let line = format!("curvature coefficients {:?} against reference {:?}", c.computed, c.reference);
            if cfg.strict {
                failures.push(line);
            } else {
                discrepancies.push(line);
            }
        }
    }
    if let Some(t) = traces.as_ref().filter(|t| t.status == DisplayStatus::Mismatch) {
        failures.push(format!(
            "trace cancellation: max |Tr| = {:.3e}, {:.3e}, {:.3e}",
            t.max_linear, t.max_derivative, t.max_quadratic
        ));
    }
    Ok(SymbolsReport { parametrix, displays, curvature, traces, failures, discrepancies })
}

fn label(s: DisplayStatus) -> &'static str {
    match s {
        DisplayStatus::Match => "MATCH",
        DisplayStatus::Mismatch => "MISMATCH",
    }
}

fn pi_coefficient(c: &str) -> String {
    match c.strip_prefix('-') {
        Some(r) => format!("−π·{r}"),
        None => format!("+π·{c}"),
    }
}

pub fn summary_lines(r: &SymbolsReport) -> Vec<String> {
    let mut out = Vec::new();
    for p in &r.parametrix {
        let which = if p.with_a { "with A" } else { "without A" };
        out.push(format!("parametrix identity {which}, orders ≥ {}: {} residual terms : {}", p.cutoff, p.residue_terms, label(p.status)));
    }
    for d in &r.displays {
        out.push(format!("{} display: {}/{} terms matched : {}", d.name, d.matched_terms, d.printed_terms, label(d.status)));
    }
    if let Some(c) = &r.curvature {
        out.push(format!(
            "curvature coefficients (H⁻²δHδH, H⁻¹ΔH): {}, {} against reference {}, {} : {}",
            pi_coefficient(&c.computed[0]),
            pi_coefficient(&c.computed[1]),
            pi_coefficient(&c.reference[0]),
            pi_coefficient(&c.reference[1]),
            label(c.status)
        ));
        match &c.total_derivative {
            Some(k) => out.push(format!("pure-H curvature = {} δ_i(H⁻¹δ_iH) : total derivative", pi_coefficient(k))),
            None => out.push("pure-H curvature is not a total derivative".into()),
        }
    }
    if let Some(t) = &r.traces {
        out.push(format!(
            "trace cancellation over {} points: {:.1e}, {:.1e}, {:.1e} : {}",
            t.samples,
            t.max_linear,
            t.max_derivative,
            t.max_quadratic,
            label(t.status)
        ));
    }
    for f in &r.failures {
        out.push(format!("FAILED: {f}"));
    }
    out
}

pub fn run(args: SymbolsArgs, file: Option<&Path>) -> Result<Status, CliError> {
    let cfg = args.resolve(load(file)?);
    let report = verify(&cfg)?;
    for line in summary_lines(&report) {
        eprintln!("{line}");
    }
    emit("symbols-verify", &cfg, &report, cfg.out.as_deref())?;
    Ok(if report.failures.is_empty() { Status::Pass } else { Status::VerificationFailure })
}
