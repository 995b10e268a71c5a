use std::collections::HashMap;
use std::f64::consts::PI;

use faer::{c64, Mat};
use matconf_core::specfun::SpectralFunction;
use matconf_core::symcalc::{build_a_symbols, build_b_symbols, split_by_a_degree, Dir, Generator, SymbolPoly};
use matconf_core::xi_integrate::{
    curvature_density, prepare, sample_grid, trace_integral, CurvatureDensity, DensityPart, PointData, Slot,
};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

/// `π ∫₀^∞ u^k Π (1 + λ_j⁴ u)^{−m_j} du` by the trapezoid rule in `u = e^w`.
fn direct_radial(k: u32, factors: &[(f64, u32)]) -> f64 {
    let (lo, hi, step) = (-60.0, 60.0, 0.04);
    let n = ((hi - lo) / step) as usize;
    let mut acc = 0.0;
    for i in 0..=n {
        let w: f64 = lo + step * i as f64;
        let u = w.exp();
        let mut v = u.powi(k as i32 + 1);
        for &(l, m) in factors {
            v /= (1.0 + l.powi(4) * u).powi(m as i32);
        }
        acc += if i == 0 || i == n { 0.5 * v } else { v };
    }
    PI * acc * step
}

/// Entrywise density of a prepared part, summed monomial by monomial.
fn direct_density(part: &SymbolPoly, p: &PointData) -> Mat<c64> {
    let n = p.n();
    let mut out = Mat::<c64>::zeros(n, n);
    let mut cache: HashMap<(u32, Vec<(usize, u32)>), f64> = HashMap::new();
    for (basis, coeff) in part.iter() {
        assert_eq!(basis.mu, 0);
        let c = coeff.to_f64().unwrap();
        let seps = basis.word.iter().filter(|g| !g.is_commuting()).count();
        let mut idx = vec![0usize; seps + 1];
        loop {
            let (a, b) = (idx[0], idx[seps]);
            if seps > 0 || a == b {
                let mut seg = 0;
                let mut value = c64::new(c, 0.0);
                let mut b0: Vec<(usize, u32)> = Vec::new();
                for g in &basis.word {
                    let i = idx[seg];
                    match *g {
                        Generator::B0Pow(m) => b0.push((i, m)),
                        Generator::HPow(h) => value *= p.lambda[i].powi(h),
                        Generator::DeltaH(d) => value *= p.delta_h[d.index()][i],
                        Generator::HessH(d, e) => value *= p.hess_h[d.index()][e.index()][i],
                        Generator::LapH => value *= p.hess_h[0][0][i] + p.hess_h[1][1][i],
                        Generator::A(d) => {
                            value *= p.a[d.index()][(i, idx[seg + 1])];
                            seg += 1;
                        }
                        Generator::DeltaA(d, e) => {
                            value *= p.delta_a[d.index()][e.index()][(i, idx[seg + 1])];
                            seg += 1;
                        }
                    }
                }
                b0.sort();
                let k = basis.xi.sq;
                let radial = *cache.entry((k, b0.clone())).or_insert_with(|| {
                    let f: Vec<(f64, u32)> = b0.iter().map(|&(i, m)| (p.lambda[i], m)).collect();
                    direct_radial(k, &f)
                });
                out[(a, b)] += value * radial;
            }
            if !advance(&mut idx, n) {
                break;
            }
        }
    }
    out
}

/// Odometer step over `{0..n}^len`; false after the last tuple.
fn advance(idx: &mut [usize], n: usize) -> bool {
    for v in idx.iter_mut() {
        *v += 1;
        if *v < n {
            return true;
        }
        *v = 0;
    }
    false
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> Mat<c64> {
    Mat::from_fn(n, n, |_, _| c64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> PointData {
    let vec = |rng: &mut ChaCha8Rng| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<f64>>();
    let lambda = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
    let grad = [vec(rng), vec(rng)];
    let h01 = vec(rng);
    let hessian = [[vec(rng), h01.clone()], [h01, vec(rng)]];
    let a = [random_matrix(rng, n), random_matrix(rng, n)];
    let grad_a = [[random_matrix(rng, n), random_matrix(rng, n)], [random_matrix(rng, n), random_matrix(rng, n)]];
    PointData::from_partials(lambda, grad, hessian, a, grad_a)
}

fn max_abs(m: &Mat<c64>) -> f64 {
    let mut out = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            out = out.max(m[(i, j)].norm());
        }
    }
    out
}

fn trace(m: &Mat<c64>) -> c64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

#[test]
fn pure_h_density_is_a_total_derivative() {
    let d = curvature_density().unwrap();
    let h1 = [Generator::HPow(-2), Generator::DeltaH(Dir::One), Generator::DeltaH(Dir::One)];
    let h2 = [Generator::HPow(-2), Generator::DeltaH(Dir::Two), Generator::DeltaH(Dir::Two)];
    let lap = [Generator::HPow(-1), Generator::LapH];
    let coeff = |w: &[Generator]| {
        d.pure_h.iter().find(|(b, _)| b.word == w).map(|(_, c)| c.clone()).unwrap()
    };
    assert_eq!(d.pure_h.len(), 3);
    assert_eq!(coeff(&h1), rat(-1, 3));
    assert_eq!(coeff(&h2), rat(-1, 3));
    assert_eq!(coeff(&lap), rat(1, 3));
}

#[test]
fn sandwich_descriptors() {
    let d = curvature_density().unwrap();
    assert_eq!(d.sandwich.len(), 8);
    for t in &d.sandwich {
        let (coeff, alpha, beta, f) = match t.part() {
            DensityPart::LinearRight => (rat(2, 1), -1, 0, SpectralFunction::G),
            DensityPart::LinearLeft => (rat(-2, 1), -2, 1, SpectralFunction::G),
            DensityPart::Derivative => (rat(1, 1), -1, 1, SpectralFunction::FDelta),
            DensityPart::Quadratic => (rat(-1, 1), -1, 1, SpectralFunction::Q),
            DensityPart::PureH => unreachable!(),
        };
        assert_eq!((t.coeff.clone(), t.left_power, t.right_power, t.function), (coeff, alpha, beta, f), "{t:?}");
        match t.slot {
            Slot::A(i) => assert_eq!(t.left_mult.or(t.right_mult), Some(i)),
            Slot::DeltaA(i, j) | Slot::AA(i, j) => assert_eq!(i, j),
        }
    }
}

#[test]
fn closed_form_matches_direct_quadrature() {
    let density = curvature_density().unwrap();
    let b = build_b_symbols(&build_a_symbols(true)).unwrap();
    let split = split_by_a_degree(&b.b2).unwrap();
    let parts = [
        (DensityPart::PureH, prepare(&split.deg0)),
        (DensityPart::Derivative, prepare(&split.lin_da)),
        (DensityPart::Quadratic, prepare(&split.quad_a)),
    ];
    let lin = prepare(&split.lin_a);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..6 {
        let p = random_point(&mut rng, 2 + case % 2);
        for (part, poly) in &parts {
            let closed = density.evaluate_part(*part, &p).unwrap();
            let direct = direct_density(poly, &p);
            let err = max_abs(&(&closed - &direct)) / max_abs(&direct);
            assert!(err < 1e-8, "{part:?} case {case}: {err:e}");
        }
        let closed = &density.evaluate_part(DensityPart::LinearLeft, &p).unwrap()
            + &density.evaluate_part(DensityPart::LinearRight, &p).unwrap();
        let direct = direct_density(&lin, &p);
        let err = max_abs(&(&closed - &direct)) / max_abs(&direct);
        assert!(err < 1e-8, "linear case {case}: {err:e}");
    }
}

#[test]
fn traces_of_a_dependent_parts_vanish() {
    let density = curvature_density().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..20 {
        let p = random_point(&mut rng, 2 + case % 3);
        let lin = &density.evaluate_part(DensityPart::LinearLeft, &p).unwrap()
            + &density.evaluate_part(DensityPart::LinearRight, &p).unwrap();
        let der = density.evaluate_part(DensityPart::Derivative, &p).unwrap();
        let quad = density.evaluate_part(DensityPart::Quadratic, &p).unwrap();
        for (name, m) in [("linear", lin), ("derivative", der), ("quadratic", quad)] {
            assert!(trace(&m).norm() < 1e-10 * max_abs(&m).max(1.0), "{name} case {case}");
        }
    }
}

/// Diagonal `H = diag(e^{φ_a})` and trigonometric `A_i` on the unit torus.
fn smooth_point(x: f64, y: f64) -> PointData {
    let tau = 2.0 * PI;
    let phi = [
        (0.3 * (tau * x).cos() + 0.1 * (tau * y).sin(), [-0.3 * tau * (tau * x).sin(), 0.1 * tau * (tau * y).cos()]),
        (0.2 * (tau * (x + y)).sin(), [0.2 * tau * (tau * (x + y)).cos(), 0.2 * tau * (tau * (x + y)).cos()]),
    ];
    let hess_phi = [
        [[-0.3 * tau * tau * (tau * x).cos(), 0.0], [0.0, -0.1 * tau * tau * (tau * y).sin()]],
        [[-0.2 * tau * tau * (tau * (x + y)).sin(); 2]; 2],
    ];
    let lambda: Vec<f64> = phi.iter().map(|(f, _)| f.exp()).collect();
    let grad = [0, 1].map(|i| (0..2).map(|a| lambda[a] * phi[a].1[i]).collect::<Vec<_>>());
    let hessian = [0, 1].map(|i| {
        [0, 1].map(|j| (0..2).map(|a| lambda[a] * (hess_phi[a][i][j] + phi[a].1[i] * phi[a].1[j])).collect::<Vec<_>>())
    });
    let (c1, s1) = ((tau * x).cos(), (tau * x).sin());
    let (c2, s2) = ((tau * y).cos(), (tau * y).sin());
    let a1 = Mat::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => c64::new(0.0, 0.4 * c2),
        (1, 1) => c64::new(0.0, -0.2 * s1),
        (0, 1) => c64::new(0.3 * s2, 0.1 * c1),
        _ => c64::new(-0.3 * s2, 0.1 * c1),
    });
    let a2 = Mat::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => c64::new(0.0, 0.5 * s1),
        (1, 1) => c64::new(0.0, 0.1 * c2),
        (0, 1) => c64::new(0.2 * c1, -0.25 * s2),
        _ => c64::new(-0.2 * c1, -0.25 * s2),
    });
    let da1 = [
        Mat::from_fn(2, 2, |i, j| match (i, j) {
            (1, 1) => c64::new(0.0, -0.2 * tau * c1),
            (0, 1) | (1, 0) => c64::new(0.0, -0.1 * tau * s1),
            _ => c64::new(0.0, 0.0),
        }),
        Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => c64::new(0.0, -0.4 * tau * s2),
            (0, 1) => c64::new(0.3 * tau * c2, 0.0),
            (1, 0) => c64::new(-0.3 * tau * c2, 0.0),
            _ => c64::new(0.0, 0.0),
        }),
    ];
    let da2 = [
        Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => c64::new(0.0, 0.5 * tau * c1),
            (0, 1) => c64::new(-0.2 * tau * s1, 0.0),
            (1, 0) => c64::new(0.2 * tau * s1, 0.0),
            _ => c64::new(0.0, 0.0),
        }),
        Mat::from_fn(2, 2, |i, j| match (i, j) {
            (1, 1) => c64::new(0.0, -0.1 * tau * s2),
            (0, 1) | (1, 0) => c64::new(0.0, -0.25 * tau * c2),
            _ => c64::new(0.0, 0.0),
        }),
    ];
    PointData::from_partials(lambda, grad, hessian, [a1, a2], [da1, da2])
}

#[test]
fn smooth_point_derivatives_are_consistent() {
    // central differences of λ and A against the analytic partials
    let eps = 1e-5;
    let (x, y) = (0.31, 0.77);
    let p = smooth_point(x, y);
    let px = smooth_point(x + eps, y);
    let mx = smooth_point(x - eps, y);
    let py = smooth_point(x, y + eps);
    let my = smooth_point(x, y - eps);
    let scale = c64::new(0.0, -1.0 / (2.0 * eps));
    for (j, (plus, minus)) in [(&px, &mx), (&py, &my)].into_iter().enumerate() {
        for a in 0..2 {
            let fd = (plus.lambda[a] - minus.lambda[a]) * scale;
            assert!((fd - p.delta_h[j][a]).norm() < 1e-6);
            for i in 0..2 {
                let fd = (plus.delta_h[i][a] - minus.delta_h[i][a]) * scale;
                assert!((fd - p.hess_h[i][j][a]).norm() < 1e-5);
            }
        }
        for i in 0..2 {
            let fd = (&plus.a[i] - &minus.a[i]) * faer::Scale(scale);
            assert!(max_abs(&(&fd - &p.delta_a[i][j])) < 1e-6, "A{i} along {j}");
        }
    }
}

#[test]
fn trace_integral_vanishes_on_the_torus() {
    let density = curvature_density().unwrap();
    let samples = sample_grid(&density, 256, smooth_point).unwrap();
    let total = trace_integral(&samples);
    let scale = samples.iter().map(|s| trace(&s.density).norm()).fold(0.0, f64::max);
    assert!(scale > 1e-2);
    assert!(total.norm() < 1e-10 * scale, "{total}");
}

#[test]
fn flipped_laplacian_sign_is_not_a_total_derivative() {
    let mut density = curvature_density().unwrap();
    let lap: Vec<_> =
        density.pure_h.iter().filter(|(b, _)| b.word.contains(&Generator::LapH)).map(|(b, c)| (b.clone(), c.clone())).collect();
    for (b, c) in lap {
        density.pure_h.add_term(-(c.clone() + c), b);
    }
    let flipped = CurvatureDensity { sandwich: Vec::new(), ..density };
    let total = trace_integral(&sample_grid(&flipped, 64, smooth_point).unwrap());
    assert!(total.norm() > 1e-2, "{total}");
}
