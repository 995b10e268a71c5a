//! Scalar evaluation of `G`, `F`, `F_δ` and `Q`.
//!
//! One-variable functions are written in `y = ½ ln s`, where they become
//! ratios of hyperbolic functions; near `s = 1` a Taylor polynomial in `y`
//! replaces the removable singularity. `Q` is evaluated through divided
//! differences of `ln`, which are smooth across `s = 1`, `t = 1`, `s = t`.

use super::SpecFunError;

/// Switch to the series branch when `|s − 1|` (or a point spread) is below this.
pub const SERIES_RADIUS: f64 = 1e-3;

fn check(name: &'static str, s: f64) -> Result<f64, SpecFunError> {
    if s.is_finite() && s > 0.0 {
        Ok(s)
    } else {
        Err(SpecFunError::Domain { name, arg: s })
    }
}

fn half_log(s: f64) -> f64 {
    0.5 * (s - 1.0).ln_1p()
}

/// `y cosh y − sinh y`, by series when cancellation would hurt.
fn y_cosh_minus_sinh(y: f64) -> f64 {
    if y.abs() > 0.5 {
        return y * y.cosh() - y.sinh();
    }
    // Σ 2n y^{2n+1} / (2n+1)!
    let y2 = y * y;
    let mut term = y * y2 / 6.0; // y³/3!
    let mut sum = 0.0;
    for n in 1..20u32 {
        let contrib = 2.0 * f64::from(n) * term;
        sum += contrib;
        if contrib.abs() < 1e-18 * sum.abs() {
            break;
        }
        let k = f64::from(2 * n + 2);
        term *= y2 / (k * (k + 1.0));
    }
    sum
}

/// `sinh y − y`, by series when cancellation would hurt.
fn sinh_minus_y(y: f64) -> f64 {
    if y.abs() > 0.5 {
        return y.sinh() - y;
    }
    let y2 = y * y;
    let mut term = y * y2 / 6.0;
    let mut sum = 0.0;
    for n in 1..20u32 {
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        let k = f64::from(2 * n + 2);
        term *= y2 / (k * (k + 1.0));
    }
    sum
}

fn poly(y2: f64, coeffs: &[f64]) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * y2 + c)
}

/// `G(s) = (1+√s)√s ((s+1) ln s − 2(s−1)) / (s−1)³`.
pub fn eval_g(s: f64) -> Result<f64, SpecFunError> {
    let s = check("G", s)?;
    let y = half_log(s);
    let r = if (s - 1.0).abs() < SERIES_RADIUS {
        poly(y * y, &[1.0 / 3.0, -2.0 / 15.0, 2.0 / 63.0, -4.0 / 675.0])
    } else {
        y_cosh_minus_sinh(y) / y.sinh().powi(3)
    };
    Ok(0.5 * (1.0 + (-y).exp()) * r)
}

/// `F(s) = Q(s, 1) = √s ((s+1) ln s − 2(s−1)) / (s−1)²`; odd under `s ↦ 1/s`.
pub fn eval_f(s: f64) -> Result<f64, SpecFunError> {
    let s = check("F", s)?;
    let y = half_log(s);
    if (s - 1.0).abs() < SERIES_RADIUS {
        return Ok(y * poly(y * y, &[1.0 / 3.0, -7.0 / 90.0, 31.0 / 2520.0, -127.0 / 75600.0]));
    }
    Ok(y_cosh_minus_sinh(y) / y.sinh().powi(2))
}

/// `((s+1) ln s − 2(s−1)) / (s−1)²`, i.e. `F(s)/√s`. Kept for comparison
/// with the form that omits the `√s` weight; it satisfies `f(1/s) = −s f(s)`.
pub fn eval_f_unweighted(s: f64) -> Result<f64, SpecFunError> {
    let s = check("F", s)?;
    Ok(eval_f(s)? / s.sqrt())
}

/// `F_δ(s) = −(1+√s)√s ln s / (s−1)² + (1+√s)/(s−1)`, the δA-term function.
pub fn eval_f_delta(s: f64) -> Result<f64, SpecFunError> {
    let s = check("F_delta", s)?;
    let y = half_log(s);
    let r = if (s - 1.0).abs() < SERIES_RADIUS {
        y * poly(y * y, &[1.0 / 6.0, -17.0 / 360.0, 43.0 / 5040.0, -769.0 / 604800.0])
    } else {
        sinh_minus_y(y) / y.sinh().powi(2)
    };
    Ok(0.5 * (1.0 + (-y).exp()) * r)
}

/// First divided difference `ln[a, b]`.
pub fn log_dd1(a: f64, b: f64) -> f64 {
    if a == b {
        return 1.0 / a;
    }
    let d = (b - a) / a;
    d.ln_1p() / (b - a)
}

/// Second divided difference `ln[a, b, c]`.
pub fn log_dd2(a: f64, b: f64, c: f64) -> f64 {
    let mut p = [a, b, c];
    p.sort_by(f64::total_cmp);
    let [x0, x1, x2] = p;
    if x2 - x0 < 10.0 * SERIES_RADIUS * x1 {
        // Σ_{n≥2} ln^{(n)}(x1)/n! · h_{n−2}(x0−x1, 0, x2−x1)
        let (d0, d2) = (x0 - x1, x2 - x1);
        let mut sum = 0.0;
        let mut inv_pow = 1.0 / (x1 * x1);
        for n in 2..12i32 {
            let m = n - 2;
            let h: f64 = (0..=m).map(|i| d0.powi(i) * d2.powi(m - i)).sum();
            let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
            sum += sign * inv_pow * h / f64::from(n);
            inv_pow /= x1;
        }
        return sum;
    }
    (log_dd1(x1, x2) - log_dd1(x0, x1)) / (x2 - x0)
}

/// Two-variable function of the quadratic term,
///
/// ```text
/// Q(s,t) = √s(√t + s) ln s / ((s−1)(s−t)) − √s√t ln t / ((s−t)(√t−1))
///        = √s ln[1,t] + √s(s + √t) ln[1,s,t]
/// ```
///
/// where `s` is the modular ratio across the first factor and `t` across the product.
pub fn eval_q(s: f64, t: f64) -> Result<f64, SpecFunError> {
    let s = check("Q", s)?;
    let t = check("Q", t)?;
    let rs = s.sqrt();
    Ok(rs * log_dd1(1.0, t) + rs * (s + t.sqrt()) * log_dd2(1.0, s, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g_closed(s: f64) -> f64 {
        (1.0 + s.sqrt()) * s.sqrt() / (s - 1.0).powi(3) * ((s + 1.0) * s.ln() - 2.0 * (s - 1.0))
    }
    fn f_delta_closed(s: f64) -> f64 {
        -(1.0 + s.sqrt()) * s.sqrt() / (s - 1.0).powi(2) * s.ln() + (s.sqrt() + 1.0) / (s - 1.0)
    }
    fn q_closed(s: f64, t: f64) -> f64 {
        s.sqrt() * (t.sqrt() + s) / ((s - 1.0) * (s - t)) * s.ln()
            - s.sqrt() * t.sqrt() / ((s - t) * (t.sqrt() - 1.0)) * t.ln()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn closed_forms_away_from_singularities() {
        for &s in &[0.01, 0.3, 0.7, 1.5, 2.0, 4.0, 9.0, 150.0] {
            assert!(rel(eval_g(s).unwrap(), g_closed(s)) < 1e-12, "G({s})");
            assert!(rel(eval_f_delta(s).unwrap(), f_delta_closed(s)) < 1e-11, "Fd({s})");
            let f_closed = s.sqrt() * ((s + 1.0) * s.ln() - 2.0 * (s - 1.0)) / (s - 1.0).powi(2);
            assert!(rel(eval_f(s).unwrap(), f_closed) < 1e-11, "F({s})");
        }
        for &(s, t) in &[(2.0, 3.0), (0.5, 4.0), (5.0, 0.2), (0.3, 0.6)] {
            assert!(rel(eval_q(s, t).unwrap(), q_closed(s, t)) < 1e-11, "Q({s},{t})");
        }
    }

    #[test]
    fn g_at_four() {
        // (3·2/27)(5 ln 4 − 6)
        let expected = 6.0 / 27.0 * (5.0 * 4f64.ln() - 6.0);
        assert!((eval_g(4.0).unwrap() - expected).abs() < 1e-15);
        assert!((eval_g(4.0).unwrap() - 0.206993).abs() < 1e-6);
    }

    #[test]
    fn limits() {
        assert!((eval_g(1.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(eval_f(1.0).unwrap(), 0.0);
        assert_eq!(eval_f_delta(1.0).unwrap(), 0.0);
        assert!(eval_q(1.0, 1.0).unwrap().abs() < 1e-15);
        assert!(eval_g(1e-16).unwrap().abs() < 1e-6);
    }

    #[test]
    fn branches_agree_at_switchover() {
        for &s in &[1.0 - SERIES_RADIUS, 1.0 + SERIES_RADIUS] {
            let below = s + (1.0 - s) * 1e-9;
            let above = s - (1.0 - s) * 1e-9;
            for f in [eval_g, eval_f, eval_f_delta] {
                assert!((f(below).unwrap() - f(above).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn q_is_continuous_across_singular_sets() {
        for &(s, t) in &[(1.0, 2.0), (2.0, 2.0), (2.0, 1.0), (0.4, 0.4), (1.0, 1.0)] {
            let q0 = eval_q(s, t).unwrap();
            for e in [1e-4, 1e-6, 1e-9] {
                let q1 = eval_q(s * (1.0 + e), t * (1.0 - 0.7 * e)).unwrap();
                assert!((q0 - q1).abs() < 20.0 * e, "Q near ({s},{t})");
            }
        }
    }

    #[test]
    fn unweighted_form_is_not_odd() {
        let s = 2.0;
        let f = eval_f_unweighted(s).unwrap();
        let g = eval_f_unweighted(1.0 / s).unwrap();
        assert!((g + s * f).abs() < 1e-14);
        assert!((g + f).abs() > 1e-2);
    }

    #[test]
    fn divided_differences() {
        assert!((log_dd1(2.0, 3.0) - (3f64.ln() - 2f64.ln())).abs() < 1e-15);
        let direct = ((5f64.ln() - 3f64.ln()) / 2.0 - (3f64.ln() - 2f64.ln())) / 3.0;
        assert!((log_dd2(2.0, 3.0, 5.0) - direct).abs() < 1e-15);
        // confluent: ln''(x)/2 = −1/(2x²)
        assert!((log_dd2(2.0, 2.0, 2.0) + 0.125).abs() < 1e-15);
        let near = log_dd2(2.0, 2.0 + 1e-5, 2.0 - 2e-5);
        assert!((near + 0.125).abs() < 1e-5);
    }

    #[test]
    fn domain_errors() {
        assert!(eval_g(0.0).is_err());
        assert!(eval_f(-1.0).is_err());
        assert!(eval_q(1.0, f64::NAN).is_err());
    }
}
