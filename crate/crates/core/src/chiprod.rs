//! The product `chi(1/2 + a + it) chi(1/2 - b - it)` and its large-height
//! approximation
//! `exp(-c log(|t + beta'|/2 pi) + (a + it) log(1 + c/(1/2 - a - it)) + c)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complexfn::{chi, exp_checked, ln_1p, log_chi_ratio, stirling_remainder};
use crate::divisor::ShiftPair;
use crate::{Error, Result};

pub const DEFAULT_ERROR_CONSTANT: f64 = 10.0;

/// Ratio `|t + alpha'| / |c|` (and likewise for `beta'`) above which the
/// approximation is claimed.
const DOMAIN_RATIO: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiProductReport {
    pub t: f64,
    pub shifts: ShiftPair,
    pub exact: Complex64,
    /// NaN outside the domain.
    pub lemma2_value: Complex64,
    /// NaN outside the domain or when `exact` vanishes.
    pub relative_error: f64,
    pub error_budget: f64,
    pub in_domain: bool,
}

fn half_plus(z: Complex64, t: f64) -> Complex64 {
    Complex64::new(0.5, t) + z
}

/// Both hypotheses `|t + alpha'| > 10|c|` and `|t + beta'| > 10|c|`.
pub fn in_domain(shifts: &ShiftPair, t: f64) -> bool {
    let c = shifts.c.norm();
    (t + shifts.alpha_p).abs() > DOMAIN_RATIO * c && (t + shifts.beta_p).abs() > DOMAIN_RATIO * c
}

/// `chi(1/2 + a + it) / chi(1/2 + b + it)`, which equals the product by
/// `chi(s) chi(1 - s) = 1`. The ratio is formed in log space from the shift
/// `c`, so it keeps full relative accuracy at large `t`.
pub fn chi_product_exact(shifts: &ShiftPair, t: f64) -> Result<Complex64> {
    let log_ratio = log_chi_ratio(half_plus(shifts.b, t), shifts.c)?;
    exp_checked("chi_product_exact", log_ratio)
}

/// The literal product of the two `chi` factors.
pub fn chi_product_direct(shifts: &ShiftPair, t: f64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    Ok(chi(half_plus(shifts.a, t))? * chi(one - half_plus(shifts.b, t))?)
}

pub fn chi_product_lemma2(shifts: &ShiftPair, t: f64) -> Result<Complex64> {
    if !in_domain(shifts, t) {
        return Err(Error::Domain {
            func: "chi_product_lemma2",
            reason: format!("t = {t} violates |t + alpha'|, |t + beta'| > 10|c|"),
        });
    }
    let c = shifts.c;
    let a_it = shifts.a + Complex64::new(0.0, t);
    let denom = Complex64::new(0.5, 0.0) - a_it;
    let scale = ((t + shifts.beta_p).abs() / (2.0 * PI)).ln();
    let exponent = -c * scale + a_it * ln_1p(c / denom) + c;
    exp_checked("chi_product_lemma2", exponent)
}

/// `R(1/2 - a - it) - R(1/2 - b - it)` with `R` the Stirling remainder.
pub fn delta_ab(shifts: &ShiftPair, t: f64) -> Result<Complex64> {
    if shifts.a == shifts.b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let one = Complex64::new(1.0, 0.0);
    let ra = stirling_remainder(one - half_plus(shifts.a, t))?;
    let rb = stirling_remainder(one - half_plus(shifts.b, t))?;
    Ok(ra - rb)
}

/// Shape of the `delta_ab` bound without its constant:
/// `(|c|^2 + 2|c||t + alpha'|) / (|t + alpha'|^2 (|t + alpha'| + 1))`.
pub fn delta_bound_shape(shifts: &ShiftPair, t: f64) -> f64 {
    let c = shifts.c.norm();
    let h = (t + shifts.alpha_p).abs();
    (c * c + 2.0 * c * h) / (h * h * (h + 1.0))
}

pub fn chi_product_report(shifts: &ShiftPair, t: f64, k: f64) -> Result<ChiProductReport> {
    let exact = chi_product_exact(shifts, t)?;
    let in_domain = in_domain(shifts, t);
    let nan = Complex64::new(f64::NAN, f64::NAN);
    let (lemma2_value, relative_error) = if in_domain {
        let v = chi_product_lemma2(shifts, t)?;
        let rel = if exact.norm() > 0.0 {
            (exact - v).norm() / exact.norm()
        } else {
            f64::NAN
        };
        (v, rel)
    } else {
        (nan, f64::NAN)
    };
    Ok(ChiProductReport {
        t,
        shifts: *shifts,
        exact,
        lemma2_value,
        relative_error,
        error_budget: k * shifts.c.norm() / (t + shifts.alpha_p).abs(),
        in_domain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pair(a: Complex64, b: Complex64) -> ShiftPair {
        ShiftPair::new(a, b)
    }

    #[test]
    fn equal_shifts_give_one() {
        let s = pair(c(0.1, 30.0), c(0.1, 30.0));
        for &t in &[5.0, 1e3, -2e4] {
            assert!((chi_product_exact(&s, t).unwrap() - c(1.0, 0.0)).norm() < 1e-10);
            assert_eq!(chi_product_lemma2(&s, t).unwrap(), c(1.0, 0.0));
            assert_eq!(delta_ab(&s, t).unwrap(), c(0.0, 0.0));
        }
    }

    #[test]
    fn ratio_route_matches_direct_product() {
        let cases = [
            (pair(c(0.01, 0.0), c(-0.01, 0.0)), 1000.0),
            (pair(c(0.05, 3.0), c(0.05, -3.0)), 250.0),
            (pair(c(0.2, 40.0), c(-0.1, -7.0)), 12_345.6),
            (pair(c(0.0, 0.0), c(0.3, 0.0)), -700.0),
        ];
        for (s, t) in cases {
            let e = chi_product_exact(&s, t).unwrap();
            let d = chi_product_direct(&s, t).unwrap();
            assert!((e - d).norm() < 1e-9 * d.norm(), "t={t}");
        }
    }

    #[test]
    fn conjugation_symmetry() {
        // conj chi(s) = chi(conj s): (a, b, t) -> (conj a, conj b, -t) conjugates the product
        let s = pair(c(0.03, 12.0), c(-0.02, 5.0));
        let t = 321.0;
        let p = chi_product_exact(&s, t).unwrap();
        let q = chi_product_exact(&pair(s.a.conj(), s.b.conj()), -t).unwrap();
        assert!((q - p.conj()).norm() < 1e-12 * p.norm());
        // swapping and conjugating both shifts gives conj(1/P) instead
        let r = chi_product_exact(&pair(s.b.conj(), s.a.conj()), -t).unwrap();
        assert!((r * p.conj() - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn lemma2_domain() {
        let s = pair(c(0.01, 0.0), c(0.0, 0.0));
        assert!(chi_product_lemma2(&s, 0.05).is_err());
        let r = chi_product_report(&s, 0.05, DEFAULT_ERROR_CONSTANT).unwrap();
        assert!(!r.in_domain && r.lemma2_value.re.is_nan() && r.relative_error.is_nan());
        assert!(r.exact.norm().is_finite());
    }

    #[test]
    fn lemma2_error_scaling() {
        let s = pair(c(0.01, 0.0), c(0.0, 0.0));
        let r1 = chi_product_report(&s, 1e4, DEFAULT_ERROR_CONSTANT).unwrap();
        assert!(r1.in_domain);
        assert!(r1.relative_error <= r1.error_budget);
        let r2 = chi_product_report(&s, 2e4, DEFAULT_ERROR_CONSTANT).unwrap();
        let ratio = r2.relative_error / r1.relative_error;
        assert!((0.3..=0.7).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn delta_bound_and_decay() {
        let s = pair(c(0.01, 0.0), c(0.0, 0.0));
        let d100 = delta_ab(&s, 100.0).unwrap().norm();
        let d1000 = delta_ab(&s, 1000.0).unwrap().norm();
        assert!(d100 <= 5.0 * delta_bound_shape(&s, 100.0));
        assert!(d1000 <= d100);
    }
}
