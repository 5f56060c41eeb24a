//! The functional-equation factor `chi(s)`, with `zeta(s) = chi(s) zeta(1 - s)`.
//!
//! `log chi(s) = (s - 1/2) ln pi + log Gamma((1 - s)/2) - log Gamma(s/2)`.
//! Written this way `log chi(s) + log chi(1 - s)` cancels term by term, and
//! `|chi(1/2 + it)| = 1` falls out of the conjugation symmetry of log-gamma.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use super::gamma::{digamma, ln_1p, log_gamma, log_gamma_diff, trigamma};
use crate::error::{Error, Result};

pub(crate) const LN_PI: f64 = 1.144_729_885_849_400_174_1;
/// Largest real part of a logarithm whose exponential is still finite.
const MAX_LOG: f64 = 709.78;

fn is_nonpositive_integer(s: Complex64) -> bool {
    s.im == 0.0 && s.re <= 0.0 && s.re == s.re.round()
}

/// `chi` vanishes at `s = 0, -2, -4, ...`.
fn is_chi_zero(s: Complex64) -> bool {
    is_nonpositive_integer(s * 0.5)
}

/// `chi` has poles at `s = 1, 3, 5, ...`.
fn is_chi_pole(s: Complex64) -> bool {
    is_nonpositive_integer((Complex64::new(1.0, 0.0) - s) * 0.5)
}

/// `log chi(s)`. Fails at the poles and at the zeros of `chi`.
pub fn log_chi(s: Complex64) -> Result<Complex64> {
    if is_chi_pole(s) {
        return Err(Error::Pole {
            func: "chi",
            at: format!("{s}"),
        });
    }
    if is_chi_zero(s) {
        return Err(Error::Domain {
            func: "log_chi",
            reason: format!("chi vanishes at {s}"),
        });
    }
    let one = Complex64::new(1.0, 0.0);
    // Right of the critical line use log chi(s) = -log chi(1 - s). On the
    // strip 1 - s is exact, so chi(s) chi(1 - s) = 1 survives the rounding of
    // the O(t log t) phase.
    if s.re > 0.5 {
        return Ok(-log_chi_left(one - s)?);
    }
    log_chi_left(s)
}

fn log_chi_left(s: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    Ok((s - 0.5) * LN_PI + log_gamma((one - s) * 0.5)? - log_gamma(s * 0.5)?)
}

pub(crate) fn exp_checked(func: &'static str, log_value: Complex64) -> Result<Complex64> {
    if log_value.re > MAX_LOG {
        return Err(Error::Overflow {
            func,
            log_magnitude: log_value.re,
        });
    }
    Ok(log_value.exp())
}

pub fn chi(s: Complex64) -> Result<Complex64> {
    if is_chi_zero(s) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    exp_checked("chi", log_chi(s)?)
}

/// `log chi(base + delta) - log chi(base)`, evaluated so that the large
/// phases of the two factors cancel analytically rather than numerically.
pub fn log_chi_ratio(base: Complex64, delta: Complex64) -> Result<Complex64> {
    let moved = base + delta;
    for s in [base, moved] {
        if is_chi_pole(s) {
            return Err(Error::Pole {
                func: "chi",
                at: format!("{s}"),
            });
        }
        if is_chi_zero(s) {
            return Err(Error::Domain {
                func: "log_chi_ratio",
                reason: format!("chi vanishes at {s}"),
            });
        }
    }
    let one = Complex64::new(1.0, 0.0);
    let upper = log_gamma_diff((one - base) * 0.5, -delta * 0.5)?;
    let lower = log_gamma_diff(base * 0.5, delta * 0.5)?;
    Ok(delta * LN_PI + upper - lower)
}

/// First and second derivatives of `log chi` at `w`.
pub fn log_chi_derivatives(w: Complex64) -> Result<(Complex64, Complex64)> {
    let one = Complex64::new(1.0, 0.0);
    let upper = (one - w) * 0.5;
    let lower = w * 0.5;
    let first = LN_PI - 0.5 * digamma(upper)? - 0.5 * digamma(lower)?;
    let second = 0.25 * trigamma(upper)? - 0.25 * trigamma(lower)?;
    Ok((first, second))
}

/// `ln sin(z)` without overflow for large `|Im z|`.
pub fn ln_sin(z: Complex64) -> Complex64 {
    if z.im.abs() < 20.0 {
        return z.sin().ln();
    }
    let sign = z.im.signum();
    // sin z = (e^{iz} - e^{-iz}) / 2i; factor out the dominant exponential
    let dominant = Complex64::new(0.0, -sign) * z;
    let ratio = (Complex64::new(0.0, 2.0 * sign) * z).exp();
    dominant + Complex64::new(0.0, sign * 0.5).ln() + ln_1p(-ratio)
}

/// The reflection form `log chi(s) = s ln 2 + (s - 1) ln pi + ln sin(pi s / 2) + log Gamma(1 - s)`.
///
/// Independent of [`log_chi`] up to a multiple of `2 pi i`; used as a cross-check.
pub fn log_chi_reflection(s: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    if is_chi_zero(s) {
        return Err(Error::Domain {
            func: "log_chi_reflection",
            reason: format!("chi vanishes at {s}"),
        });
    }
    Ok(s * LN_2 + (s - 1.0) * LN_PI + ln_sin(s * (PI * 0.5)) + log_gamma(one - s)?)
}
