//! Two independent evaluators of `zeta(s)`.
//!
//! * [`zeta_em`]: Euler-Maclaurin summation with an explicit remainder bound.
//!   Valid for every `s != 1`; cost grows like `|Im s| / 2 pi`.
//! * [`zeta_rs`]: the Riemann-Siegel expansion for arbitrary real part
//!   (`zeta(s) = R(s) + chi(s) conj(R(1 - conj(s)))`), cost `~ sqrt(|Im s|)`.
//!   Restricted to the critical strip above height 10.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::chi::log_chi;
use super::tables::{BERNOULLI_EVEN, RS_KERNEL_TAYLOR};
use crate::error::{Error, Result};
use crate::sum::ComplexSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZetaMethod {
    EulerMaclaurin,
    RiemannSiegel,
    Auto,
}

/// Evaluator selection and accuracy budget for every zeta call.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalPolicy {
    pub method: ZetaMethod,
    pub target_abs_error: f64,
    pub max_terms: usize,
}

impl Default for EvalPolicy {
    fn default() -> Self {
        Self {
            method: ZetaMethod::Auto,
            target_abs_error: 1e-14,
            max_terms: 5_000_000,
        }
    }
}

impl EvalPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.target_abs_error > 0.0 && self.target_abs_error.is_finite()) {
            return Err(Error::Config(format!(
                "target_abs_error must be positive, got {}",
                self.target_abs_error
            )));
        }
        if self.max_terms < 16 {
            return Err(Error::Config(format!(
                "max_terms must be at least 16, got {}",
                self.max_terms
            )));
        }
        Ok(())
    }
}

/// Height above which `Auto` switches strip arguments to Riemann-Siegel.
pub const AUTO_RS_HEIGHT: f64 = 50.0;

pub fn zeta(s: Complex64, policy: &EvalPolicy) -> Result<Complex64> {
    match policy.method {
        ZetaMethod::EulerMaclaurin => zeta_em(s, policy),
        ZetaMethod::RiemannSiegel => zeta_rs(s),
        ZetaMethod::Auto => {
            if s.re > 0.0 && s.re < 1.0 && s.im.abs() >= AUTO_RS_HEIGHT {
                zeta_rs(s)
            } else {
                zeta_em(s, policy)
            }
        }
    }
}

#[inline]
fn inv_power(n: f64, s: Complex64) -> Complex64 {
    // n^{-s}
    let ln = n.ln();
    Complex64::from_polar((-s.re * ln).exp(), -s.im * ln)
}

/// `B_2k / (2k)!` for `k = 1..=30`.
fn bernoulli_over_factorial() -> &'static [f64; 30] {
    static TABLE: OnceLock<[f64; 30]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = [0.0; 30];
        let mut fact = 1.0f64;
        for k in 1..=30usize {
            fact *= ((2 * k - 1) * (2 * k)) as f64;
            out[k - 1] = BERNOULLI_EVEN[k - 1] / fact;
        }
        out
    })
}

struct EmPlan {
    n: usize,
    terms: usize,
}

/// Picks the cut-off `N` and the number of Bernoulli corrections so that the
/// remainder bound `|T_{K+1}| |s + 2K + 1| / (sigma + 2K + 1)` meets `target`.
fn plan_em(s: Complex64, target: f64, max_terms: usize) -> Result<EmPlan> {
    let coef = bernoulli_over_factorial();
    let base = (s.norm() + 40.0) / (2.0 * PI);
    let mut last_bound = f64::INFINITY;
    for mult in [1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0, 4.0, 6.0, 8.0, 16.0] {
        let n = ((base * mult).ceil() as usize).max(16);
        if n > max_terms {
            break;
        }
        let nf = n as f64;
        let n_pow = inv_power(nf, s).norm();
        // |s (s+1) ... (s+2k-2)| * N^{-sigma-2k+1}
        let mut poch = s.norm() * n_pow / nf;
        for k in 1..30usize {
            // poch currently holds the magnitude for term k; advance to k+1
            let next = poch * ((s + (2 * k - 1) as f64).norm() * (s + (2 * k) as f64).norm())
                / (nf * nf);
            let tk1 = coef[k].abs() * next;
            let denom = s.re + (2 * k + 1) as f64;
            if denom > 0.0 {
                let bound = tk1 * (s + (2 * k + 1) as f64).norm() / denom;
                last_bound = last_bound.min(bound);
                if bound <= target {
                    return Ok(EmPlan { n, terms: k });
                }
            }
            poch = next;
        }
    }
    Err(Error::BudgetExceeded {
        what: "zeta_em",
        detail: format!(
            "s = {s}: no cut-off within max_terms = {max_terms} reaches {target:e} (best bound {last_bound:e})"
        ),
    })
}

/// Euler-Maclaurin evaluation of `zeta(s)` with absolute error at most
/// `policy.target_abs_error` (by the remainder bound).
pub fn zeta_em(s: Complex64, policy: &EvalPolicy) -> Result<Complex64> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole {
            func: "zeta",
            at: "1".into(),
        });
    }
    if s.im < 0.0 {
        return zeta_em(s.conj(), policy).map(|v| v.conj());
    }
    em_sum(s, None, policy)
}

/// `zeta(1 + c) - 1/c`, with the pole removed analytically so that tiny `c`
/// loses nothing to the rounding of `1 + c`.
pub fn zeta_regular_at_one(c: Complex64, policy: &EvalPolicy) -> Result<Complex64> {
    if c == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(super::tables::EULER_GAMMA, 0.0));
    }
    if c.im < 0.0 {
        return zeta_regular_at_one(c.conj(), policy).map(|v| v.conj());
    }
    em_sum(c + 1.0, Some(c), policy)
}

/// Complex `exp(z) - 1`, accurate near zero.
pub fn expm1(z: Complex64) -> Complex64 {
    let half_sin = (0.5 * z.im).sin();
    Complex64::new(
        z.re.exp_m1() * z.im.cos() - 2.0 * half_sin * half_sin,
        z.re.exp() * z.im.sin(),
    )
}

/// Euler-Maclaurin sum at `s`. With `pole_offset = Some(c)` (and `s = 1 + c`)
/// the `1/c` part of the pole term is left out.
fn em_sum(s: Complex64, pole_offset: Option<Complex64>, policy: &EvalPolicy) -> Result<Complex64> {
    let plan = plan_em(s, policy.target_abs_error, policy.max_terms)?;
    let coef = bernoulli_over_factorial();
    let mut acc = ComplexSum::new();
    for k in 1..plan.n {
        acc.add(inv_power(k as f64, s));
    }
    let nf = plan.n as f64;
    let n_pow = inv_power(nf, s);
    match pole_offset {
        // N^{-c}/c - 1/c = expm1(-c ln N)/c
        Some(c) => acc.add(expm1(-c * nf.ln()) / c),
        None => acc.add(n_pow * nf / (s - 1.0)),
    }
    acc.add(n_pow * 0.5);
    // T_k = B_2k/(2k)! * s(s+1)...(s+2k-2) * N^{-s-2k+1}
    let mut poch = s * n_pow / nf;
    for k in 1..=plan.terms {
        acc.add(poch * coef[k - 1]);
        poch = poch * (s + (2 * k - 1) as f64) * (s + (2 * k) as f64) / (nf * nf);
    }
    Ok(acc.value())
}

/// Maximum number of Riemann-Siegel correction terms.
const RS_MAX_TERMS: usize = 24;

/// Value and derivatives `F^{(m)}(p)`, `m = 0..=max_order`, of the
/// Riemann-Siegel kernel from its Taylor series.
fn kernel_derivatives(p: f64, max_order: usize) -> Vec<Complex64> {
    // dense coefficient vector a_k of z^k
    let len = 2 * RS_KERNEL_TAYLOR.len();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); len];
    for (n, c) in RS_KERNEL_TAYLOR.iter().enumerate() {
        coeffs[2 * n] = *c;
    }
    let mut out = Vec::with_capacity(max_order + 1);
    for _ in 0..=max_order {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in coeffs.iter().rev() {
            acc = acc * p + c;
        }
        out.push(acc);
        let next: Vec<Complex64> = coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * k as f64)
            .collect();
        coeffs = next;
    }
    out
}

/// Coefficients `d_k^{(n)}(sigma)` of the correction polynomials, for
/// `n < terms` and `k <= 3n/2`.
fn correction_coefficients(sigma: f64, terms: usize) -> Vec<Vec<f64>> {
    let psigma = 1.0 - 2.0 * sigma;
    let mut d: Vec<Vec<f64>> = Vec::with_capacity(terms);
    d.push(vec![1.0]);
    let fact = |n: usize| (1..=n).fold(1.0f64, |acc, k| acc * k as f64);
    for n in 1..terms {
        let prev = &d[n - 1];
        let get = |k: isize| -> f64 {
            if k < 0 {
                0.0
            } else {
                prev.get(k as usize).copied().unwrap_or(0.0)
            }
        };
        let width = 3 * n / 2 + 1;
        let mut row = vec![0.0; width];
        for k in 0..width {
            let m = 3 * n as isize - 2 * k as isize;
            if m != 0 {
                let mf = m as f64;
                row[k] = -(mf + 1.0) * get(k as isize - 2)
                    + get(k as isize) / (4.0 * mf)
                    + psigma * get(k as isize - 1) / (2.0 * mf);
            } else {
                let mut v = 0.0;
                for r in 0..k {
                    let sign = if (k - r) % 2 == 0 { 1.0 } else { -1.0 };
                    v -= sign * row[r] * fact(2 * k - 2 * r) / fact(k - r);
                }
                row[k] = v;
            }
        }
        d.push(row);
    }
    d
}

/// Error estimate for `terms` correction terms at `a = sqrt(t / 2 pi)`.
fn rs_truncation_bound(sigma: f64, a: f64, terms: usize) -> f64 {
    let c = 9f64.powf(sigma) / 4.44288;
    let l = terms as f64;
    3.0 * c * gamma_real(l / 2.0) * (2.0 * a).powf(-l)
}

fn gamma_real(x: f64) -> f64 {
    super::gamma::log_gamma(Complex64::new(x, 0.0))
        .map(|v| v.re.exp())
        .unwrap_or(f64::INFINITY)
}

fn choose_rs_terms(sigma: f64, a: f64) -> usize {
    let target = 1e-15 * a.powf(sigma.min(1.0 - sigma));
    let mut best = (f64::INFINITY, 2usize);
    for l in 2..=RS_MAX_TERMS {
        let bound = rs_truncation_bound(sigma.max(1.0 - sigma), a, l);
        if bound < best.0 {
            best = (bound, l);
        }
        if bound <= target {
            return l;
        }
    }
    best.1
}

/// `sum_k term_k(sigma) a^{-k}`, the bracket multiplying `(-1)^{N-1} a^{-sigma} U`.
fn rs_correction(sigma: f64, a: f64, kernel: &[Complex64], terms: usize) -> Complex64 {
    let d = correction_coefficients(sigma, terms);
    let two_i = Complex64::new(0.0, 2.0);
    let mut total = Complex64::new(0.0, 0.0);
    let mut a_pow = 1.0;
    for (k, row) in d.iter().enumerate() {
        let mut term = Complex64::new(0.0, 0.0);
        for (l, dk) in row.iter().enumerate() {
            if *dk == 0.0 {
                continue;
            }
            let pi_pow = PI.powi((2 * k - l) as i32);
            term += kernel[3 * k - 2 * l] * *dk / (two_i.powi(l as i32) * pi_pow);
        }
        total += term * a_pow;
        a_pow /= a;
    }
    total
}

/// Riemann-Siegel evaluation for `0 < Re(s) < 1`, `|Im(s)| >= 10`.
pub fn zeta_rs(s: Complex64) -> Result<Complex64> {
    if !(s.re > 0.0 && s.re < 1.0) || s.im.abs() < 10.0 || !s.im.is_finite() {
        return Err(Error::Domain {
            func: "zeta_rs",
            reason: format!("need 0 < Re(s) < 1 and |Im(s)| >= 10, got {s}"),
        });
    }
    if s.im < 0.0 {
        return zeta_rs(s.conj()).map(|v| v.conj());
    }
    let sigma = s.re;
    let t = s.im;
    let a = (t / (2.0 * PI)).sqrt();
    let n = a.floor() as usize;
    let p = 1.0 - 2.0 * (a - n as f64);
    let terms = choose_rs_terms(sigma, a);
    let kernel = kernel_derivatives(p, 3 * (terms - 1));

    // main sums over n <= N for sigma and 1 - sigma share the phases n^{-it}
    let mut direct = ComplexSum::new();
    let mut mirror = ComplexSum::new();
    for k in 1..=n {
        let ln = (k as f64).ln();
        let phase = Complex64::from_polar(1.0, -t * ln);
        direct.add(phase * (-sigma * ln).exp());
        mirror.add(phase * ((sigma - 1.0) * ln).exp());
    }
    let theta = 0.5 * t * (t / (2.0 * PI)).ln() - 0.5 * t - PI / 8.0;
    let u = Complex64::from_polar(1.0, -theta);
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    let r_direct =
        direct.value() + rs_correction(sigma, a, &kernel, terms) * u * (sign * a.powf(-sigma));
    let r_mirror = mirror.value()
        + rs_correction(1.0 - sigma, a, &kernel, terms) * u * (sign * a.powf(sigma - 1.0));
    let chi_s = log_chi(s)?.exp();
    Ok(r_direct + chi_s * r_mirror.conj())
}
