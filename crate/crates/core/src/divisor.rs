//! The shifted divisor sum `D_c(x) = sum_{mn <= x} n^{-c}` and its
//! asymptotic main term `zeta(1+c) x + zeta(1-c) x^{1-c} / (1-c)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complexfn::{expm1, ln_1p, zeta_regular_at_one, EvalPolicy, STIELTJES_1, STIELTJES_2};
use crate::complexfn::euler_gamma;
use crate::sum::ComplexSum;
use crate::{Error, Result};

/// Below this `|c|` the main term (and the moment right-hand side) switch to
/// a Taylor expansion around `c = 0`.
pub const LIMIT_THRESHOLD: f64 = 1e-4;

/// Largest `x` accepted by the pair-enumeration oracle.
pub const PAIRS_MAX_X: f64 = 1e6;

/// Largest `x` accepted by the single-loop evaluator.
pub const FAST_MAX_X: f64 = 1e9;

pub const DEFAULT_EPSILON: f64 = 0.05;
pub const DEFAULT_HYPOTHESIS_CONSTANT: f64 = 2.0;

const CHUNK: u64 = 1 << 16;

/// Two shifts `a = alpha + i alpha'`, `b = beta + i beta'` and their
/// difference `c = a - b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftPair {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub alpha: f64,
    pub alpha_p: f64,
    pub beta: f64,
    pub beta_p: f64,
    pub gamma: f64,
    pub gamma_p: f64,
}

impl ShiftPair {
    pub fn new(a: Complex64, b: Complex64) -> Self {
        let c = a - b;
        Self {
            a,
            b,
            c,
            alpha: a.re,
            alpha_p: a.im,
            beta: b.re,
            beta_p: b.im,
            gamma: c.re,
            gamma_p: c.im,
        }
    }

    pub fn from_parts(alpha: f64, alpha_p: f64, beta: f64, beta_p: f64) -> Self {
        Self::new(Complex64::new(alpha, alpha_p), Complex64::new(beta, beta_p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivisorSumReport {
    pub x: f64,
    pub c: Complex64,
    pub exact: Complex64,
    pub main_term: Complex64,
    pub residual: Complex64,
    pub normalizer: f64,
    pub normalized_residual: f64,
    pub hypothesis_ok: bool,
}

/// Knobs for [`lemma1_report_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Lemma1Config {
    pub epsilon: f64,
    /// `H` in the hypothesis `|gamma| <= H / log x`.
    pub hypothesis_constant: f64,
}

impl Default for Lemma1Config {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
            hypothesis_constant: DEFAULT_HYPOTHESIS_CONSTANT,
        }
    }
}

#[inline]
fn inv_power(n: u64, c: Complex64) -> Complex64 {
    (-c * (n as f64).ln()).exp()
}

/// `sigma_q(n)`, the sum of `d^q` over the divisors of `n`.
pub fn sigma_power(n: u64, q: Complex64) -> Complex64 {
    assert!(n >= 1, "sigma_power needs n >= 1");
    let mut acc = ComplexSum::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            acc.add((q * (d as f64).ln()).exp());
            let e = n / d;
            if e != d {
                acc.add((q * (e as f64).ln()).exp());
            }
        }
        d += 1;
    }
    acc.value()
}

fn check_x(x: f64, max: f64, what: &'static str) -> Result<u64> {
    if !(x >= 2.0) {
        return Err(Error::Domain {
            func: what,
            reason: format!("x = {x} is below 2"),
        });
    }
    if x > max {
        return Err(Error::BudgetExceeded {
            what,
            detail: format!("x = {x:e} exceeds the ceiling {max:e}"),
        });
    }
    Ok(x.floor() as u64)
}

/// Reference value of `D_c(x)` by enumerating every pair `(m, n)` with
/// `mn <= x`. Oracle scale only.
pub fn dsum_pairs(x: f64, c: Complex64) -> Result<Complex64> {
    let n_max = check_x(x, PAIRS_MAX_X, "dsum_pairs")?;
    let mut acc = ComplexSum::new();
    for m in 1..=n_max {
        let mut n = 1u64;
        while m * n <= n_max {
            acc.add(inv_power(n, c));
            n += 1;
        }
    }
    Ok(acc.value())
}

/// `D_c(x)` as `sum_{n <= x} n^{-c} floor(x/n)`. Chunks are summed in
/// parallel and merged in a fixed order, so the result does not depend on
/// the thread count.
pub fn dsum_fast(x: f64, c: Complex64) -> Result<Complex64> {
    let n_max = check_x(x, FAST_MAX_X, "dsum_fast")?;
    let chunks = n_max.div_ceil(CHUNK);
    let partials: Vec<ComplexSum> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let lo = k * CHUNK + 1;
            let hi = ((k + 1) * CHUNK).min(n_max);
            let mut acc = ComplexSum::new();
            for n in lo..=hi {
                acc.add(inv_power(n, c) * (n_max / n) as f64);
            }
            acc
        })
        .collect();
    let mut total = ComplexSum::new();
    for p in &partials {
        total.merge(p);
    }
    Ok(total.value())
}

/// Coefficients of `M(c)/x = m0 + m1 c + m2 c^2 + O(c^3)` where `L = log x`.
fn main_term_taylor(l: f64) -> [f64; 3] {
    let g = euler_gamma();
    // e_k: partial sums of exp(-L)
    let e1 = 1.0 - l;
    let e2 = e1 + l * l / 2.0;
    let e3 = e2 - l * l * l / 6.0;
    [
        2.0 * g - e1,
        (l - 1.0) * (1.0 - g) - l * l / 2.0,
        STIELTJES_2 - e3 + g * e2 + STIELTJES_1 * e1,
    ]
}

/// `zeta(1+c) x + zeta(1-c) x^{1-c} / (1-c)`.
///
/// The poles of `zeta(1 +- c)` are cancelled analytically, so the formula is
/// usable down to `|c|` well below the switch to the Taylor branch.
pub fn dsum_main_term(x: f64, c: Complex64, policy: &EvalPolicy) -> Result<Complex64> {
    if !(x >= 2.0) {
        return Err(Error::Domain {
            func: "dsum_main_term",
            reason: format!("x = {x} is below 2"),
        });
    }
    if c == Complex64::new(1.0, 0.0) {
        return Err(Error::Domain {
            func: "dsum_main_term",
            reason: "1/(1 - c) has a pole at c = 1".into(),
        });
    }
    let l = x.ln();
    if c.norm() < LIMIT_THRESHOLD {
        let m = main_term_taylor(l);
        return Ok((c * (c * m[2] + m[1]) + m[0]) * x);
    }
    let r_plus = zeta_regular_at_one(c, policy)?;
    let r_minus = zeta_regular_at_one(-c, policy)?;
    // E = x^{-c}/(1-c); then M/x = r(c) + r(-c) E + (1 - E)/c
    let log_e = -c * l - ln_1p(-c);
    let e = log_e.exp();
    let one_minus_e = -expm1(log_e);
    Ok((r_plus + r_minus * e + one_minus_e / c) * x)
}

/// Lemma 1 comparison at `(x, c)` with the default hypothesis constant.
pub fn lemma1_report(x: f64, c: Complex64, epsilon: f64) -> Result<DivisorSumReport> {
    lemma1_report_with(
        x,
        c,
        &Lemma1Config {
            epsilon,
            ..Lemma1Config::default()
        },
        &EvalPolicy::default(),
    )
}

pub fn lemma1_report_with(
    x: f64,
    c: Complex64,
    cfg: &Lemma1Config,
    policy: &EvalPolicy,
) -> Result<DivisorSumReport> {
    if !(cfg.epsilon > 0.0 && cfg.epsilon <= 1.0 / 6.0) {
        return Err(Error::Domain {
            func: "lemma1_report",
            reason: format!("epsilon = {} outside (0, 1/6]", cfg.epsilon),
        });
    }
    let exact = dsum_fast(x, c)?;
    let main_term = dsum_main_term(x, c, policy)?;
    let residual = exact - main_term;
    let l = x.ln();
    let normalizer = x.powf(1.0 / 3.0 + cfg.epsilon) + c.im.abs().sqrt() * l * l;
    Ok(DivisorSumReport {
        x,
        c,
        exact,
        main_term,
        residual,
        normalizer,
        normalized_residual: residual.norm() / normalizer,
        hypothesis_ok: c.re.abs() <= cfg.hypothesis_constant / l,
    })
}
