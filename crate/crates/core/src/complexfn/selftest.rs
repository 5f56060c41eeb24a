//! Identity suite behind the `selftest` subcommand.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    chi, digamma, euler_gamma, log_gamma, stirling_remainder, zeta_em, zeta_regular_at_one,
    zeta_rs, EvalPolicy,
};

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct SelfTestReport {
    pub checks: Vec<CheckOutcome>,
}

impl SelfTestReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Knobs for fault injection; the defaults describe a healthy build.
#[derive(Debug, Clone, Copy)]
pub struct SelfTestOptions {
    pub euler_gamma: f64,
    pub seed: u64,
    pub samples: usize,
}

impl Default for SelfTestOptions {
    fn default() -> Self {
        Self {
            euler_gamma: euler_gamma(),
            seed: 0x5eed,
            samples: 40,
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

struct Suite {
    checks: Vec<CheckOutcome>,
}

impl Suite {
    fn record(&mut self, name: &'static str, error: Result<f64, String>, tol: f64) {
        let (passed, detail) = match error {
            Ok(err) => (err <= tol, format!("max error {err:.3e} (tolerance {tol:.1e})")),
            Err(e) => (false, e),
        };
        self.checks.push(CheckOutcome {
            name,
            passed,
            detail,
        });
    }
}

fn max_over<I: IntoIterator<Item = Result<f64, String>>>(iter: I) -> Result<f64, String> {
    let mut worst = 0.0f64;
    for v in iter {
        worst = worst.max(v?);
    }
    Ok(worst)
}

pub fn run(opts: &SelfTestOptions) -> SelfTestReport {
    let policy = EvalPolicy::default();
    let gamma = opts.euler_gamma;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let strip: Vec<Complex64> = (0..opts.samples)
        .map(|_| c(rng.gen_range(0.1..0.9), rng.gen_range(10.0..2e3)))
        .collect();
    let mut suite = Suite { checks: Vec::new() };
    let err = |e: crate::error::Error| e.to_string();

    suite.record(
        "log_gamma(1) = 0",
        log_gamma(c(1.0, 0.0)).map(|v| v.norm()).map_err(err),
        1e-14,
    );
    suite.record(
        "log_gamma(1/2) = ln(pi)/2",
        log_gamma(c(0.5, 0.0))
            .map(|v| (v - 0.5 * PI.ln()).norm())
            .map_err(err),
        1e-14,
    );
    suite.record(
        "log_gamma recurrence",
        max_over(strip.iter().map(|s| {
            let a = log_gamma(s + 1.0).map_err(err)?;
            let b = log_gamma(*s).map_err(err)?;
            Ok((a - b - s.ln()).norm() / a.norm().max(1.0))
        })),
        1e-12,
    );
    suite.record(
        "digamma(1) = -euler_gamma",
        digamma(c(1.0, 0.0)).map(|v| (v.re + gamma).abs()).map_err(err),
        1e-14,
    );
    suite.record(
        "zeta(1 + c) - 1/c -> euler_gamma",
        zeta_regular_at_one(c(1e-6, 0.0), &policy)
            .map(|v| (v.re - gamma).abs())
            .map_err(err),
        1e-5,
    );
    suite.record(
        "stirling_remainder(1) = 1 - ln(2 pi)/2",
        stirling_remainder(c(1.0, 0.0))
            .map(|v| (v.re - (1.0 - 0.5 * (2.0 * PI).ln())).abs())
            .map_err(err),
        1e-13,
    );
    suite.record(
        "chi(1/2) = 1",
        chi(c(0.5, 0.0)).map(|v| (v - 1.0).norm()).map_err(err),
        1e-12,
    );
    suite.record(
        "chi(s) chi(1 - s) = 1",
        max_over(strip.iter().map(|s| {
            let p = chi(*s).map_err(err)? * chi(c(1.0, 0.0) - s).map_err(err)?;
            Ok((p - 1.0).norm())
        })),
        1e-10,
    );
    suite.record(
        "|chi(1/2 + it)| = 1",
        max_over(strip.iter().map(|s| {
            Ok((chi(c(0.5, s.im)).map_err(err)?.norm() - 1.0).abs())
        })),
        1e-10,
    );
    suite.record(
        "functional equation zeta(1 - s) = chi(1 - s) zeta(s)",
        max_over(strip.iter().map(|s| {
            let w = c(1.0, 0.0) - s;
            let lhs = zeta_em(w, &policy).map_err(err)?;
            let rhs = chi(w).map_err(err)? * zeta_em(*s, &policy).map_err(err)?;
            Ok((lhs - rhs).norm() / lhs.norm())
        })),
        1e-8,
    );
    suite.record(
        "zeta(2) = pi^2/6",
        zeta_em(c(2.0, 0.0), &policy)
            .map(|v| (v.re - PI * PI / 6.0).abs())
            .map_err(err),
        1e-13,
    );
    suite.record(
        "zeta(0) = -1/2",
        zeta_em(c(0.0, 0.0), &policy)
            .map(|v| (v.re + 0.5).abs())
            .map_err(err),
        1e-13,
    );
    suite.record(
        "zeta_em = zeta_rs on the strip",
        max_over(strip.iter().map(|s| {
            let a = zeta_em(*s, &policy).map_err(err)?;
            let b = zeta_rs(*s).map_err(err)?;
            Ok((a - b).norm())
        })),
        1e-6,
    );
    suite.record(
        "zeta(conj s) = conj zeta(s)",
        max_over(strip.iter().map(|s| {
            let a = zeta_rs(*s).map_err(err)?;
            let b = zeta_rs(s.conj()).map_err(err)?;
            Ok((a - b.conj()).norm())
        })),
        1e-15,
    );
    SelfTestReport {
        checks: suite.checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn healthy_build_passes() {
        let report = run(&SelfTestOptions::default());
        for c in &report.checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
        assert!(report.checks.len() >= 10);
    }

    #[test]
    fn perturbed_constant_is_caught() {
        let opts = SelfTestOptions {
            euler_gamma: euler_gamma() + 1e-3,
            ..SelfTestOptions::default()
        };
        let report = run(&opts);
        let failed: Vec<_> = report.failures().map(|c| c.name).collect();
        assert!(failed.contains(&"digamma(1) = -euler_gamma"));
    }
}
