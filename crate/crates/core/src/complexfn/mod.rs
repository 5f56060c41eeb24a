//! Complex special-function kernel: log-gamma and friends, `chi`, and the two
//! zeta evaluators consumed by every other module.

mod chi;
mod gamma;
pub mod selftest;
mod tables;
mod zeta;

use num_complex::Complex64;

pub use chi::{chi, ln_sin, log_chi, log_chi_derivatives, log_chi_ratio, log_chi_reflection};
pub use gamma::{digamma, ln_1p, log_gamma, log_gamma_diff, stirling_remainder, trigamma};
pub use tables::{BERNOULLI_EVEN, STIELTJES_1, STIELTJES_2};
pub use zeta::{expm1, zeta, zeta_em, zeta_regular_at_one, zeta_rs, EvalPolicy, ZetaMethod, AUTO_RS_HEIGHT};

pub(crate) use chi::exp_checked;

/// Double-precision complex scalar used by every evaluator.
pub type ComplexValue = Complex64;

/// The Euler-Mascheroni constant.
pub fn euler_gamma() -> f64 {
    tables::EULER_GAMMA
}
