//! Numerical laboratory for the shifted second moment of the Riemann zeta
//! function on the critical line.
//!
//! * [`complexfn`]: special functions (log-gamma, `chi`, two zeta evaluators).
//! * [`divisor`]: the shifted divisor sum `D_c(x)` and its asymptotic main term.
//! * [`chiprod`]: the product `chi(1/2 + a + it) chi(1/2 - b - it)` and its
//!   large-height approximation.
//! * [`moment`]: quadrature of both sides of the shifted second-moment formula.
//! * [`scanlab`]: grid experiments, power-law fits, CSV/JSON persistence.
//! * [`cli`]: the `zml` command-line driver.

pub mod chiprod;
pub mod cli;
pub mod complexfn;
pub mod divisor;
pub mod error;
pub mod moment;
pub mod scanlab;
pub mod sum;

pub use complexfn::ComplexValue;
pub use error::{Error, Result};
