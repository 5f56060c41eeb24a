//! Both sides of the shifted second-moment formula
//!
//! `int_0^T zeta(1/2 + a + it) zeta(1/2 - b - it) dt
//!   ~ int_0^T [zeta(1 + c) + zeta(1 - c) chi(1/2 + a + it) chi(1/2 - b - it)] dt`,
//!
//! integrated by panel Gauss-Legendre quadrature with bisection refinement.

use std::f64::consts::PI;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chiprod::chi_product_exact;
use crate::complexfn::{
    euler_gamma, expm1, log_chi_derivatives, log_chi_ratio, zeta, zeta_regular_at_one,
    EvalPolicy, STIELTJES_1, STIELTJES_2,
};
use crate::divisor::{ShiftPair, LIMIT_THRESHOLD};
use crate::sum::ComplexSum;
use crate::{Error, Result};

/// Maximum number of bisections applied to a single panel.
pub const MAX_REFINE_DEPTH: u32 = 6;
pub const DEFAULT_HYPOTHESIS_CONSTANT: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureConfig {
    pub panel_width: f64,
    pub nodes_per_panel: usize,
    pub refinement_tolerance: f64,
    pub max_panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            panel_width: 0.25,
            nodes_per_panel: 8,
            refinement_tolerance: 1e-8,
            max_panels: 4_000_000,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.panel_width > 0.0 && self.panel_width.is_finite()) {
            return Err(Error::Config(format!("panel_width must be positive, got {}", self.panel_width)));
        }
        if self.nodes_per_panel < 4 {
            return Err(Error::Config(format!(
                "nodes_per_panel must be at least 4, got {}",
                self.nodes_per_panel
            )));
        }
        if !(self.refinement_tolerance > 0.0) {
            return Err(Error::Config(format!(
                "refinement_tolerance must be positive, got {}",
                self.refinement_tolerance
            )));
        }
        if self.max_panels == 0 {
            return Err(Error::Config("max_panels must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lhs,
    Rhs,
}

/// What one integral cost and how accurate it claims to be.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadDiag {
    /// Leaf panels after refinement.
    pub panels: usize,
    /// Initial panels that needed at least one bisection.
    pub refined: usize,
    pub error_estimate: f64,
    /// Location of the panel with the largest error estimate.
    pub worst_lo: f64,
    pub worst_hi: f64,
}

impl QuadDiag {
    fn empty() -> Self {
        Self {
            panels: 0,
            refined: 0,
            error_estimate: 0.0,
            worst_lo: 0.0,
            worst_hi: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    #[serde(rename = "T")]
    pub t_max: f64,
    pub shifts: ShiftPair,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: Complex64,
    pub normalizer: f64,
    pub normalized_residual: f64,
    pub u: f64,
    pub v: f64,
    pub hypothesis_ok: bool,
    pub lhs_diag: QuadDiag,
    pub rhs_diag: QuadDiag,
}

/// `zeta(1/2 + a + it) zeta(1/2 - b - it)`.
pub fn integrand_lhs(shifts: &ShiftPair, t: f64, policy: &EvalPolicy) -> Result<Complex64> {
    let first = zeta(Complex64::new(0.5, t) + shifts.a, policy)?;
    let second = zeta(Complex64::new(0.5, -t) - shifts.b, policy)?;
    Ok(first * second)
}

/// Right-hand integrand with the `t`-independent zeta values evaluated once.
#[derive(Debug, Clone, Copy)]
pub struct RhsIntegrand {
    shifts: ShiftPair,
    /// `zeta(1 + c) - 1/c` and `zeta(1 - c) + 1/c`; unused on the limit branch.
    r_plus: Complex64,
    r_minus: Complex64,
    limit: bool,
}

impl RhsIntegrand {
    pub fn new(shifts: &ShiftPair, policy: &EvalPolicy) -> Result<Self> {
        let c = shifts.c;
        let limit = c.norm() < LIMIT_THRESHOLD;
        let (r_plus, r_minus) = if c == Complex64::new(0.0, 0.0) {
            let g = Complex64::new(euler_gamma(), 0.0);
            (g, g)
        } else {
            (zeta_regular_at_one(c, policy)?, zeta_regular_at_one(-c, policy)?)
        };
        Ok(Self {
            shifts: *shifts,
            r_plus,
            r_minus,
            limit,
        })
    }

    pub fn eval(&self, t: f64) -> Result<Complex64> {
        if self.limit {
            self.eval_limit(t)
        } else {
            self.eval_direct(t)
        }
    }

    /// `zeta(1 + c) + zeta(1 - c) P` with `P` the chi-product. The `1/c`
    /// poles cancel analytically: the value is `r(c) + r(-c) P + (1 - P)/c`.
    pub fn eval_direct(&self, t: f64) -> Result<Complex64> {
        let c = self.shifts.c;
        if c == Complex64::new(0.0, 0.0) {
            return Err(Error::Domain {
                func: "integrand_rhs",
                reason: "the displayed form needs c != 0".into(),
            });
        }
        let log_p = log_chi_ratio(Complex64::new(0.5, t) + self.shifts.b, c)?;
        let p = chi_product_exact(&self.shifts, t)?;
        Ok(self.r_plus + self.r_minus * p - expm1(log_p) / c)
    }

    /// Second-order expansion in `c` around the pointwise limit
    /// `2 gamma - L1`, where `L1`, `L2` are the first two derivatives of
    /// `log chi` at `1/2 - a - it`.
    pub fn eval_limit(&self, t: f64) -> Result<Complex64> {
        let c = self.shifts.c;
        let w = Complex64::new(0.5, -t) - self.shifts.a;
        let (l1, l2) = log_chi_derivatives(w)?;
        let g = euler_gamma();
        let m0 = 2.0 * g - l1;
        let m1 = g * l1 - (l1 * l1 + l2) * 0.5;
        // the third derivative of log chi enters only at c^2 with weight 1/6
        let m2 = STIELTJES_2 + STIELTJES_1 * l1 + (l1 * l1 + l2) * (0.5 * g)
            - (l1 * l1 * l1 + 3.0 * l1 * l2) / 6.0;
        Ok(m0 + c * (m1 + c * m2))
    }
}

/// `zeta(1 + c) + zeta(1 - c) chi(1/2 + a + it) chi(1/2 - b - it)`, read as
/// its limit when `c = 0`.
pub fn integrand_rhs(shifts: &ShiftPair, t: f64) -> Result<Complex64> {
    if t < 0.0 {
        return Err(Error::Domain {
            func: "integrand_rhs",
            reason: format!("t = {t} is negative"),
        });
    }
    RhsIntegrand::new(shifts, &EvalPolicy::default())?.eval(t)
}

struct Rule {
    pairs: Vec<(f64, f64)>,
}

impl Rule {
    fn new(nodes: usize) -> Result<Self> {
        let gl = GaussLegendre::new(nodes)
            .map_err(|e| Error::Config(format!("Gauss-Legendre rule with {nodes} nodes: {e}")))?;
        Ok(Self {
            pairs: gl.as_node_weight_pairs().to_vec(),
        })
    }

    /// Value on `[lo, hi]` and the sum of `|w f|`, a scale for rounding noise.
    fn apply<F>(&self, f: &F, lo: f64, hi: f64) -> Result<(Complex64, f64)>
    where
        F: Fn(f64) -> Result<Complex64>,
    {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut acc = ComplexSum::new();
        let mut scale = 0.0;
        for &(x, w) in &self.pairs {
            let v = f(mid + half * x)? * (w * half);
            scale += v.norm();
            acc.add(v);
        }
        Ok((acc.value(), scale))
    }
}

#[derive(Debug, Clone, Copy)]
struct Leaf {
    value: Complex64,
    err: f64,
    panels: usize,
    worst: (f64, f64, f64),
    converged: bool,
}

impl Leaf {
    fn join(a: Leaf, b: Leaf) -> Leaf {
        let worst = if a.worst.2 >= b.worst.2 { a.worst } else { b.worst };
        Leaf {
            value: a.value + b.value,
            err: a.err + b.err,
            panels: a.panels + b.panels,
            worst,
            converged: a.converged && b.converged,
        }
    }
}

/// One panel: compare the rule on `[lo, hi]` with the rule on the two halves.
fn compare_halves<F>(f: &F, rule: &Rule, lo: f64, hi: f64, whole: Complex64) -> Result<(Leaf, Complex64, Complex64)>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let mid = 0.5 * (lo + hi);
    let (left, sl) = rule.apply(f, lo, mid)?;
    let (right, sr) = rule.apply(f, mid, hi)?;
    let fine = left + right;
    let err = (whole - fine).norm() + 16.0 * f64::EPSILON * (sl + sr);
    Ok((
        Leaf {
            value: fine,
            err,
            panels: 1,
            worst: (lo, hi, err),
            converged: true,
        },
        left,
        right,
    ))
}

fn refine<F>(f: &F, rule: &Rule, lo: f64, hi: f64, whole: Complex64, per_unit: f64, depth: u32) -> Result<Leaf>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let (mut leaf, left, right) = compare_halves(f, rule, lo, hi, whole)?;
    if leaf.err <= per_unit * (hi - lo) {
        return Ok(leaf);
    }
    if depth >= MAX_REFINE_DEPTH {
        leaf.converged = false;
        return Ok(leaf);
    }
    let mid = 0.5 * (lo + hi);
    let a = refine(f, rule, lo, mid, left, per_unit, depth + 1)?;
    let b = refine(f, rule, mid, hi, right, per_unit, depth + 1)?;
    Ok(Leaf::join(a, b))
}

/// Integral of `f` over `[lo, hi]`. Panels are evaluated in parallel and
/// summed in index order, so the result is independent of the thread count.
pub fn integrate_fn<F>(f: F, lo: f64, hi: f64, quad: &QuadratureConfig) -> Result<(Complex64, QuadDiag)>
where
    F: Fn(f64) -> Result<Complex64> + Sync,
{
    quad.validate()?;
    if !(lo <= hi) {
        return Err(Error::Domain {
            func: "integrate",
            reason: format!("empty or reversed interval [{lo}, {hi}]"),
        });
    }
    if hi == lo {
        return Ok((Complex64::new(0.0, 0.0), QuadDiag::empty()));
    }
    let len = hi - lo;
    let count = (len / quad.panel_width).ceil().max(1.0);
    if count > quad.max_panels as f64 {
        return Err(Error::BudgetExceeded {
            what: "integrate",
            detail: format!("{count} panels needed, max_panels = {}", quad.max_panels),
        });
    }
    let count = count as usize;
    let rule = Rule::new(quad.nodes_per_panel)?;
    let edge = |k: usize| if k == count { hi } else { lo + len * (k as f64 / count as f64) };

    // first pass: every panel once, to fix the global error budget
    let first: Vec<(Leaf, Complex64, Complex64)> = (0..count)
        .into_par_iter()
        .map(|k| {
            let (a, b) = (edge(k), edge(k + 1));
            let (whole, _) = rule.apply(&f, a, b)?;
            compare_halves(&f, &rule, a, b, whole)
        })
        .collect::<Result<_>>()?;
    let mut provisional = ComplexSum::new();
    for (leaf, _, _) in &first {
        provisional.add(leaf.value);
    }
    let per_unit = quad.refinement_tolerance * (1.0 + provisional.value().norm()) / len;

    let leaves: Vec<(Leaf, bool)> = first
        .into_par_iter()
        .enumerate()
        .map(|(k, (leaf, left, right))| {
            let (a, b) = (edge(k), edge(k + 1));
            if leaf.err <= per_unit * (b - a) {
                return Ok((leaf, false));
            }
            let mid = 0.5 * (a + b);
            let l = refine(&f, &rule, a, mid, left, per_unit, 1)?;
            let r = refine(&f, &rule, mid, b, right, per_unit, 1)?;
            Ok((Leaf::join(l, r), true))
        })
        .collect::<Result<_>>()?;

    let mut total = ComplexSum::new();
    let mut diag = QuadDiag::empty();
    let mut worst = (lo, hi, -1.0);
    let mut converged = true;
    for (leaf, was_refined) in &leaves {
        total.add(leaf.value);
        diag.panels += leaf.panels;
        diag.refined += usize::from(*was_refined);
        diag.error_estimate += leaf.err;
        converged &= leaf.converged;
        if leaf.worst.2 > worst.2 {
            worst = leaf.worst;
        }
    }
    diag.worst_lo = worst.0;
    diag.worst_hi = worst.1;
    let value = total.value();
    // A panel that stalls at the depth limit (usually at the noise floor of
    // the integrand) is tolerated as long as the global estimate still fits.
    let budget = quad.refinement_tolerance * (1.0 + value.norm());
    if !converged && diag.error_estimate > budget {
        return Err(Error::BudgetExceeded {
            what: "integrate",
            detail: format!(
                "refinement stalled after {MAX_REFINE_DEPTH} bisections; total error estimate {:e} over budget {:e}; worst panel [{}, {}] with error estimate {:e}",
                diag.error_estimate, budget, worst.0, worst.1, worst.2
            ),
        });
    }
    if diag.panels > quad.max_panels {
        return Err(Error::BudgetExceeded {
            what: "integrate",
            detail: format!("refinement needed {} panels, max_panels = {}", diag.panels, quad.max_panels),
        });
    }
    Ok((value, diag))
}

/// One side of the moment identity over `[lo, hi]`.
pub fn integrate_range(
    side: Side,
    shifts: &ShiftPair,
    lo: f64,
    hi: f64,
    quad: &QuadratureConfig,
    policy: &EvalPolicy,
) -> Result<(Complex64, QuadDiag)> {
    if lo < 0.0 {
        return Err(Error::Domain {
            func: "integrate",
            reason: format!("lower limit {lo} is negative"),
        });
    }
    match side {
        Side::Lhs => integrate_fn(|t| integrand_lhs(shifts, t, policy), lo, hi, quad),
        Side::Rhs => {
            let rhs = RhsIntegrand::new(shifts, policy)?;
            integrate_fn(|t| rhs.eval(t), lo, hi, quad)
        }
    }
}

/// One side of the moment identity over `[0, T]`; `T = 0` gives zero.
pub fn integrate(
    side: Side,
    shifts: &ShiftPair,
    t_max: f64,
    quad: &QuadratureConfig,
    policy: &EvalPolicy,
) -> Result<(Complex64, QuadDiag)> {
    integrate_range(side, shifts, 0.0, t_max, quad, policy)
}

/// `log max(h, T) / log T`.
fn height_exponent(h: f64, t_max: f64) -> f64 {
    h.abs().max(t_max).ln() / t_max.ln()
}

pub fn theorem_report(
    shifts: &ShiftPair,
    t_max: f64,
    quad: &QuadratureConfig,
    policy: &EvalPolicy,
) -> Result<MomentReport> {
    theorem_report_with(shifts, t_max, quad, policy, DEFAULT_HYPOTHESIS_CONSTANT)
}

/// As [`theorem_report`], with `H` in the hypothesis `|Re a|, |Re b| <= H / log T`.
pub fn theorem_report_with(
    shifts: &ShiftPair,
    t_max: f64,
    quad: &QuadratureConfig,
    policy: &EvalPolicy,
    hypothesis_constant: f64,
) -> Result<MomentReport> {
    if !(t_max >= 2.0) {
        return Err(Error::Domain {
            func: "theorem_report",
            reason: format!("T = {t_max} is below 2"),
        });
    }
    let (lhs, lhs_diag) = integrate(Side::Lhs, shifts, t_max, quad, policy)?;
    let (rhs, rhs_diag) = integrate(Side::Rhs, shifts, t_max, quad, policy)?;
    let residual = lhs - rhs;
    let log_t = t_max.ln();
    let normalizer =
        (t_max.sqrt() + shifts.alpha_p.abs().sqrt() + shifts.beta_p.abs().sqrt()) * log_t * log_t;
    let bound = hypothesis_constant / log_t;
    Ok(MomentReport {
        t_max,
        shifts: *shifts,
        lhs,
        rhs,
        residual,
        normalizer,
        normalized_residual: residual.norm() / normalizer,
        u: height_exponent(shifts.alpha_p, t_max),
        v: height_exponent(shifts.beta_p, t_max),
        hypothesis_ok: shifts.alpha.abs() <= bound && shifts.beta.abs() <= bound,
        lhs_diag,
        rhs_diag,
    })
}

/// The classical main term `T log(T / 2 pi) + (2 gamma - 1) T` of the
/// unshifted second moment.
pub fn classical_main_term(t_max: f64) -> f64 {
    t_max * (t_max / (2.0 * PI)).ln() + (2.0 * euler_gamma() - 1.0) * t_max
}
