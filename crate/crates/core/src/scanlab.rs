//! Grid experiments over heights and shifts, power-law fits of the observed
//! errors, and CSV/JSON persistence with replayable manifests.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::chiprod::chi_product_report;
use crate::complexfn::EvalPolicy;
use crate::divisor::{lemma1_report_with, Lemma1Config, ShiftPair};
use crate::moment::{theorem_report_with, QuadratureConfig};
use crate::{Error, Result};

pub const CSV_HEADER: &str = "kind,T,x,alpha,alpha_p,beta,beta_p,gamma,gamma_p,lhs_re,lhs_im,rhs_re,rhs_im,\
residual_abs,normalizer,normalized_residual,in_hypothesis,quad_error_est,wall_time_s";

/// Largest imaginary-shift exponent inside the theorem's regime.
pub const THEOREM_MAX_EXPONENT: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordKind {
    Lemma1,
    Lemma2,
    Theorem,
}

impl RecordKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RecordKind::Lemma1 => "lemma1",
            RecordKind::Lemma2 => "lemma2",
            RecordKind::Theorem => "theorem",
        }
    }
}

impl std::str::FromStr for RecordKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lemma1" => Ok(RecordKind::Lemma1),
            "lemma2" => Ok(RecordKind::Lemma2),
            "theorem" => Ok(RecordKind::Theorem),
            other => Err(Error::Config(format!("unknown record kind `{other}`"))),
        }
    }
}

/// How the shifts at each grid height are produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShiftGenerator {
    /// Explicit `[alpha, alpha', beta, beta']` quadruples, used as given.
    FixedList { shifts: Vec<[f64; 4]> },
    /// `alpha' = T^e`, `beta' = rho T^e` for every exponent `e` and ratio `rho`.
    PowerLaw {
        exponents: Vec<f64>,
        #[serde(default = "default_beta_ratios")]
        beta_ratios: Vec<f64>,
    },
    /// `count` draws per height: real parts uniform in `[-re_max, re_max] / log T`,
    /// imaginary parts uniform in `[-im_max, im_max]` (or log-uniform in
    /// magnitude with a random sign).
    RandomInBox {
        seed: u64,
        count: usize,
        re_max: f64,
        im_max: f64,
        #[serde(default)]
        log_uniform: bool,
    },
}

fn default_beta_ratios() -> Vec<f64> {
    vec![1.0]
}

fn default_re_magnitudes() -> Vec<f64> {
    vec![0.0]
}

fn default_epsilon() -> f64 {
    crate::divisor::DEFAULT_EPSILON
}

fn default_replication() -> usize {
    1
}

fn default_hypothesis_constant() -> f64 {
    crate::divisor::DEFAULT_HYPOTHESIS_CONSTANT
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Heights `T`; also used as `x` for lemma1 and as `t` for lemma2.
    #[serde(rename = "T_values")]
    pub t_values: Vec<f64>,
    pub shift_generator: ShiftGenerator,
    /// Each magnitude `r` adds the real parts `alpha = r / log T`,
    /// `beta = -r / log T` (not applied to fixed lists).
    #[serde(default = "default_re_magnitudes")]
    pub re_shift_magnitudes: Vec<f64>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_replication")]
    pub replication: usize,
    /// `H` in the hypotheses `|Re| <= H / log T`.
    #[serde(default = "default_hypothesis_constant")]
    pub hypothesis_constant: f64,
    /// Allows exponents above 2; such points are flagged out of hypothesis.
    #[serde(default)]
    pub exploratory: bool,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.t_values.is_empty() {
            return Err(Error::Config("T_values is empty".into()));
        }
        if let Some(t) = self.t_values.iter().find(|t| !(**t >= 2.0 && t.is_finite())) {
            return Err(Error::Config(format!("T value {t} is below 2")));
        }
        if self.replication == 0 {
            return Err(Error::Config("replication must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0 / 6.0) {
            return Err(Error::Config(format!("epsilon {} outside (0, 1/6]", self.epsilon)));
        }
        if self.re_shift_magnitudes.is_empty() {
            return Err(Error::Config("re_shift_magnitudes is empty".into()));
        }
        match &self.shift_generator {
            ShiftGenerator::FixedList { shifts } if shifts.is_empty() => {
                Err(Error::Config("fixed shift list is empty".into()))
            }
            ShiftGenerator::PowerLaw { exponents, beta_ratios } => {
                if exponents.is_empty() || beta_ratios.is_empty() {
                    return Err(Error::Config("power_law needs exponents and beta_ratios".into()));
                }
                if !self.exploratory {
                    if let Some(e) = exponents.iter().find(|e| **e > THEOREM_MAX_EXPONENT) {
                        return Err(Error::Config(format!(
                            "exponent {e} exceeds {THEOREM_MAX_EXPONENT}; set exploratory = true to run it"
                        )));
                    }
                }
                Ok(())
            }
            ShiftGenerator::RandomInBox { count, re_max, im_max, .. } => {
                if *count == 0 || !(*re_max >= 0.0) || !(*im_max > 0.0) {
                    return Err(Error::Config("random_in_box needs count >= 1, re_max >= 0, im_max > 0".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self.shift_generator {
            ShiftGenerator::RandomInBox { seed, .. } => Some(seed),
            _ => None,
        }
    }
}

/// Everything a scan needs; stored verbatim in the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub grid: GridSpec,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub policy: EvalPolicy,
    pub kinds: Vec<RecordKind>,
    /// Off by default so that reruns produce byte-identical CSV files.
    #[serde(default)]
    pub record_wall_time: bool,
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.quadrature.validate()?;
        self.policy.validate()?;
        if self.kinds.is_empty() {
            return Err(Error::Config("no record kinds selected".into()));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub kind: RecordKind,
    /// Grid height: `T`, or `x` for lemma1, or `t` for lemma2.
    #[serde(rename = "T")]
    pub t: f64,
    /// NaN except for lemma1.
    pub x: f64,
    pub replica: usize,
    pub shifts: ShiftPair,
    /// Exact side: moment integral, divisor sum, or chi-product.
    pub lhs: Complex64,
    /// Asymptotic side.
    pub rhs: Complex64,
    pub residual_abs: f64,
    pub normalizer: f64,
    pub normalized_residual: f64,
    pub in_hypothesis: bool,
    pub quad_error_est: f64,
    pub wall_time_s: f64,
    pub error: Option<String>,
    pub policy: EvalPolicy,
    pub fingerprint: String,
}

impl ScanRecord {
    /// Numeric column by CSV name, plus a few derived quantities:
    /// `abs_alpha_p`, `abs_beta_p`, `abs_gamma_p`, `shift_height` (`|T + alpha'|`)
    /// and `relative_error` (`residual_abs / |lhs|`).
    pub fn field(&self, name: &str) -> Option<f64> {
        let s = &self.shifts;
        Some(match name {
            "T" => self.t,
            "x" => self.x,
            "alpha" => s.alpha,
            "alpha_p" => s.alpha_p,
            "beta" => s.beta,
            "beta_p" => s.beta_p,
            "gamma" => s.gamma,
            "gamma_p" => s.gamma_p,
            "lhs_re" => self.lhs.re,
            "lhs_im" => self.lhs.im,
            "rhs_re" => self.rhs.re,
            "rhs_im" => self.rhs.im,
            "residual_abs" => self.residual_abs,
            "normalizer" => self.normalizer,
            "normalized_residual" => self.normalized_residual,
            "quad_error_est" => self.quad_error_est,
            "wall_time_s" => self.wall_time_s,
            "abs_alpha_p" => s.alpha_p.abs(),
            "abs_beta_p" => s.beta_p.abs(),
            "abs_gamma_p" => s.gamma_p.abs(),
            "shift_height" => (self.t + s.alpha_p).abs(),
            "relative_error" => self.residual_abs / self.lhs.norm(),
            _ => return None,
        })
    }

    fn sort_key(&self) -> [f64; 5] {
        let s = &self.shifts;
        [self.t, s.alpha, s.alpha_p, s.beta, s.beta_p]
    }
}

struct Point {
    t: f64,
    replica: usize,
    shifts: ShiftPair,
    /// Imaginary shift exponent, when the generator has one.
    exponent: Option<f64>,
}

fn enumerate_points(grid: &GridSpec) -> Vec<Point> {
    let mut out = Vec::new();
    let mut rng = grid.seed().map(ChaCha8Rng::seed_from_u64);
    for replica in 0..grid.replication {
        for &t in &grid.t_values {
            let log_t = t.ln();
            match &grid.shift_generator {
                ShiftGenerator::FixedList { shifts } => {
                    for q in shifts {
                        out.push(Point {
                            t,
                            replica,
                            shifts: ShiftPair::from_parts(q[0], q[1], q[2], q[3]),
                            exponent: None,
                        });
                    }
                }
                ShiftGenerator::PowerLaw { exponents, beta_ratios } => {
                    for &r in &grid.re_shift_magnitudes {
                        for &e in exponents {
                            for &rho in beta_ratios {
                                let h = t.powf(e);
                                out.push(Point {
                                    t,
                                    replica,
                                    shifts: ShiftPair::from_parts(r / log_t, h, 0.0 - r / log_t, rho * h),
                                    exponent: Some(e),
                                });
                            }
                        }
                    }
                }
                ShiftGenerator::RandomInBox {
                    count,
                    re_max,
                    im_max,
                    log_uniform,
                    ..
                } => {
                    let rng = rng.as_mut().expect("random generator carries a seed");
                    for _ in 0..*count {
                        let im = |rng: &mut ChaCha8Rng| {
                            if *log_uniform {
                                let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                                sign * rng.gen_range(0.0..=im_max.ln().max(0.0)).exp()
                            } else {
                                rng.gen_range(-im_max..=*im_max)
                            }
                        };
                        let alpha = rng.gen_range(-re_max..=*re_max) / log_t;
                        let alpha_p = im(rng);
                        let beta = rng.gen_range(-re_max..=*re_max) / log_t;
                        let beta_p = im(rng);
                        out.push(Point {
                            t,
                            replica,
                            shifts: ShiftPair::from_parts(alpha, alpha_p, beta, beta_p),
                            exponent: None,
                        });
                    }
                }
            }
        }
    }
    out
}

fn error_record(kind: RecordKind, p: &Point, x: f64, err: &Error, cfg: &ScanConfig, fp: &str) -> ScanRecord {
    let nan = Complex64::new(f64::NAN, f64::NAN);
    ScanRecord {
        kind,
        t: p.t,
        x,
        replica: p.replica,
        shifts: p.shifts,
        lhs: nan,
        rhs: nan,
        residual_abs: f64::NAN,
        normalizer: f64::NAN,
        normalized_residual: f64::NAN,
        in_hypothesis: false,
        quad_error_est: f64::NAN,
        wall_time_s: 0.0,
        error: Some(err.to_string()),
        policy: cfg.policy,
        fingerprint: fp.to_string(),
    }
}

fn evaluate(kind: RecordKind, p: &Point, cfg: &ScanConfig, fp: &str) -> ScanRecord {
    let grid = &cfg.grid;
    let start = Instant::now();
    let x = if kind == RecordKind::Lemma1 { p.t } else { f64::NAN };
    let exploratory = p.exponent.is_some_and(|e| e > THEOREM_MAX_EXPONENT);
    let result = match kind {
        RecordKind::Lemma1 => {
            let lcfg = Lemma1Config {
                epsilon: grid.epsilon,
                hypothesis_constant: grid.hypothesis_constant,
            };
            lemma1_report_with(p.t, p.shifts.c, &lcfg, &cfg.policy).map(|r| {
                (r.exact, r.main_term, r.residual.norm(), r.normalizer, r.normalized_residual, r.hypothesis_ok, f64::NAN)
            })
        }
        RecordKind::Lemma2 => chi_product_report(&p.shifts, p.t, crate::chiprod::DEFAULT_ERROR_CONSTANT).map(|r| {
            // normalized by |exact| |c| / |t + alpha'|, so the ratio is the empirical K
            let residual = (r.exact - r.lemma2_value).norm();
            let normalizer = r.exact.norm() * p.shifts.c.norm() / (p.t + p.shifts.alpha_p).abs();
            let normalized = if residual == 0.0 { 0.0 } else { residual / normalizer };
            (r.exact, r.lemma2_value, residual, normalizer, normalized, r.in_domain, f64::NAN)
        }),
        RecordKind::Theorem => theorem_report_with(
            &p.shifts,
            p.t,
            &cfg.quadrature,
            &cfg.policy,
            grid.hypothesis_constant,
        )
        .map(|r| {
            (
                r.lhs,
                r.rhs,
                r.residual.norm(),
                r.normalizer,
                r.normalized_residual,
                r.hypothesis_ok,
                r.lhs_diag.error_estimate + r.rhs_diag.error_estimate,
            )
        }),
    };
    let wall = if cfg.record_wall_time {
        start.elapsed().as_secs_f64()
    } else {
        0.0
    };
    match result {
        Ok((lhs, rhs, residual_abs, normalizer, normalized_residual, ok, quad)) => ScanRecord {
            kind,
            t: p.t,
            x,
            replica: p.replica,
            shifts: p.shifts,
            lhs,
            rhs,
            residual_abs,
            normalizer,
            normalized_residual,
            in_hypothesis: ok && !exploratory,
            quad_error_est: quad,
            wall_time_s: wall,
            error: None,
            policy: cfg.policy,
            fingerprint: fp.to_string(),
        },
        Err(e) => {
            let mut r = error_record(kind, p, x, &e, cfg, fp);
            r.wall_time_s = wall;
            r
        }
    }
}

/// Runs every grid point for `kind`. Point failures become records with an
/// error message; only an invalid configuration fails the whole scan.
pub fn run_scan(cfg: &ScanConfig, kind: RecordKind) -> Result<Vec<ScanRecord>> {
    cfg.validate()?;
    let fp = cfg.fingerprint();
    let points = enumerate_points(&cfg.grid);
    let mut records: Vec<ScanRecord> = points.par_iter().map(|p| evaluate(kind, p, cfg, &fp)).collect();
    records.sort_by(|a, b| {
        let (ka, kb) = (a.sort_key(), b.sort_key());
        ka.iter()
            .zip(kb.iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
            .then(a.replica.cmp(&b.replica))
    });
    Ok(records)
}

/// All configured kinds, in configuration order.
pub fn run_all(cfg: &ScanConfig) -> Result<Vec<ScanRecord>> {
    let mut out = Vec::new();
    for &kind in &cfg.kinds {
        out.extend(run_scan(cfg, kind)?);
    }
    Ok(out)
}

fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v:.16e}")
    }
}

pub fn csv_row(r: &ScanRecord) -> String {
    let s = &r.shifts;
    let nums = [
        r.t, r.x, s.alpha, s.alpha_p, s.beta, s.beta_p, s.gamma, s.gamma_p, r.lhs.re, r.lhs.im, r.rhs.re,
        r.rhs.im, r.residual_abs, r.normalizer, r.normalized_residual,
    ];
    let mut row = String::from(r.kind.as_str());
    for v in nums {
        row.push(',');
        row.push_str(&fmt_f64(v));
    }
    let _ = write!(
        row,
        ",{},{},{}",
        r.in_hypothesis,
        fmt_f64(r.quad_error_est),
        fmt_f64(r.wall_time_s)
    );
    row
}

pub fn to_csv(records: &[ScanRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&csv_row(r));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointError {
    pub kind: RecordKind,
    #[serde(rename = "T")]
    pub t: f64,
    pub shifts: ShiftPair,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub config: ScanConfig,
    pub seed: Option<u64>,
    pub fingerprint: String,
    pub csv_file: String,
    pub record_count: usize,
    pub errors: Vec<PointError>,
}

impl RunManifest {
    pub fn new(cfg: &ScanConfig, records: &[ScanRecord], csv_file: &str) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: cfg.clone(),
            seed: cfg.grid.seed(),
            fingerprint: cfg.fingerprint(),
            csv_file: csv_file.to_string(),
            record_count: records.len(),
            errors: records
                .iter()
                .filter_map(|r| {
                    r.error.as_ref().map(|m| PointError {
                        kind: r.kind,
                        t: r.t,
                        shifts: r.shifts,
                        message: m.clone(),
                    })
                })
                .collect(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

/// Files written by [`write_outputs`].
#[derive(Debug, Clone)]
pub struct OutputPaths {
    pub csv: PathBuf,
    pub manifest: PathBuf,
}

/// Writes `<stem>.csv` and `<stem>.manifest.json` into `dir`.
pub fn write_outputs(dir: &Path, stem: &str, cfg: &ScanConfig, records: &[ScanRecord]) -> Result<OutputPaths> {
    fs::create_dir_all(dir)?;
    let csv_name = format!("{stem}.csv");
    let csv = dir.join(&csv_name);
    let manifest = dir.join(format!("{stem}.manifest.json"));
    fs::write(&csv, to_csv(records))?;
    let m = RunManifest::new(cfg, records, &csv_name);
    let json = serde_json::to_string_pretty(&m).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(&manifest, json + "\n")?;
    Ok(OutputPaths { csv, manifest })
}

/// Reruns the scan described by a manifest.
pub fn replay(manifest: &RunManifest) -> Result<Vec<ScanRecord>> {
    if manifest.config.fingerprint() != manifest.fingerprint {
        return Err(Error::Config("manifest fingerprint does not match its configuration".into()));
    }
    run_all(&manifest.config)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

/// Least-squares fit of `log y = intercept + slope log x`.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<FitResult> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = pts.len();
    if n < 3 {
        return Err(Error::InsufficientData { needed: 3, got: n });
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx <= f64::EPSILON * f64::EPSILON * mx.abs().max(1.0) {
        return Err(Error::DegenerateFit);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    // flat data is fitted perfectly by a zero slope
    let r_squared = if syy <= 1e-30 { 1.0 } else { (1.0 - ss_res / syy).clamp(0.0, 1.0) };
    Ok(FitResult {
        slope,
        intercept,
        r_squared,
        n_points: n,
    })
}

/// Fits `y_field` against `x_field` over records where both are positive.
pub fn fit_error_exponent(records: &[ScanRecord], x_field: &str, y_field: &str) -> Result<FitResult> {
    let mut xs = Vec::with_capacity(records.len());
    let mut ys = Vec::with_capacity(records.len());
    for r in records {
        let x = r
            .field(x_field)
            .ok_or_else(|| Error::Config(format!("unknown field `{x_field}`")))?;
        let y = r
            .field(y_field)
            .ok_or_else(|| Error::Config(format!("unknown field `{y_field}`")))?;
        xs.push(x);
        ys.push(y);
    }
    fit_power_law(&xs, &ys)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorstPoint {
    #[serde(rename = "T")]
    pub t: f64,
    pub shifts: ShiftPair,
    pub normalized_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KindSummary {
    pub kind: RecordKind,
    pub records: usize,
    pub failed: usize,
    pub max_normalized: f64,
    pub median_normalized: f64,
    /// Theorem records only: the maximum of the normalized residual with the
    /// `log^2 T` factor taken back out of the normalizer.
    pub max_without_log2: Option<f64>,
    pub hypothesis_violations: usize,
    pub worst: Option<WorstPoint>,
}

/// One block per kind present, in kind order.
pub fn summarize(records: &[ScanRecord]) -> Result<Vec<KindSummary>> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut kinds: Vec<RecordKind> = records.iter().map(|r| r.kind).collect();
    kinds.sort();
    kinds.dedup();
    Ok(kinds
        .into_iter()
        .map(|kind| {
            let group: Vec<&ScanRecord> = records.iter().filter(|r| r.kind == kind).collect();
            let ok: Vec<&&ScanRecord> = group.iter().filter(|r| r.normalized_residual.is_finite()).collect();
            let mut vals: Vec<f64> = ok.iter().map(|r| r.normalized_residual).collect();
            vals.sort_by(f64::total_cmp);
            let median = match vals.len() {
                0 => f64::NAN,
                n if n % 2 == 1 => vals[n / 2],
                n => 0.5 * (vals[n / 2 - 1] + vals[n / 2]),
            };
            let worst = ok
                .iter()
                .max_by(|a, b| a.normalized_residual.total_cmp(&b.normalized_residual))
                .map(|r| WorstPoint {
                    t: r.t,
                    shifts: r.shifts,
                    normalized_residual: r.normalized_residual,
                });
            let max_without_log2 = (kind == RecordKind::Theorem).then(|| {
                ok.iter()
                    .map(|r| r.normalized_residual * r.t.ln().powi(2))
                    .fold(f64::NAN, f64::max)
            });
            KindSummary {
                kind,
                records: group.len(),
                failed: group.iter().filter(|r| r.error.is_some()).count(),
                max_normalized: vals.last().copied().unwrap_or(f64::NAN),
                median_normalized: median,
                max_without_log2,
                hypothesis_violations: group.iter().filter(|r| r.error.is_none() && !r.in_hypothesis).count(),
                worst,
            }
        })
        .collect())
}

pub fn format_summary(blocks: &[KindSummary]) -> String {
    let mut out = String::new();
    for b in blocks {
        let _ = writeln!(out, "[{}] records={} failed={}", b.kind.as_str(), b.records, b.failed);
        let _ = writeln!(
            out,
            "  normalized residual: max={:.4e} median={:.4e}",
            b.max_normalized, b.median_normalized
        );
        if let Some(v) = b.max_without_log2 {
            let _ = writeln!(out, "  without log^2 T: max={v:.4e}");
        }
        let _ = writeln!(out, "  hypothesis violations: {}", b.hypothesis_violations);
        if let Some(w) = &b.worst {
            let _ = writeln!(
                out,
                "  worst: T={} a={}{:+}i b={}{:+}i -> {:.4e}",
                w.t, w.shifts.alpha, w.shifts.alpha_p, w.shifts.beta, w.shifts.beta_p, w.normalized_residual
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_config(generator: ShiftGenerator, t_values: Vec<f64>, kinds: Vec<RecordKind>) -> ScanConfig {
        ScanConfig {
            grid: GridSpec {
                t_values,
                shift_generator: generator,
                re_shift_magnitudes: vec![0.0],
                epsilon: 0.05,
                replication: 1,
                hypothesis_constant: 2.0,
                exploratory: false,
            },
            quadrature: QuadratureConfig::default(),
            policy: EvalPolicy::default(),
            kinds,
            record_wall_time: false,
        }
    }

    fn synthetic(kind: RecordKind, t: f64, normalized: f64, ok: bool) -> ScanRecord {
        ScanRecord {
            kind,
            t,
            x: t,
            replica: 0,
            shifts: ShiftPair::from_parts(0.0, 0.0, 0.0, 0.0),
            lhs: Complex64::new(1.0, 0.0),
            rhs: Complex64::new(1.0, 0.0),
            residual_abs: normalized,
            normalizer: 1.0,
            normalized_residual: normalized,
            in_hypothesis: ok,
            quad_error_est: f64::NAN,
            wall_time_s: 0.0,
            error: None,
            policy: EvalPolicy::default(),
            fingerprint: String::new(),
        }
    }

    #[test]
    fn single_point_cardinality() {
        let cfg = quick_config(
            ShiftGenerator::FixedList {
                shifts: vec![[0.0, 0.0, 0.0, 0.0]],
            },
            vec![100.0],
            vec![RecordKind::Lemma2],
        );
        assert_eq!(run_scan(&cfg, RecordKind::Lemma2).unwrap().len(), 1);
    }

    #[test]
    fn power_law_cardinality() {
        let cfg = quick_config(
            ShiftGenerator::PowerLaw {
                exponents: vec![1.0, 1.5, 1.8],
                beta_ratios: vec![1.0],
            },
            vec![100.0, 200.0, 300.0, 400.0],
            vec![RecordKind::Theorem],
        );
        assert_eq!(enumerate_points(&cfg.grid).len(), 12);
        let mut cfg = cfg;
        cfg.grid.replication = 2;
        cfg.grid.re_shift_magnitudes = vec![0.0, 1.0];
        assert_eq!(enumerate_points(&cfg.grid).len(), 48);
    }

    #[test]
    fn exponent_ceiling() {
        let mut cfg = quick_config(
            ShiftGenerator::PowerLaw {
                exponents: vec![2.5],
                beta_ratios: vec![1.0],
            },
            vec![100.0],
            vec![RecordKind::Lemma2],
        );
        assert!(cfg.validate().is_err());
        cfg.grid.exploratory = true;
        let recs = run_scan(&cfg, RecordKind::Lemma2).unwrap();
        assert!(!recs[0].in_hypothesis);
    }

    #[test]
    fn seeded_scans_are_identical() {
        let cfg = quick_config(
            ShiftGenerator::RandomInBox {
                seed: 7,
                count: 5,
                re_max: 1.0,
                im_max: 1e3,
                log_uniform: true,
            },
            vec![1e3, 2e4],
            vec![RecordKind::Lemma1, RecordKind::Lemma2],
        );
        let a = to_csv(&run_all(&cfg).unwrap());
        let b = to_csv(&run_all(&cfg).unwrap());
        assert_eq!(a, b);
        assert_eq!(a.lines().count(), 1 + 20);
        assert_eq!(a.lines().next().unwrap(), CSV_HEADER);
    }

    #[test]
    fn errors_become_records() {
        // c = 1 is the pole of the divisor main term
        let cfg = quick_config(
            ShiftGenerator::FixedList {
                shifts: vec![[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 0.0]],
            },
            vec![100.0],
            vec![RecordKind::Lemma1],
        );
        let recs = run_scan(&cfg, RecordKind::Lemma1).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs.iter().filter(|r| r.error.is_some()).count(), 1);
        let m = RunManifest::new(&cfg, &recs, "x.csv");
        assert_eq!(m.errors.len(), 1);
        assert!(to_csv(&recs).contains("NaN"));
    }

    #[test]
    fn records_sorted_by_height_and_shift() {
        let cfg = quick_config(
            ShiftGenerator::FixedList {
                shifts: vec![[0.0, 5.0, 0.0, 0.0], [0.0, -5.0, 0.0, 0.0]],
            },
            vec![300.0, 100.0],
            vec![RecordKind::Lemma2],
        );
        let recs = run_scan(&cfg, RecordKind::Lemma2).unwrap();
        let keys: Vec<(f64, f64)> = recs.iter().map(|r| (r.t, r.shifts.alpha_p)).collect();
        assert_eq!(keys, vec![(100.0, -5.0), (100.0, 5.0), (300.0, -5.0), (300.0, 5.0)]);
    }

    #[test]
    fn fits() {
        let xs: Vec<f64> = (1..=6).map(|k| 10f64.powi(k)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.sqrt()).collect();
        let f = fit_power_law(&xs, &ys).unwrap();
        assert!((f.slope - 0.5).abs() < 1e-9);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-9);
        let flat = fit_power_law(&xs, &[7.0; 6]).unwrap();
        assert!(flat.slope.abs() < 1e-9);
        assert!(matches!(
            fit_power_law(&[1.0, 2.0], &[1.0, 2.0]),
            Err(Error::InsufficientData { needed: 3, got: 2 })
        ));
        assert!(matches!(fit_power_law(&[5.0; 4], &[1.0, 2.0, 3.0, 4.0]), Err(Error::DegenerateFit)));
    }

    #[test]
    fn lemma2_slope_from_records() {
        let shifts: Vec<[f64; 4]> = vec![[0.01, 0.0, 0.0, 0.0]];
        let cfg = quick_config(
            ShiftGenerator::FixedList { shifts },
            vec![1e2, 1e3, 1e4, 1e5, 1e6],
            vec![RecordKind::Lemma2],
        );
        let recs = run_scan(&cfg, RecordKind::Lemma2).unwrap();
        let f = fit_error_exponent(&recs, "shift_height", "relative_error").unwrap();
        assert!((f.slope + 1.0).abs() < 0.15, "slope {}", f.slope);
        assert!(fit_error_exponent(&recs, "nope", "T").is_err());
    }

    #[test]
    fn summaries() {
        let one = vec![synthetic(RecordKind::Theorem, 100.0, 0.3, true)];
        let s = summarize(&one).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].max_normalized, 0.3);
        assert_eq!(s[0].median_normalized, 0.3);

        let mixed = vec![
            synthetic(RecordKind::Lemma1, 1e3, 0.1, true),
            synthetic(RecordKind::Lemma1, 1e4, 0.2, false),
            synthetic(RecordKind::Lemma2, 1e3, 0.5, true),
        ];
        let s = summarize(&mixed).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].hypothesis_violations, 1);
        assert_eq!(s[0].worst.unwrap().t, 1e4);
        assert!((s[0].median_normalized - 0.15).abs() < 1e-15);
        assert!(format_summary(&s).contains("[lemma2]"));
        assert!(matches!(summarize(&[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn manifest_round_trip_and_replay() {
        let cfg = quick_config(
            ShiftGenerator::RandomInBox {
                seed: 11,
                count: 3,
                re_max: 1.0,
                im_max: 50.0,
                log_uniform: false,
            },
            vec![500.0],
            vec![RecordKind::Lemma1],
        );
        let dir = tempfile::tempdir().unwrap();
        let recs = run_all(&cfg).unwrap();
        let paths = write_outputs(dir.path(), "run", &cfg, &recs).unwrap();
        let m = RunManifest::load(&paths.manifest).unwrap();
        assert_eq!(m.config, cfg);
        assert_eq!(m.seed, Some(11));
        let again = replay(&m).unwrap();
        assert_eq!(to_csv(&again), fs::read_to_string(&paths.csv).unwrap());
    }
}
