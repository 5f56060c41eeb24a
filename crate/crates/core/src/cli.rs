//! The `zml` command-line driver.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or configuration
//! error, 3 budget or runtime error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chiprod::{chi_product_report, DEFAULT_ERROR_CONSTANT};
use crate::complexfn::{selftest, EvalPolicy, ZetaMethod};
use crate::divisor::{dsum_pairs, lemma1_report_with, Lemma1Config, ShiftPair, PAIRS_MAX_X};
use crate::moment::{theorem_report_with, QuadratureConfig};
use crate::scanlab::{
    self, format_summary, replay, run_all, summarize, write_outputs, GridSpec, RecordKind, RunManifest,
    ScanConfig, ScanRecord, ShiftGenerator,
};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// Relative agreement required between `dsum_fast` and the pair oracle.
const ORACLE_TOLERANCE: f64 = 1e-11;

#[derive(Debug, Parser)]
#[command(name = "zml", version, about = "Numerical checks for the shifted second moment of zeta")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the special-function identity suite.
    Selftest(SelftestArgs),
    /// Shifted divisor sum D_c(x) against its asymptotic main term.
    Dsum(DsumArgs),
    /// Chi-product and its large-height approximation at one or more heights.
    Chiprod(ChiprodArgs),
    /// Both sides of the shifted second-moment formula up to height T.
    Moment(MomentArgs),
    /// Grid scan driven by a TOML configuration.
    Scan(ScanArgs),
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Seed for the random sample points.
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
    /// Random strip points per sampled identity.
    #[arg(long, default_value_t = 40)]
    pub samples: usize,
    /// Replace the Euler-Mascheroni constant (fault injection for tests).
    #[arg(long, hide = true, allow_negative_numbers = true)]
    pub perturb_euler_gamma: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ShiftArgs {
    /// Real part of the shift a.
    #[arg(long = "are", visible_alias = "a", default_value_t = 0.0, allow_negative_numbers = true)]
    pub are: f64,
    /// Imaginary part of the shift a.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub aim: f64,
    /// Real part of the shift b.
    #[arg(long = "bre", visible_alias = "b", default_value_t = 0.0, allow_negative_numbers = true)]
    pub bre: f64,
    /// Imaginary part of the shift b.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub bim: f64,
}

impl ShiftArgs {
    fn pair(&self) -> ShiftPair {
        ShiftPair::from_parts(self.are, self.aim, self.bre, self.bim)
    }
}

#[derive(Debug, Args)]
pub struct DsumArgs {
    /// Summation limit x (at least 2).
    #[arg(long)]
    pub x: f64,
    /// Real part of the shift c.
    #[arg(long = "cre", visible_alias = "c", default_value_t = 0.0, allow_negative_numbers = true)]
    pub cre: f64,
    /// Imaginary part of the shift c.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub cim: f64,
    /// Exponent slack in the normalizer x^(1/3 + epsilon).
    #[arg(long, default_value_t = crate::divisor::DEFAULT_EPSILON)]
    pub epsilon: f64,
    /// Constant H in the hypothesis |Re c| <= H / log x.
    #[arg(long = "hypothesis-constant", default_value_t = crate::divisor::DEFAULT_HYPOTHESIS_CONSTANT)]
    pub hypothesis_constant: f64,
    /// Also evaluate the pair-enumeration oracle (x up to 1e6) and compare.
    #[arg(long)]
    pub oracle: bool,
    /// Write the report as a one-row CSV file.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ChiprodArgs {
    #[command(flatten)]
    pub shifts: ShiftArgs,
    /// Heights t, comma separated.
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub t: Vec<f64>,
    /// Constant K in the error budget K |c| / |t + alpha'|.
    #[arg(long, default_value_t = DEFAULT_ERROR_CONSTANT)]
    pub k: f64,
}

#[derive(Debug, Args)]
pub struct QuadArgs {
    /// Initial panel width.
    #[arg(long)]
    pub panel_width: Option<f64>,
    /// Gauss-Legendre nodes per panel.
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Refinement tolerance, relative to 1 + |integral|.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Ceiling on the number of panels after refinement.
    #[arg(long)]
    pub max_panels: Option<usize>,
    /// Zeta evaluator: auto, euler_maclaurin or riemann_siegel.
    #[arg(long, value_parser = parse_method)]
    pub method: Option<ZetaMethod>,
}

impl QuadArgs {
    fn apply(&self, quad: &mut QuadratureConfig, policy: &mut EvalPolicy) {
        if let Some(v) = self.panel_width {
            quad.panel_width = v;
        }
        if let Some(v) = self.nodes {
            quad.nodes_per_panel = v;
        }
        if let Some(v) = self.tol {
            quad.refinement_tolerance = v;
        }
        if let Some(v) = self.max_panels {
            quad.max_panels = v;
        }
        if let Some(m) = self.method {
            policy.method = m;
        }
    }
}

fn parse_method(s: &str) -> Result<ZetaMethod, String> {
    match s {
        "auto" => Ok(ZetaMethod::Auto),
        "euler_maclaurin" | "em" => Ok(ZetaMethod::EulerMaclaurin),
        "riemann_siegel" | "rs" => Ok(ZetaMethod::RiemannSiegel),
        other => Err(format!("unknown method `{other}`")),
    }
}

#[derive(Debug, Args)]
pub struct MomentArgs {
    /// Integration height T (at least 2).
    #[arg(long = "T")]
    pub t_max: f64,
    #[command(flatten)]
    pub shifts: ShiftArgs,
    #[command(flatten)]
    pub quad: QuadArgs,
    /// Constant H in the hypothesis |Re a|, |Re b| <= H / log T.
    #[arg(long = "hypothesis-constant", default_value_t = crate::moment::DEFAULT_HYPOTHESIS_CONSTANT)]
    pub hypothesis_constant: f64,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// TOML configuration; a small built-in grid is used when omitted.
    pub config: Option<PathBuf>,
    /// Restrict the run to these record kinds (repeatable).
    #[arg(long = "kind", value_parser = parse_kind)]
    pub kinds: Vec<RecordKind>,
    /// Output directory (overrides the configuration).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Rerun the scan stored in a manifest and compare with its CSV.
    #[arg(long, conflicts_with = "config")]
    pub replay: Option<PathBuf>,
}

fn parse_kind(s: &str) -> Result<RecordKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// `[run]` section of the scan configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub kinds: Vec<RecordKind>,
    #[serde(default)]
    pub record_wall_time: bool,
}

/// `[output]` section of the scan configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    #[serde(default = "default_stem")]
    pub stem: String,
    /// 0 prints the summary only, 2 and above also every record.
    #[serde(default = "default_verbosity")]
    pub verbosity: u8,
}

fn default_stem() -> String {
    "scan".into()
}

fn default_verbosity() -> u8 {
    1
}

/// The scan configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliConfig {
    pub grid: GridSpec,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub policy: EvalPolicy,
    pub run: RunSection,
    pub output: OutputSection,
}

impl Default for CliConfig {
    /// A grid small enough to finish in seconds.
    fn default() -> Self {
        Self {
            grid: GridSpec {
                t_values: vec![100.0, 200.0],
                shift_generator: ShiftGenerator::PowerLaw {
                    exponents: vec![1.0, 1.5],
                    beta_ratios: vec![1.0, -1.0],
                },
                re_shift_magnitudes: vec![0.0],
                epsilon: crate::divisor::DEFAULT_EPSILON,
                replication: 1,
                hypothesis_constant: crate::divisor::DEFAULT_HYPOTHESIS_CONSTANT,
                exploratory: false,
            },
            quadrature: QuadratureConfig::default(),
            policy: EvalPolicy::default(),
            run: RunSection {
                kinds: vec![RecordKind::Lemma1, RecordKind::Lemma2, RecordKind::Theorem],
                record_wall_time: false,
            },
            output: OutputSection {
                dir: PathBuf::from("zml-scan"),
                stem: default_stem(),
                verbosity: default_verbosity(),
            },
        }
    }
}

impl CliConfig {
    pub fn parse(text: &str) -> crate::Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> crate::Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Normalized TOML form; parsing it gives back an equal value.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn scan_config(&self) -> ScanConfig {
        ScanConfig {
            grid: self.grid.clone(),
            quadrature: self.quadrature,
            policy: self.policy,
            kinds: self.run.kinds.clone(),
            record_wall_time: self.run.record_wall_time,
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain { .. } | Error::Config(_) | Error::Pole { .. } => EXIT_USAGE,
        _ => EXIT_RUNTIME,
    }
}

fn fmt_c(z: Complex64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

/// Caps the global worker pool at `ZML_THREADS` when set.
pub fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("ZML_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("ZML_THREADS must be a positive integer, got `{raw}`"))?;
    if n == 0 {
        return Err("ZML_THREADS must be a positive integer, got `0`".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return EXIT_USAGE;
    }
    let mut out = String::new();
    let result = match &cli.command {
        Command::Selftest(a) => cmd_selftest(a, &mut out),
        Command::Dsum(a) => cmd_dsum(a, &mut out),
        Command::Chiprod(a) => cmd_chiprod(a, &mut out),
        Command::Moment(a) => cmd_moment(a, &mut out),
        Command::Scan(a) => cmd_scan(a, &mut out),
    };
    print!("{out}");
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn cmd_selftest(a: &SelftestArgs, out: &mut String) -> crate::Result<i32> {
    let mut opts = selftest::SelfTestOptions {
        seed: a.seed,
        samples: a.samples,
        ..Default::default()
    };
    if let Some(g) = a.perturb_euler_gamma {
        opts.euler_gamma = g;
    }
    let report = selftest::run(&opts);
    for c in &report.checks {
        let _ = writeln!(out, "{}  {:<44} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let failed = report.failures().count();
    let _ = writeln!(out, "checks run: {}, failed: {}", report.checks.len(), failed);
    Ok(if failed == 0 { EXIT_OK } else { EXIT_VERIFY })
}

fn cmd_dsum(a: &DsumArgs, out: &mut String) -> crate::Result<i32> {
    let c = Complex64::new(a.cre, a.cim);
    let cfg = Lemma1Config {
        epsilon: a.epsilon,
        hypothesis_constant: a.hypothesis_constant,
    };
    let policy = EvalPolicy::default();
    let r = lemma1_report_with(a.x, c, &cfg, &policy)?;
    let _ = writeln!(out, "x = {}", r.x);
    let _ = writeln!(out, "c = {}", fmt_c(r.c));
    let _ = writeln!(out, "exact = {}", fmt_c(r.exact));
    let _ = writeln!(out, "main_term = {}", fmt_c(r.main_term));
    let _ = writeln!(out, "residual = {}", fmt_c(r.residual));
    let _ = writeln!(out, "normalizer = {}", r.normalizer);
    let _ = writeln!(out, "normalized_residual = {}", r.normalized_residual);
    let _ = writeln!(out, "hypothesis_ok = {}", r.hypothesis_ok);
    let mut code = EXIT_OK;
    if a.oracle {
        if a.x > PAIRS_MAX_X {
            let _ = writeln!(out, "oracle = skipped (x above {PAIRS_MAX_X:e})");
        } else {
            let p = dsum_pairs(a.x, c)?;
            let rel = (r.exact - p).norm() / p.norm();
            let agree = rel <= ORACLE_TOLERANCE;
            let _ = writeln!(out, "oracle = {}", fmt_c(p));
            let _ = writeln!(out, "oracle_relative_difference = {rel:e}");
            let _ = writeln!(out, "oracle_agrees = {agree}");
            if !agree {
                code = EXIT_VERIFY;
            }
        }
    }
    if let Some(path) = &a.csv {
        let rec = ScanRecord {
            kind: RecordKind::Lemma1,
            t: r.x,
            x: r.x,
            replica: 0,
            shifts: ShiftPair::new(c, Complex64::new(0.0, 0.0)),
            lhs: r.exact,
            rhs: r.main_term,
            residual_abs: r.residual.norm(),
            normalizer: r.normalizer,
            normalized_residual: r.normalized_residual,
            in_hypothesis: r.hypothesis_ok,
            quad_error_est: f64::NAN,
            wall_time_s: 0.0,
            error: None,
            policy,
            fingerprint: String::new(),
        };
        fs::write(path, scanlab::to_csv(&[rec]))?;
    }
    Ok(code)
}

fn cmd_chiprod(a: &ChiprodArgs, out: &mut String) -> crate::Result<i32> {
    let s = a.shifts.pair();
    let _ = writeln!(out, "a = {}", fmt_c(s.a));
    let _ = writeln!(out, "b = {}", fmt_c(s.b));
    for &t in &a.t {
        let r = chi_product_report(&s, t, a.k)?;
        let _ = write!(out, "t = {}  exact = {}  in_domain = {}", t, fmt_c(r.exact), r.in_domain);
        if r.in_domain {
            let _ = write!(
                out,
                "  lemma2 = {}  relative_error = {:e}  budget = {:e}",
                fmt_c(r.lemma2_value),
                r.relative_error,
                r.error_budget
            );
        }
        out.push('\n');
    }
    Ok(EXIT_OK)
}

fn cmd_moment(a: &MomentArgs, out: &mut String) -> crate::Result<i32> {
    let mut quad = QuadratureConfig::default();
    let mut policy = EvalPolicy::default();
    a.quad.apply(&mut quad, &mut policy);
    quad.validate()?;
    let s = a.shifts.pair();
    let r = theorem_report_with(&s, a.t_max, &quad, &policy, a.hypothesis_constant)?;
    let _ = writeln!(out, "T = {}", r.t_max);
    let _ = writeln!(out, "a = {}", fmt_c(s.a));
    let _ = writeln!(out, "b = {}", fmt_c(s.b));
    let _ = writeln!(out, "lhs = {}", fmt_c(r.lhs));
    let _ = writeln!(out, "rhs = {}", fmt_c(r.rhs));
    let _ = writeln!(out, "residual = {}", fmt_c(r.residual));
    let _ = writeln!(out, "normalizer = {}", r.normalizer);
    let _ = writeln!(out, "normalized_residual = {}", r.normalized_residual);
    let _ = writeln!(out, "u = {}", r.u);
    let _ = writeln!(out, "v = {}", r.v);
    let _ = writeln!(out, "hypothesis_ok = {}", r.hypothesis_ok);
    let _ = writeln!(
        out,
        "lhs_panels = {}  lhs_error_estimate = {:e}",
        r.lhs_diag.panels, r.lhs_diag.error_estimate
    );
    let _ = writeln!(
        out,
        "rhs_panels = {}  rhs_error_estimate = {:e}",
        r.rhs_diag.panels, r.rhs_diag.error_estimate
    );
    Ok(EXIT_OK)
}

fn cmd_scan(a: &ScanArgs, out: &mut String) -> crate::Result<i32> {
    if let Some(path) = &a.replay {
        return replay_scan(path, out);
    }
    let mut cfg = match &a.config {
        Some(p) => CliConfig::load(p)?,
        None => CliConfig::default(),
    };
    if !a.kinds.is_empty() {
        cfg.run.kinds = a.kinds.clone();
    }
    if let Some(dir) = &a.out {
        cfg.output.dir = dir.clone();
    }
    let scan = cfg.scan_config();
    scan.validate()?;
    let records = run_all(&scan)?;
    let paths = write_outputs(&cfg.output.dir, &cfg.output.stem, &scan, &records)?;
    if cfg.output.verbosity >= 2 {
        for r in &records {
            let _ = writeln!(out, "{}", scanlab::csv_row(r));
        }
    }
    if cfg.output.verbosity >= 1 {
        let _ = writeln!(out, "wrote {}", paths.csv.display());
        let _ = writeln!(out, "wrote {}", paths.manifest.display());
    }
    out.push_str(&format_summary(&summarize(&records)?));
    Ok(EXIT_OK)
}

fn replay_scan(path: &Path, out: &mut String) -> crate::Result<i32> {
    let manifest = RunManifest::load(path)?;
    let records = replay(&manifest)?;
    let fresh = scanlab::to_csv(&records);
    let csv_path = path.parent().unwrap_or(Path::new(".")).join(&manifest.csv_file);
    let stored = fs::read_to_string(&csv_path)?;
    let identical = fresh == stored;
    let _ = writeln!(out, "replayed {} records from {}", records.len(), path.display());
    let _ = writeln!(out, "identical = {identical}");
    Ok(if identical { EXIT_OK } else { EXIT_VERIFY })
}
