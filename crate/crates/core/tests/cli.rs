use std::path::Path;
use std::process::{Command, Output};

fn zml(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zml"))
        .args(args)
        .env_remove("ZML_THREADS")
        .output()
        .expect("spawn zml")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Value of a `key = value` line.
fn value<'a>(text: &'a str, key: &str) -> &'a str {
    let prefix = format!("{key} = ");
    text.lines()
        .find_map(|l| l.strip_prefix(prefix.as_str()))
        .unwrap_or_else(|| panic!("no `{key}` in:\n{text}"))
}

fn number(text: &str, key: &str) -> f64 {
    value(text, key).parse().unwrap()
}

#[test]
fn selftest_passes() {
    let o = zml(&["selftest"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    let summary = text.lines().last().unwrap();
    let run: usize = summary
        .strip_prefix("checks run: ")
        .and_then(|s| s.split(',').next())
        .unwrap()
        .parse()
        .unwrap();
    assert!(run >= 10, "{summary}");
    assert!(summary.ends_with("failed: 0"));
}

#[test]
fn perturbed_selftest_fails_and_names_the_check() {
    let o = zml(&["selftest", "--perturb-euler-gamma", "0.5773"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(1), "{text}");
    assert!(text.lines().any(|l| l.starts_with("FAIL")), "{text}");
}

#[test]
fn dsum_small_example() {
    let o = zml(&["dsum", "--x", "10.5", "--oracle"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert_eq!(value(&text, "exact"), "27+0i");
    assert_eq!(value(&text, "oracle_agrees"), "true");
}

#[test]
fn dsum_is_continuous_across_the_limit_branch() {
    let at = |c: &str| {
        let text = stdout(&zml(&["dsum", "--x", "1e5", "--cre", c]));
        value(&text, "main_term").split(['+', '-']).next().unwrap().parse::<f64>().unwrap()
    };
    let (zero, tiny) = (at("0"), at("1e-9"));
    assert!(((zero - tiny) / zero).abs() < 1e-8, "{zero} {tiny}");
}

#[test]
fn dsum_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    let o = zml(&["dsum", "--x", "1000", "--cim", "3", "--csv", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), zml::scanlab::CSV_HEADER);
    assert!(lines.next().unwrap().starts_with("lemma1,"));
}

#[test]
fn chiprod_example() {
    let o = zml(&["chiprod", "--aim", "20", "--bim", "-20", "--t", "1e4,2e4"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    let rows: Vec<&str> = text.lines().filter(|l| l.starts_with("t = ")).collect();
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert!(r.contains("in_domain = true"), "{r}");
        let err: f64 = r.split("relative_error = ").nth(1).unwrap().split_whitespace().next().unwrap().parse().unwrap();
        assert!(err < 1e-2, "{r}");
    }
}

#[test]
fn moment_unshifted() {
    let o = zml(&["moment", "--T", "100"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert!(number(&text, "normalized_residual") < 1.0);
    assert_eq!(value(&text, "hypothesis_ok"), "true");
}

fn scan_into(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["scan", "--out", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    zml(&args)
}

#[test]
fn scan_kind_filter_and_replay() {
    let tmp = tempfile::tempdir().unwrap();
    let (one, two) = (tmp.path().join("one"), tmp.path().join("two"));
    let o = scan_into(&one, &["--kind", "lemma2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(scan_into(&two, &["--kind", "lemma2"]).status.code(), Some(0));

    let csv = std::fs::read_to_string(one.join("scan.csv")).unwrap();
    assert_eq!(csv, std::fs::read_to_string(two.join("scan.csv")).unwrap());
    assert!(csv.lines().skip(1).all(|l| l.starts_with("lemma2,")));
    assert!(csv.lines().count() > 1);

    let manifest = one.join("scan.manifest.json");
    let o = zml(&["scan", "--replay", manifest.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(value(&stdout(&o), "identical"), "true");
}

#[test]
fn scan_default_covers_every_kind() {
    let tmp = tempfile::tempdir().unwrap();
    let o = scan_into(tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(tmp.path().join("scan.csv")).unwrap();
    for kind in ["lemma1", "lemma2", "theorem"] {
        assert!(csv.lines().any(|l| l.starts_with(kind)), "{kind} missing");
    }
}

#[test]
fn invalid_config_is_a_usage_error_and_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    std::fs::write(&cfg, "[grid]\nT_values = [-5.0]\n").unwrap();
    let out = tmp.path().join("out");
    let o = zml(&["scan", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());

    std::fs::write(&cfg, "[grid]\nT_value = [100.0]\n").unwrap();
    let o = zml(&["scan", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn usage_and_help_exit_codes() {
    assert_eq!(zml(&["--help"]).status.code(), Some(0));
    assert_eq!(zml(&["dsum", "--help"]).status.code(), Some(0));
    assert_eq!(zml(&["dsum"]).status.code(), Some(2));
    assert_eq!(zml(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(zml(&["dsum", "--x", "0.5"]).status.code(), Some(2));
    assert_eq!(zml(&["moment", "--T", "100", "--nodes", "1"]).status.code(), Some(2));
}

#[test]
fn bad_thread_count_is_rejected() {
    let o = Command::new(env!("CARGO_BIN_EXE_zml"))
        .args(["dsum", "--x", "100"])
        .env("ZML_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
