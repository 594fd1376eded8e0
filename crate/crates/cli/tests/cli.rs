use std::path::Path;
use std::process::{Command, Output};

fn cdma(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cdma")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// CSV body (header comments stripped) as rows of cells.
fn rows(text: &str) -> Vec<Vec<String>> {
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let mut out = vec![reader.headers().unwrap().iter().map(String::from).collect()];
    out.extend(reader.records().map(|r| r.unwrap().iter().map(String::from).collect()));
    out
}

fn column(table: &[Vec<String>], name: &str) -> Vec<String> {
    let i = table[0].iter().position(|c| c == name).unwrap_or_else(|| panic!("no column {name}"));
    table[1..].iter().map(|r| r[i].clone()).collect()
}

fn eta_rows(table: &[Vec<String>], kind: &str) -> Vec<f64> {
    let kinds = column(table, "kind");
    let values = column(table, "value");
    kinds.iter().zip(&values).filter(|(k, _)| *k == kind).map(|(_, v)| v.parse().unwrap()).collect()
}

#[test]
fn zero_load_has_unit_efficiency() {
    // only the midpoint quadrature of the pulse energy separates eta from 1
    let out = cdma(&["efficiency", "--beta", "0", "--grid", "1024"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let eta = eta_rows(&rows(&stdout(&out)), "eta");
    assert_eq!(eta.len(), 1);
    assert!((eta[0] - 1.0).abs() < 1e-6, "{}", eta[0]);
    let sinc = cdma(&["efficiency", "--beta", "0", "--waveform", "sinc:1", "--grid", "64"]);
    assert_eq!(eta_rows(&rows(&stdout(&sinc)), "eta"), vec![1.0]);
}

#[test]
fn unit_bandwidth_sinc_matches_synchronous() {
    let out = cdma(&["efficiency", "--waveform", "sinc:1", "--beta", "0.5,2", "--sync", "--grid", "128"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let table = rows(&stdout(&out));
    let eta = eta_rows(&table, "eta");
    let sync = eta_rows(&table, "eta_sync");
    assert_eq!(eta.len(), 2);
    for (a, s) in eta.iter().zip(&sync) {
        assert!((a - s).abs() < 1e-8, "{a} vs {s}");
    }
}

#[test]
fn cross_check_agrees() {
    let out = cdma(&["efficiency", "--beta", "1", "--cross-check", "--grid", "256", "--delay-atoms", "32"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let table = rows(&stdout(&out));
    let scalar = eta_rows(&table, "eta")[0];
    let matrix = eta_rows(&table, "eta_cross_check")[0];
    assert!((scalar - matrix).abs() / scalar < 1e-3, "{scalar} vs {matrix}");
    assert!(stderr(&out).contains("relative difference"));
}

#[test]
fn fixed_delays_with_excess_bandwidth_are_rejected() {
    let out = cdma(&["efficiency", "--delays", "zero", "--waveform", "rrc:0.22"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("hypothes"), "{}", stderr(&out));
}

#[test]
fn fixed_delays_allowed_with_matrix_solver() {
    let out = cdma(&["efficiency", "--delays", "zero", "--solver", "matrix", "--grid", "64"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(!eta_rows(&rows(&stdout(&out)), "user_efficiency").is_empty());
}

#[test]
fn figure2_curves_meet_at_unit_bandwidth() {
    let out = cdma(&["figure2", "--alpha", "0.5,0.75,1,1.5,2", "--grid", "128"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let table = rows(&stdout(&out));
    let alpha: Vec<f64> = column(&table, "alpha").iter().map(|v| v.parse().unwrap()).collect();
    let gamma: Vec<f64> = column(&table, "gamma_async_sinc").iter().map(|v| v.parse().unwrap()).collect();
    let sync: Vec<f64> = column(&table, "gamma_sync").iter().map(|v| v.parse().unwrap()).collect();
    let one = alpha.iter().position(|&a| a == 1.0).unwrap();
    assert!((gamma[one] - sync[one]).abs() / sync[one] < 1e-6);
    assert!(gamma.windows(2).all(|w| w[1] < w[0]), "{gamma:?}");
}

#[test]
fn figure3_reports_nonnegative_gap() {
    let out = cdma(&["figure3", "--beta", "0.5,2,4", "--grid", "128"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let gaps: Vec<f64> = column(&rows(&stdout(&out)), "relative_gap").iter().map(|v| v.parse().unwrap()).collect();
    assert_eq!(gaps.len(), 3);
    assert!(gaps.iter().all(|&g| g > 0.0 && g < 0.2), "{gaps:?}");
    assert!(stderr(&out).contains("maximum relative gap"));
}

#[test]
fn capacity_at_fixed_ebn0() {
    let out = cdma(&["capacity", "--beta", "1", "--grid", "128"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let table = rows(&stdout(&out));
    let ga: f64 = column(&table, "gamma_async")[0].parse().unwrap();
    let gs: f64 = column(&table, "gamma_sync")[0].parse().unwrap();
    assert!(ga > gs && gs > 0.0);
}

const MC: &[&str] = &["montecarlo", "--n", "16", "--k", "8", "--trials", "4", "--matrix", "circulant", "--grid", "64"];

#[test]
fn montecarlo_is_reproducible_from_its_seed() {
    let run = |seed: &str| {
        let mut args = MC.to_vec();
        args.extend(["--seed", seed]);
        let out = cdma(&args);
        assert!(out.status.success(), "{}", stderr(&out));
        out.stdout
    };
    let a = run("7");
    assert_eq!(a, run("7"));
    let b = run("8");
    assert_ne!(a, b);
    let ta = rows(std::str::from_utf8(&a).unwrap());
    let tb = rows(std::str::from_utf8(&b).unwrap());
    assert_eq!(column(&ta, "predicted_efficiency"), column(&tb, "predicted_efficiency"));
    assert_ne!(column(&ta, "sinr"), column(&tb, "sinr"));
}

#[test]
fn output_file_carries_config_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mc.csv");
    let mut args = MC.to_vec();
    args.extend(["--out", path.to_str().unwrap()]);
    let out = cdma(&args);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# cdma montecarlo"));
    assert!(text.contains("# n = 16"));
    assert!(text.contains("# trials = 4"));
    assert_eq!(rows(&text).len(), 1 + 4 * 8);
}

#[test]
fn dumped_config_reproduces_run() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = MC.to_vec();
    args.extend(["--seed", "42", "--dump-config"]);
    let dumped = cdma(&args);
    assert!(dumped.status.success());
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, &dumped.stdout).unwrap();

    let direct = cdma(&MC.iter().copied().chain(["--seed", "42"]).collect::<Vec<_>>());
    let from_file = cdma(&["montecarlo", "--config", cfg.to_str().unwrap()]);
    assert!(from_file.status.success(), "{}", stderr(&from_file));
    assert_eq!(direct.stdout, from_file.stdout);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "beta = \"2\"\ngrid = 64\n").unwrap();
    let out = cdma(&["efficiency", "--config", cfg.to_str().unwrap(), "--beta", "0.5", "--dump-config"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("beta = \"0.5\""), "{text}");
    assert!(text.contains("grid = 64"), "{text}");
}

#[test]
fn invalid_configurations_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "no_such_setting = 1\n").unwrap();
    for args in [
        vec!["efficiency", "--config", bad.to_str().unwrap()],
        vec!["efficiency", "--config", "/nonexistent/settings.toml"],
        vec!["efficiency", "--waveform", "gaussian:1"],
        vec!["efficiency", "--beta", "-1"],
        vec!["efficiency", "--n0", "0"],
        vec!["figure2", "--beta", "1,2"],
        vec!["no-such-command"],
    ] {
        let out = cdma(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn verify_passes_and_negative_control_fails() {
    let ok = cdma(&["verify"]);
    assert!(ok.status.success(), "{}", stdout(&ok));
    let status = column(&rows(&stdout(&ok)), "status");
    assert!(status.iter().all(|s| s == "pass" || s == "soft-fail"));

    let bad = cdma(&["verify", "--inject-qbar-perturbation"]);
    assert_eq!(bad.status.code(), Some(1));
    let table = rows(&stdout(&bad));
    let names = column(&table, "property");
    let status = column(&table, "status");
    let i = names.iter().position(|n| n == "trace_of_structured_times_oscillating").unwrap();
    assert_eq!(status[i], "FAIL");
}

#[test]
fn theorem3_reports_both_systems() {
    let out = cdma(&["theorem3", "--n", "16", "--k", "8", "--trials", "10", "--window", "2", "--grid", "64"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let table = rows(&stdout(&out));
    let quantities = column(&table, "quantity");
    for q in ["windowed_mean_efficiency", "reduced_mean_efficiency", "difference"] {
        assert!(quantities.iter().any(|x| x == q), "missing {q}");
    }
}

#[test]
fn tabulated_waveform_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("flat.csv");
    write_flat_spectrum(&table);
    let spec = format!("table:{}", table.display());
    let out = cdma(&["efficiency", "--waveform", &spec, "--beta", "1", "--grid", "64"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let eta = eta_rows(&rows(&stdout(&out)), "eta")[0];
    let sinc = eta_rows(&rows(&stdout(&cdma(&["efficiency", "--waveform", "sinc:1", "--beta", "1", "--grid", "64"]))), "eta")[0];
    assert!((eta - sinc).abs() < 1e-3, "{eta} vs {sinc}");
}

/// Flat spectrum of a unit-bandwidth sinc pulse with unit energy.
fn write_flat_spectrum(path: &Path) {
    let mut text = String::from("omega,magnitude\n");
    let edge = std::f64::consts::PI;
    for i in 0..=64 {
        let w = -edge + 2.0 * edge * i as f64 / 64.0;
        text.push_str(&format!("{w},1\n"));
    }
    std::fs::write(path, text).unwrap();
}
