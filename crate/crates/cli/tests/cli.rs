//! End-to-end runs of the `riscorr` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn riscorr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_riscorr"))
        .args(args)
        .env_remove("RISCORR_THREADS")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("scenario.toml");
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(2)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn size_reports_the_six_db_side() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "deployment_case = 1\nmargin_db = 6\n");
    let out = tmp.path().join("out");
    let o = riscorr(&["size", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out.join("size.csv")).unwrap();
    assert!(text.starts_with("# riscorr "));
    assert!(text.lines().next().unwrap().contains("seed=2024"));
    let r = rows(&out.join("size.csv"));
    let six = r.iter().find(|r| r[1] == "6").unwrap();
    assert_eq!((six[5].as_str(), six[6].as_str()), ("83", "83"));
}

#[test]
fn power_on_case_two_matches_connected_total() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "deployment_case = 2\nmargin_db = 6\n");
    let out = tmp.path().join("out");
    let o = riscorr(&["power", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let r = rows(&out.join("power.csv"));
    assert_eq!(r.len(), 5);
    let conn = r
        .iter()
        .find(|r| r[1] == "connected" && r[2] == "6")
        .unwrap();
    let total: f64 = conn[6].parse().unwrap();
    assert!((total - 6.420).abs() <= 0.15, "{total}");
}

#[test]
fn mode_and_margin_filter_rows() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "deployment_case = 3\nmargin_db = 6\n");
    let out = tmp.path().join("out");
    let o = riscorr(&[
        "power",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--mode",
        "full",
        "--margin-db",
        "3",
    ]);
    assert!(o.status.success());
    let r = rows(&out.join("power.csv"));
    assert_eq!(r.len(), 1);
    assert_eq!((r[0][1].as_str(), r[0][2].as_str()), ("full", "3"));
}

#[test]
fn sweep_writes_codewords_and_patterns() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "deployment_case = 1\nmargin_db = 3\n");
    let out = tmp.path().join("out");
    let o = riscorr(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let summary = rows(&out.join("sweep.csv"));
    assert!(!summary.is_empty());
    let cw = rows(&out.join("codeword_000.csv"));
    assert_eq!(cw.len(), 70 * 70);
    assert_eq!(rows(&out.join("pattern_000.csv")).len(), 161);
    assert!(out
        .join(format!("pattern_{:03}.csv", summary.len() - 1))
        .exists());
}

#[test]
fn correlate_writes_sweep_and_group_map() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "deployment_case = 1\nmargin_db = 6\n");
    let out = tmp.path().join("out");
    let o = riscorr(&[
        "correlate",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let sweep = rows(&out.join("threshold_sweep.csv"));
    assert_eq!(sweep.len(), 181);
    let counts: Vec<usize> = sweep.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(counts.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(rows(&out.join("group_map.csv")).len(), 83 * 83);
}

#[test]
fn rate_emits_one_row_per_power_and_design() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "deployment_case = 1\nmargin_db = 3\n[rate]\nn_realizations = 20\np_t_step_db = 10\n",
    );
    let out = tmp.path().join("out");
    let o = riscorr(&["rate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = rows(&out.join("rate.csv"));
    assert_eq!(r.len(), 5 * 3);
    assert_eq!(r[0][0], "0");
}

#[test]
fn seed_override_changes_header_and_rates() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "deployment_case = 1\nmargin_db = 3\n[rate]\nn_realizations = 10\np_t_step_db = 20\n",
    );
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert!(riscorr(&[
        "rate",
        "--config",
        &cfg,
        "--out",
        a.to_str().unwrap(),
        "--mode",
        "full"
    ])
    .status
    .success());
    assert!(riscorr(&[
        "rate",
        "--config",
        &cfg,
        "--out",
        b.to_str().unwrap(),
        "--mode",
        "full",
        "--seed",
        "5"
    ])
    .status
    .success());
    let ta = fs::read_to_string(a.join("rate.csv")).unwrap();
    let tb = fs::read_to_string(b.join("rate.csv")).unwrap();
    assert!(tb.lines().next().unwrap().contains("seed=5"));
    assert_ne!(ta.lines().nth(3), tb.lines().nth(3));
}

#[test]
fn bad_config_exits_with_two_and_lists_problems() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "deployment_case = 1\nmargin_db = 5\nflavour = 1\n",
    );
    let o = riscorr(&[
        "size",
        "--config",
        &cfg,
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2") && err.contains("margin_db"), "{err}");
    assert!(err.contains("line 3") && err.contains("flavour"), "{err}");
}

#[test]
fn missing_config_file_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let missing = tmp.path().join("nope.toml");
    let o = riscorr(&[
        "size",
        "--config",
        missing.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unreachable_floor_exits_with_three() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "deployment_case = 1\nmargin_db = 6\n[fixture_gains]\ng_direct = 1e-20\ng_bs_ris = 1e-8\ng_ris_ue = 1e-8\n",
    );
    let o = riscorr(&[
        "sweep",
        "--config",
        &cfg,
        "--out",
        tmp.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn invalid_thread_count_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "deployment_case = 1\nmargin_db = 6\n");
    let o = Command::new(env!("CARGO_BIN_EXE_riscorr"))
        .args([
            "size",
            "--config",
            &cfg,
            "--out",
            tmp.path().to_str().unwrap(),
        ])
        .env("RISCORR_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_riscorr"))
        .args([
            "size",
            "--config",
            &cfg,
            "--out",
            tmp.path().to_str().unwrap(),
        ])
        .env("RISCORR_THREADS", "2")
        .output()
        .unwrap();
    assert!(o.status.success());
}

#[test]
fn unknown_margin_flag_value_is_a_usage_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "deployment_case = 1\nmargin_db = 6\n");
    let o = riscorr(&[
        "size",
        "--config",
        &cfg,
        "--out",
        tmp.path().to_str().unwrap(),
        "--margin-db",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

fn shipped(name: &str) -> String {
    format!("{}/../../configs/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn shipped_configs_parse() {
    for name in ["case1.toml", "case2.toml", "case3.toml", "custom.toml"] {
        let text = fs::read_to_string(shipped(name)).unwrap();
        riscorr_cli::parse_config_str(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn codebook_marks_designs_that_cannot_be_covered() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let o = riscorr(&[
        "codebook",
        "--config",
        &shipped("custom.toml"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = rows(&out.join("codebook.csv"));
    let status: Vec<(&str, &str)> = r.iter().map(|r| (r[0].as_str(), r[12].as_str())).collect();
    assert_eq!(
        status,
        [("connected", "ok"), ("full", "ok"), ("min", "cap_exceeded")]
    );
    assert_eq!(r[2][6], "");
}

#[test]
fn codebook_counts_case_one() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let o = riscorr(&[
        "codebook",
        "--config",
        &shipped("case1.toml"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let r = rows(&out.join("codebook.csv"));
    let conn = &r[0];
    assert_eq!((conn[0].as_str(), conn[4].as_str()), ("connected", "83"));
    let n: usize = conn[6].parse().unwrap();
    assert!(n.abs_diff(52) <= 5);
    assert_eq!(conn[7], (83 * 3 * n).to_string());
}
