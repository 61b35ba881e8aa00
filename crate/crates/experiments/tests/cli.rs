use std::path::Path;
use std::process::{Command, Output};

use spr_experiments::RunReport;

fn spr(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spr"))
        .args(args)
        .current_dir(cwd)
        .env_remove("SPR_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn passing_scenario_exits_zero_and_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = spr(&["bounds-table", "--out", "res"], dir.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("res/bounds-table.csv")).unwrap();
    assert!(csv.starts_with("label,value,expected,rel_error\n"));
    assert!(csv.contains("gamma_upper(B=2,p=4,a=0.5),3.5156250000000000e-2"));
    let json = std::fs::read_to_string(dir.path().join("res/bounds-table.json")).unwrap();
    let report = RunReport::from_json(&json).unwrap();
    assert!(report.passed() && report.verdicts_consistent());
    assert!(String::from_utf8_lossy(&out.stdout).contains("bounds-table: PASS"));
}

#[test]
fn config_errors_exit_two_and_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    for (text, key) in [
        ("n = 4\nbogus = 1\n", "bogus"),
        ("n = 0\n", "`n`"),
        ("eps = 0.1, nan\n", "`eps`"),
        ("n = 3\nn = 4\n", "`n`"),
        ("scenario = small-ball\n", "scenario"),
    ] {
        let cfg = write(dir.path(), "bad.cfg", text);
        let out = spr(&["instability-demo", "--config", &cfg], dir.path());
        assert_eq!(out.status.code(), Some(2), "config {text:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(key), "{err}");
    }
    assert_eq!(
        spr(&["no-such-scenario"], dir.path()).status.code(),
        Some(2)
    );
    assert_eq!(
        spr(&["bounds-table", "--threads", "0"], dir.path())
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn failed_verdict_exits_one() {
    // A Gaussian span does phase retrieval, so the Rademacher failure checks fail.
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "g.cfg", "family = gaussian\npoints = 2000\n");
    let out = spr(
        &["pr-failure-demo", "--config", &cfg, "--out", "."],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL span gap"));
}

#[test]
fn exhausted_time_budget_is_partial_and_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "t.cfg", "seeds = 5\nmax_seconds = 0\n");
    let out = spr(
        &["frame-bounds", "--config", &cfg, "--out", "."],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let json = std::fs::read_to_string(dir.path().join("frame-bounds.json")).unwrap();
    assert!(RunReport::from_json(&json).unwrap().partial);
}

#[test]
fn output_directory_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "o.cfg", "out_dir = from-config\n");
    let run = |extra: &[&str], env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_spr"));
        cmd.args(["instability-demo", "--config", &cfg])
            .args(extra)
            .current_dir(dir.path())
            .env_remove("SPR_OUT_DIR");
        if let Some(e) = env {
            cmd.env("SPR_OUT_DIR", e);
        }
        assert!(cmd.status().unwrap().success());
    };
    run(&[], None);
    assert!(dir.path().join("from-config/instability-demo.csv").exists());
    run(&[], Some("from-env"));
    assert!(dir.path().join("from-env/instability-demo.csv").exists());
    run(&["--out", "from-flag"], Some("from-env"));
    assert!(dir.path().join("from-flag/instability-demo.csv").exists());
}

#[test]
fn seed_flag_overrides_config_and_csv_is_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "j.cfg",
        "trials = 60\nm = 2000\npoints = 20000\nseed = 1\n",
    );
    let csv = |threads: &str, seed: &str, out: &str| {
        let o = spr(
            &[
                "jset-tails",
                "--config",
                &cfg,
                "--threads",
                threads,
                "--seed",
                seed,
                "--out",
                out,
            ],
            dir.path(),
        );
        assert!(o.status.code().is_some());
        std::fs::read(dir.path().join(out).join("jset-tails.csv")).unwrap()
    };
    let one = csv("1", "9", "a");
    assert_eq!(one, csv("4", "9", "b"));
    assert_ne!(one, csv("1", "1", "c"));
}
