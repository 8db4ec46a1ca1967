use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const ALGEBRA: &str =
    "seed = 3\n[algebra]\ncases = 50\n[algebra.multiplier]\nkind = \"magnetic\"\np = 1\nq = 3\n";

const CERTIFY: &str = "[certify]\nkappa = 0.1\nmodel_gap = [3.141592653589793, 9.42477796076938]\n\
                       morse_constant = 4.0\n[certify.couplings]\nlist = [0.001, 0.01, 0.02]\n";

fn semigap(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semigap"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    std::fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

fn last_json(bytes: &[u8]) -> Value {
    let text = String::from_utf8_lossy(bytes);
    serde_json::from_str(text.lines().last().expect("a JSON line")).expect("valid JSON")
}

#[test]
fn successful_run_reports_outputs_and_hash() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "a.toml", ALGEBRA);
    let out = semigap(
        tmp.path(),
        &["validate-algebra", "--config", &cfg, "--out", "o"],
    );
    assert_eq!(out.status.code(), Some(0));
    let line = last_json(&out.stdout);
    assert_eq!(line["status"], "ok");
    let hash = line["config_hash"].as_str().unwrap();
    assert_eq!(hash.len(), 64);
    let summary: Value = serde_json::from_str(
        &std::fs::read_to_string(tmp.path().join("o/validate-algebra.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(summary["config_hash"], hash);
    let csv = std::fs::read_to_string(tmp.path().join("o/checks.csv")).unwrap();
    assert!(csv.starts_with(&format!("# config_hash={hash}\n")));
}

#[test]
fn unknown_keys_are_configuration_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "a.toml",
        &format!("{ALGEBRA}colour = \"blue\"\n"),
    );
    let out = semigap(tmp.path(), &["validate-algebra", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(last_json(&out.stderr)["reason"]["kind"], "config");
}

#[test]
fn missing_config_and_section_are_configuration_errors() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(semigap(tmp.path(), &["simulate"]).status.code(), Some(2));
    assert_eq!(
        semigap(tmp.path(), &["simulate", "--config", "absent.toml"])
            .status
            .code(),
        Some(2)
    );
    let cfg = write(tmp.path(), "a.toml", ALGEBRA);
    assert_eq!(
        semigap(tmp.path(), &["hall", "--config", &cfg])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        semigap(tmp.path(), &["no-such-command"]).status.code(),
        Some(2)
    );
}

#[test]
fn coupling_sweep_flag_is_validated() {
    let tmp = tempfile::tempdir().unwrap();
    let algebra = write(tmp.path(), "a.toml", ALGEBRA);
    let certify = write(tmp.path(), "c.toml", CERTIFY);
    let wrong = semigap(
        tmp.path(),
        &[
            "validate-algebra",
            "--config",
            &algebra,
            "--mu-sweep",
            "0.01:0.1",
        ],
    );
    assert_eq!(wrong.status.code(), Some(2));
    let malformed = semigap(
        tmp.path(),
        &["gap-certify", "--config", &certify, "--mu-sweep", "0.1"],
    );
    assert_eq!(malformed.status.code(), Some(2));
    let ok = semigap(
        tmp.path(),
        &[
            "gap-certify",
            "--config",
            &certify,
            "--mu-sweep",
            "1e-4:1e-2",
            "--out",
            "s",
        ],
    );
    assert_eq!(ok.status.code(), Some(0));
    let sweep = std::fs::read_to_string(tmp.path().join("s/sweep.csv")).unwrap();
    assert_eq!(sweep.lines().count(), 2 + 13);
}

#[test]
fn refused_certificates_exit_with_a_reason() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "c.toml",
        &CERTIFY.replace("morse_constant = 4.0", "morse_constant = 1e-6"),
    );
    let out = semigap(tmp.path(), &["gap-certify", "--config", &cfg, "--out", "o"]);
    assert_eq!(out.status.code(), Some(3));
    let line = last_json(&out.stdout);
    assert_eq!(line["reason"]["kind"], "hypothesis");
    assert_eq!(line["reason"]["code"], "no_certified_coupling");
    let summary: Value = serde_json::from_str(
        &std::fs::read_to_string(tmp.path().join("o/gap-certify.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(summary["reason"]["code"], "no_certified_coupling");
}

#[test]
fn disagreeing_chern_numbers_exit_with_a_reason() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "h.toml",
        "[hall]\nsubband_grid = 12\n[hall.target]\ngap_index = 0\n[hall.options]\ngrid = 12\nkubo_grid = 6\n\
         [hall.lattice]\ndimension = 2\npoints_per_cell = 1\ndiscretization = \"tight-binding\"\nmu = 1.0\n\
         flux = { p = 1, q = 3 }\n",
    );
    let out = semigap(tmp.path(), &["hall", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(last_json(&out.stdout)["reason"]["code"], "methods_disagree");
}

#[test]
fn outputs_do_not_depend_on_the_thread_count() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.toml", CERTIFY);
    for (dir, threads) in [("one", "1"), ("two", "2")] {
        let out = semigap(
            tmp.path(),
            &[
                "gap-certify",
                "--config",
                &cfg,
                "--out",
                dir,
                "--threads",
                threads,
            ],
        );
        assert_eq!(out.status.code(), Some(0));
    }
    for name in ["sweep.csv", "gap-certify.json"] {
        let a = std::fs::read(tmp.path().join("one").join(name)).unwrap();
        let b = std::fs::read(tmp.path().join("two").join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
    assert_eq!(
        semigap(
            tmp.path(),
            &["gap-certify", "--config", &cfg, "--threads", "0"]
        )
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn seed_flag_changes_the_hash() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "a.toml", ALGEBRA);
    let hash = |seed: &str| {
        let out = semigap(
            tmp.path(),
            &[
                "validate-algebra",
                "--config",
                &cfg,
                "--seed",
                seed,
                "--out",
                seed,
            ],
        );
        last_json(&out.stdout)["config_hash"]
            .as_str()
            .unwrap()
            .to_string()
    };
    assert_ne!(hash("1"), hash("2"));
}
