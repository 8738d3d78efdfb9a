use std::path::{Path, PathBuf};
use std::process::Command;

use nfc_bms::cli::{cmd_provision, RunReport};
use serde_json::{json, Value};

const BIN: &str = env!("CARGO_BIN_EXE_nfcbms");

fn nfcbms(dir: &Path, args: &[&str]) -> (i32, String) {
    let out = Command::new(BIN)
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
    )
}

/// Provisions `uids` with one key and writes `scenario.json` referencing them.
fn workspace(dir: &Path, uids: &[&str], extra: Value) -> PathBuf {
    let mut tags = Vec::new();
    for (i, uid) in uids.iter().enumerate() {
        let image = format!("tag{i}.json");
        let (code, _) = nfcbms(
            dir,
            &[
                "provision",
                "--uid",
                uid,
                "--key",
                "key.json",
                "--out",
                &image,
                "--allowlist",
                "allow.json",
                "--seed",
                "1",
            ],
        );
        assert_eq!(code, 0);
        tags.push(json!({"image": image, "distance_cm": 2.0, "module": {"id": format!("module-{}", i + 1)}}));
    }
    let mut config = json!({
        "topology": {"tags": tags},
        "security": {"key_file": "key.json", "allowlist_file": "allow.json"},
        "seed": 3
    });
    if let (Value::Object(c), Value::Object(e)) = (&mut config, extra) {
        c.extend(e);
    }
    let path = dir.join("scenario.json");
    std::fs::write(&path, serde_json::to_string_pretty(&config).unwrap()).unwrap();
    path
}

fn read_report(path: &Path) -> RunReport {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn provision_writes_image_and_rejects_bad_uid() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let image = cmd_provision(
        &d.join("k.json"),
        "E004010203040506",
        &d.join("a.json"),
        None,
        Some(9),
    )
    .unwrap();
    assert_eq!(image.uid.to_hex(), "E004010203040506");
    assert_eq!(image.blocks.len(), nfc_bms::link::DEFAULT_BLOCK_COUNT);

    let again = cmd_provision(
        &d.join("k.json"),
        "E004010203040506",
        &d.join("b.json"),
        None,
        None,
    )
    .unwrap();
    assert_eq!(image, again);

    let (code, _) = nfcbms(
        d,
        &[
            "provision",
            "--uid",
            "XYZ",
            "--key",
            "k.json",
            "--out",
            "x.json",
        ],
    );
    assert_eq!(code, 2);
    assert!(!d.join("x.json").exists());
}

#[test]
fn healthy_run_reports_nominal_timeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    workspace(d, &["E004010203040506", "E004010203040507"], json!({}));
    let (code, _) = nfcbms(
        d,
        &["run", "--config", "scenario.json", "--out", "report.json"],
    );
    assert_eq!(code, 0);
    let report = read_report(&d.join("report.json"));
    assert!(report.succeeded);
    assert_eq!(report.sessions.len(), 2);
    for s in &report.sessions {
        let init = s.init.as_ref().unwrap();
        assert_eq!(init.elapsed_ms, 534.2);
        let mon = s.monitor.as_ref().unwrap();
        assert_eq!(mon.samples.len(), 10);
        assert_eq!(mon.elapsed_ms, 272.0);
    }
}

#[test]
fn counterfeit_signature_fails_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    workspace(d, &["E004010203040506"], json!({}));
    // re-sign the tag with an unrelated key; the scenario keeps the original key
    cmd_provision(
        &d.join("rogue.json"),
        "E004010203040506",
        &d.join("tag0.json"),
        None,
        Some(77),
    )
    .unwrap();
    let (code, _) = nfcbms(
        d,
        &["run", "--config", "scenario.json", "--out", "report.json"],
    );
    assert_eq!(code, 3);
    let report = read_report(&d.join("report.json"));
    let init = report.sessions[0].init.as_ref().unwrap();
    assert_eq!(
        init.final_outcome,
        nfc_bms::orchestrator::InitOutcome::AbortedAuth
    );
    assert!(report.sessions[0].monitor.is_none());
}

#[test]
fn empty_allowlist_rejects_everything() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    workspace(d, &["E004010203040506"], json!({}));
    std::fs::write(d.join("allow.json"), "[]").unwrap();
    let (code, _) = nfcbms(
        d,
        &["run", "--config", "scenario.json", "--out", "report.json"],
    );
    assert_eq!(code, 3);
    assert!(!read_report(&d.join("report.json")).succeeded);
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(
        nfcbms(d, &["run", "--config", "missing.json", "--out", "r.json"]).0,
        2
    );
    assert_eq!(nfcbms(d, &["bogus"]).0, 2);
    workspace(d, &["E004010203040506"], json!({}));
    assert_eq!(
        nfcbms(
            d,
            &[
                "run",
                "--config",
                "scenario.json",
                "--out",
                "r.json",
                "--samples",
                "0"
            ]
        )
        .0,
        2
    );
}

#[test]
fn threat_suite_passes_and_prints_table() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    workspace(d, &["E004010203040506"], json!({}));
    let (code, stdout) = nfcbms(
        d,
        &[
            "threat-suite",
            "--config",
            "scenario.json",
            "--out",
            "suite.json",
        ],
    );
    assert_eq!(code, 0);
    for id in ["T1", "T2", "T3", "T4"] {
        assert!(stdout.contains(id));
    }
    let suite: Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("suite.json")).unwrap()).unwrap();
    assert_eq!(suite["all_blocked"], true);
}

#[test]
fn configured_threat_is_reported_as_domain_failure() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    workspace(
        d,
        &["E004010203040506"],
        json!({"threat": {"id": "T1", "injection": {"kind": "counterfeit_unknown_uid"}, "target_asset": "A2"}}),
    );
    let (code, _) = nfcbms(
        d,
        &["run", "--config", "scenario.json", "--out", "report.json"],
    );
    assert_eq!(code, 3);
    let report = read_report(&d.join("report.json"));
    assert!(report.threat.as_ref().unwrap().blocked);
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    workspace(
        d,
        &["E004010203040506", "E004010203040507"],
        json!({"timings": {"jitter_fraction": 0.1}}),
    );
    let args = |out: &'static str| {
        [
            "run",
            "--config",
            "scenario.json",
            "--out",
            out,
            "--seed",
            "42",
            "--trace",
        ]
    };
    let (c1, t1) = nfcbms(d, &args("r1.json"));
    let (c2, t2) = nfcbms(d, &args("r2.json"));
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(t1, t2);
    assert!(t1.contains("ReadSignature"));
    let a = std::fs::read(d.join("r1.json")).unwrap();
    let b = std::fs::read(d.join("r2.json")).unwrap();
    assert_eq!(a, b);
}
