// The file-based workflow: provision tag images, write a scenario config,
// run it and read the report back.

use std::path::Path;

use nfc_bms::cli::{cmd_provision, cmd_run};
use nfc_bms::config::{write_json, ScenarioConfig, SecurityConfig, TagConfig, TopologyConfig};
use nfc_bms::orchestrator::PhaseTimings;
use nfc_bms::system::ModuleSetup;

pub fn run_example() -> nfc_bms::Result<()> {
    let dir = tempfile::tempdir().map_err(|e| nfc_bms::Error::Config(e.to_string()))?;
    run_in(dir.path())
}

fn run_in(dir: &Path) -> nfc_bms::Result<()> {
    let mut tags = Vec::new();
    for (i, uid) in ["E004000000000101", "E004000000000102"].iter().enumerate() {
        let image = format!("tag-{i}.json");
        cmd_provision(
            &dir.join("key.json"),
            uid,
            &dir.join(&image),
            Some(&dir.join("allowlist.json")),
            Some(7),
        )?;
        tags.push(TagConfig {
            image: Some(image.into()),
            uid: None,
            signature: None,
            blocks: None,
            distance_cm: 2.0,
            module: ModuleSetup::healthy(format!("module-{}", i + 1)),
        });
    }
    let config = ScenarioConfig {
        topology: TopologyConfig {
            field: Default::default(),
            tags,
        },
        timings: PhaseTimings::default(),
        security: SecurityConfig {
            key_file: "key.json".into(),
            allowlist_file: "allowlist.json".into(),
            sealed: true,
        },
        threat: None,
        seed: 0,
        alarm_threshold_dc: 600,
    };
    let config_path = dir.join("scenario.json");
    write_json(&config_path, &config)?;

    let (report, code) = cmd_run(&config_path, 10, &dir.join("report.json"), None, false)?;
    for s in &report.sessions {
        let init = s.init.as_ref().map(|r| r.elapsed_ms).unwrap_or_default();
        let mon = s.monitor.as_ref().map(|m| m.elapsed_ms).unwrap_or_default();
        println!(
            "{} ({}): init {init} ms, monitoring {mon} ms",
            s.module_id, s.uid
        );
    }
    println!(
        "{} link commands, exit code {}",
        report.trace_summary.commands,
        code.code()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> nfc_bms::Result<()> {
    run_example()
}
