//! Batch command layer behind the `nfcbms` binary.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 domain failure
//! (aborted initialization, lost field, blocked threat, failed suite).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::auth::{provision_tag, AllowList, KeyFile, TagUid};
use crate::battery::detect_thermal_alarm;
use crate::config::{
    load_scenario, read_json, write_json, LoadedScenario, ScenarioConfig, TagImage,
};
use crate::ec::KeyPair;
use crate::error::Error;
use crate::link::{LinkStatus, DEFAULT_BLOCK_COUNT};
use crate::orchestrator::{InitReport, MonitorReport};
use crate::threat::{inject, run_scenario, run_suite, ScenarioResult, SuiteReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    UsageError = 2,
    DomainFailure = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "nfcbms",
    version,
    about = "NFC battery sensor readout simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sign a tag UID and write its tag image.
    Provision {
        /// 16 hex characters starting with E0.
        #[arg(long)]
        uid: String,
        /// Key file; created if missing.
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also add the UID to this allowlist file (created if missing).
        #[arg(long)]
        allowlist: Option<PathBuf>,
        /// Seed for key generation when the key file does not exist.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Discovery, initialization and monitoring for every configured tag.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Print the link-command log and embed it in the report.
        #[arg(long)]
        trace: bool,
    },
    /// Baseline plus threats T1..T4.
    ThreatSuite {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// Parses `args` and runs the command. Returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                ExitStatus::UsageError.code()
            } else {
                0
            };
            let _ = e.print();
            return code;
        }
    };
    execute(cli.command).code()
}

pub fn execute(command: Command) -> ExitStatus {
    let result = match command {
        Command::Provision {
            uid,
            key,
            out,
            allowlist,
            seed,
        } => {
            cmd_provision(&key, &uid, &out, allowlist.as_deref(), seed).map(|_| ExitStatus::Success)
        }
        Command::Run {
            config,
            samples,
            out,
            seed,
            trace,
        } => cmd_run(&config, samples, &out, seed, trace).map(|(_, code)| code),
        Command::ThreatSuite { config, out, seed } => {
            cmd_threat_suite(&config, &out, seed).map(|(_, code)| code)
        }
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitStatus::UsageError
    })
}

pub fn cmd_provision(
    key_path: &Path,
    uid: &str,
    out: &Path,
    allowlist_path: Option<&Path>,
    seed: Option<u64>,
) -> Result<TagImage, Error> {
    let uid: TagUid = uid.parse()?;
    let key = if key_path.exists() {
        read_json::<KeyFile>(key_path)?.keypair()?
    } else {
        let key = match seed {
            Some(s) => KeyPair::generate(&mut ChaCha8Rng::seed_from_u64(s)),
            None => KeyPair::generate(&mut rand::thread_rng()),
        };
        write_json(key_path, &KeyFile::from_keypair(&key))?;
        log::info!("generated new key in {}", key_path.display());
        key
    };
    let signature = provision_tag(&key, &uid);
    let image = TagImage::new(uid, signature, &[[0u8; 4]; DEFAULT_BLOCK_COUNT]);
    write_json(out, &image)?;

    if let Some(path) = allowlist_path {
        let mut list: AllowList = if path.exists() {
            read_json(path)?
        } else {
            AllowList::new()
        };
        list.insert(uid);
        write_json(path, &list)?;
    }
    Ok(image)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionReport {
    pub module_id: String,
    pub uid: TagUid,
    pub discovered: bool,
    pub init: Option<InitReport>,
    pub monitor: Option<MonitorReport>,
    pub thermal_alarms: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub commands: usize,
    pub by_status: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ScenarioConfig,
    pub seed: u64,
    pub discovered: Vec<TagUid>,
    pub sessions: Vec<SessionReport>,
    pub threat: Option<ScenarioResult>,
    pub trace_summary: TraceSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<String>>,
    pub succeeded: bool,
    pub failures: Vec<String>,
}

/// Runs a resolved scenario: discovery, then per tag a (cached or full)
/// initialization followed by `samples` monitoring steps.
pub fn run_loaded(
    loaded: &LoadedScenario,
    samples: usize,
    keep_trace: bool,
) -> Result<RunReport, Error> {
    let mut failures = Vec::new();
    let mut blueprint = loaded.blueprint.clone();
    let mut threat = None;

    if let Some(scenario) = &loaded.config.threat {
        let result = run_scenario(scenario, &blueprint, loaded.seed)?;
        if result.blocked {
            failures.push(format!(
                "threat {:?} blocked by {:?}",
                scenario.id, result.blocking_countermeasure
            ));
        } else {
            failures.push(format!("threat {:?} was NOT blocked", scenario.id));
        }
        threat = Some(result);
        blueprint = inject(scenario, &blueprint, loaded.seed)?.blueprint;
    }

    let mut sim = blueprint.build()?;
    let discovered = sim.discover();
    let mut sessions = Vec::new();
    let modules = sim.modules().to_vec();
    for module in &modules {
        let uid = module.tag_uid;
        let mut session = SessionReport {
            module_id: module.id.clone(),
            uid,
            discovered: discovered.contains(&uid),
            init: None,
            monitor: None,
            thermal_alarms: 0,
        };
        if !session.discovered {
            failures.push(format!("{}: tag {uid} not discovered (NoTag)", module.id));
            sessions.push(session);
            continue;
        }
        let init = sim.resume_session(&uid)?;
        if init.succeeded() {
            let monitor = sim.run_monitoring(&uid, samples)?;
            session.thermal_alarms = monitor
                .samples
                .iter()
                .filter(|s| detect_thermal_alarm(&s.status, blueprint.alarm_threshold_dc))
                .count();
            if let Some(lost) = &monitor.field_lost {
                failures.push(format!(
                    "{}: field lost after {} samples ({:?})",
                    module.id, lost.after_samples, lost.status
                ));
            }
            session.monitor = Some(monitor);
        } else {
            failures.push(format!("{}: init {:?}", module.id, init.final_outcome));
        }
        session.init = Some(init);
        sessions.push(session);
    }

    let trace = sim.bus().trace();
    let mut by_status = BTreeMap::new();
    for entry in trace {
        *by_status
            .entry(format!("{:?}", entry.status))
            .or_insert(0usize) += 1;
    }
    let trace_summary = TraceSummary {
        commands: trace.len(),
        by_status,
    };
    let trace_lines = keep_trace.then(|| trace.iter().map(|e| e.to_string()).collect());

    Ok(RunReport {
        config: loaded.config.clone(),
        seed: loaded.seed,
        discovered,
        sessions,
        threat,
        trace_summary,
        trace: trace_lines,
        succeeded: failures.is_empty(),
        failures,
    })
}

pub fn cmd_run(
    config: &Path,
    samples: usize,
    out: &Path,
    seed: Option<u64>,
    trace: bool,
) -> Result<(RunReport, ExitStatus), Error> {
    if samples == 0 {
        return Err(Error::Config("--samples must be positive".into()));
    }
    let loaded = load_scenario(config, seed)?;
    let report = run_loaded(&loaded, samples, trace)?;
    write_json(out, &report)?;
    if let Some(lines) = &report.trace {
        print_lines(lines.iter().map(String::as_str));
    }
    for f in &report.failures {
        eprintln!("{f}");
    }
    let code = if report.succeeded {
        ExitStatus::Success
    } else {
        ExitStatus::DomainFailure
    };
    Ok((report, code))
}

pub fn cmd_threat_suite(
    config: &Path,
    out: &Path,
    seed: Option<u64>,
) -> Result<(SuiteReport, ExitStatus), Error> {
    let loaded = load_scenario(config, seed)?;
    let report = run_suite(&loaded.blueprint, loaded.seed)?;
    write_json(out, &report)?;
    print_lines(report.table.lines());
    let code = if report.passed() {
        ExitStatus::Success
    } else {
        ExitStatus::DomainFailure
    };
    Ok((report, code))
}

/// Writes to stdout, stopping quietly once the reader goes away.
fn print_lines<'a>(lines: impl Iterator<Item = &'a str>) {
    let mut stdout = std::io::stdout().lock();
    for line in lines {
        if writeln!(stdout, "{line}").is_err() {
            break;
        }
    }
}

/// Counts link statuses other than `Ok` in a run, for quick summaries.
pub fn failed_link_statuses(report: &RunReport) -> usize {
    report
        .trace_summary
        .by_status
        .iter()
        .filter(|(k, _)| k.as_str() != format!("{:?}", LinkStatus::Ok))
        .map(|(_, v)| v)
        .sum()
}
