//! Experiment runner behind the `tailind` binary.

pub mod args;
pub mod config;
pub mod help;
pub mod kinds;
pub mod manifest;
pub mod output;

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use tailind::config::ConfigDoc;
use tailind::{Error, Result};

use args::{Cli, Command, ReplayArgs, RunArgs};
use config::{effective_doc, ExperimentConfig, Kind};
use manifest::{OutputDigest, RunManifest, Stage, MANIFEST_FILE, MANIFEST_SCHEMA};
use output::Outputs;

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_GUARD: i32 = 3;
pub const EXIT_REPLAY_MISMATCH: i32 = 4;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config { .. } | Error::InvalidSpec(_) | Error::InvalidArgument(_) | Error::WeightConstraint { .. } => {
            EXIT_CONFIG
        }
        Error::InsufficientReplicates { .. } => EXIT_GUARD,
        Error::Format(_) | Error::Io(_) => EXIT_OTHER,
    }
}

/// One-line, location-prefixed error text.
pub fn describe(e: &Error, config: Option<&Path>) -> String {
    let file = config.map_or_else(|| "config".to_string(), |p| p.display().to_string());
    match e {
        Error::Config { line: 0, message } => format!("command line: {message}"),
        Error::Config { line, message } => format!("{file}:{line}: {message}"),
        Error::InsufficientReplicates { guard, .. } => format!("guard `{guard}` refused to run: {e}"),
        Error::InvalidSpec(_) | Error::InvalidArgument(_) | Error::WeightConstraint { .. } => {
            format!("command line: {e}")
        }
        other => other.to_string(),
    }
}

/// Runs the experiment a configuration names, without touching the disk.
pub fn execute(cfg: &ExperimentConfig) -> Result<Outputs> {
    match cfg.kind {
        Kind::Calibrate => kinds::calibrate::calibrate(cfg),
        Kind::PaperTable => kinds::calibrate::paper_table(cfg),
        Kind::Tails => kinds::tails::run(cfg),
        Kind::Coupling => kinds::coupling::run(cfg),
        Kind::Cluster => kinds::cluster::run(cfg),
        Kind::Mtc => kinds::mtc::run(cfg),
        Kind::Validate => Err(Error::Config { line: 0, message: "validate produces diagnostics, not outputs".into() }),
    }
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// Executes `cfg` and writes its outputs plus `manifest.json` into `cfg.out`.
pub fn run(cfg: &ExperimentConfig) -> Result<(RunManifest, Outputs)> {
    let started_unix = unix_now();
    let clock = Instant::now();
    let outputs = execute(cfg)?;
    let write_clock = Instant::now();
    std::fs::create_dir_all(&cfg.out)?;
    let mut digests = Vec::with_capacity(outputs.files.len());
    for f in &outputs.files {
        std::fs::write(cfg.out.join(&f.name), &f.bytes)?;
        digests.push(OutputDigest::of(&f.name, &f.bytes));
    }
    let mut stages: Vec<Stage> =
        outputs.stages.iter().map(|(name, seconds)| Stage { name: name.clone(), seconds: *seconds }).collect();
    stages.push(Stage { name: "write".into(), seconds: write_clock.elapsed().as_secs_f64() });
    let manifest = RunManifest {
        schema: MANIFEST_SCHEMA.into(),
        kind: cfg.kind.name().into(),
        code_version: env!("CARGO_PKG_VERSION").into(),
        seed: cfg.panel.as_ref().map_or(0, |p| p.seed),
        config: cfg.doc.to_text(),
        started_unix,
        wall_clock_seconds: clock.elapsed().as_secs_f64(),
        stages,
        outputs: digests,
    };
    let mut bytes = serde_json::to_vec_pretty(&manifest).map_err(|e| Error::Format(e.to_string()))?;
    bytes.push(b'\n');
    std::fs::write(cfg.out.join(MANIFEST_FILE), bytes)?;
    Ok((manifest, outputs))
}

/// Digest comparison of a replay against its manifest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayReport {
    pub out: PathBuf,
    pub matched: Vec<String>,
    /// `(file, expected sha256, actual sha256 or "missing")`.
    pub mismatched: Vec<(String, String, String)>,
    /// Files the replay produced that the manifest does not list.
    pub extra: Vec<String>,
}

impl ReplayReport {
    pub fn ok(&self) -> bool {
        self.mismatched.is_empty() && self.extra.is_empty()
    }
}

pub fn replay(manifest_path: &Path, out: Option<PathBuf>, jobs: Option<usize>) -> Result<ReplayReport> {
    let text = std::fs::read_to_string(manifest_path)?;
    let manifest: RunManifest = serde_json::from_str(&text).map_err(|e| Error::Format(format!("manifest: {e}")))?;
    if manifest.schema != MANIFEST_SCHEMA {
        return Err(Error::Format(format!("manifest schema `{}`, expected `{MANIFEST_SCHEMA}`", manifest.schema)));
    }
    let mut doc = ConfigDoc::parse(&manifest.config)?;
    let out = out.unwrap_or_else(|| manifest_path.parent().unwrap_or(Path::new(".")).join("replay"));
    doc.set("run", "out", out.display().to_string());
    if let Some(j) = jobs {
        doc.set("run", "jobs", j.to_string());
    }
    let cfg = ExperimentConfig::from_doc(doc)?;
    let (fresh, _) = run(&cfg)?;
    let mut report = ReplayReport { out, matched: Vec::new(), mismatched: Vec::new(), extra: Vec::new() };
    for expected in &manifest.outputs {
        match fresh.outputs.iter().find(|d| d.file == expected.file) {
            Some(d) if d.sha256 == expected.sha256 => report.matched.push(expected.file.clone()),
            Some(d) => report.mismatched.push((expected.file.clone(), expected.sha256.clone(), d.sha256.clone())),
            None => report.mismatched.push((expected.file.clone(), expected.sha256.clone(), "missing".into())),
        }
    }
    report.extra =
        fresh.outputs.iter().filter(|d| !manifest.outputs.iter().any(|e| e.file == d.file)).map(|d| d.file.clone()).collect();
    Ok(report)
}

fn run_kind(kind: Kind, args: &RunArgs) -> i32 {
    let path = args.config.as_deref();
    if kind == Kind::Validate {
        let diags = match effective_doc(kind, args) {
            Ok(doc) => kinds::validate::diagnostics(&doc),
            Err(e) => {
                println!("error: {}", describe(&e, path));
                return EXIT_OK;
            }
        };
        if diags.is_empty() {
            println!("ok: no diagnostics");
        }
        for d in &diags {
            match (d.line, path) {
                (0, _) | (_, None) => println!("{d}"),
                (_, Some(p)) => println!("{}", d.to_string().replacen("config:", &format!("{}:", p.display()), 1)),
            }
        }
        return EXIT_OK;
    }
    let result = effective_doc(kind, args).and_then(ExperimentConfig::from_doc).and_then(|cfg| {
        let (manifest, outputs) = run(&cfg)?;
        Ok((cfg, manifest, outputs))
    });
    match result {
        Ok((cfg, manifest, outputs)) => {
            print!("{}", outputs.summary);
            println!("wrote {} files and {MANIFEST_FILE} to {}", manifest.outputs.len(), cfg.out.display());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("tailind {}: {}", kind.name(), describe(&e, path));
            exit_code(&e)
        }
    }
}

fn run_replay(args: &ReplayArgs) -> i32 {
    match replay(&args.manifest, args.out.clone(), args.jobs) {
        Ok(report) => {
            for f in &report.matched {
                println!("ok        {f}");
            }
            for (f, want, got) in &report.mismatched {
                println!("MISMATCH  {f}: expected {want}, got {got}");
            }
            for f in &report.extra {
                println!("EXTRA     {f}");
            }
            println!("replay outputs in {}", report.out.display());
            if report.ok() {
                EXIT_OK
            } else {
                EXIT_REPLAY_MISMATCH
            }
        }
        Err(e) => {
            eprintln!("tailind replay: {}", describe(&e, Some(&args.manifest)));
            exit_code(&e)
        }
    }
}

/// Runs a parsed command line and returns the process exit status.
pub fn main_with(cli: Cli) -> i32 {
    match &cli.command {
        Command::Calibrate(a) => run_kind(Kind::Calibrate, a),
        Command::Tails(a) => run_kind(Kind::Tails, a),
        Command::Coupling(a) => run_kind(Kind::Coupling, a),
        Command::Cluster(a) => run_kind(Kind::Cluster, a),
        Command::Mtc(a) => run_kind(Kind::Mtc, a),
        Command::PaperTable(a) => run_kind(Kind::PaperTable, a),
        Command::Validate(a) => run_kind(Kind::Validate, a),
        Command::Replay(a) => run_replay(a),
    }
}
