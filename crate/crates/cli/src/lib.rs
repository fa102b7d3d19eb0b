//! Command-line front end for the `trackeval` library.
//!
//! [`run`] maps a parsed command line to an [`ExitCode`]: 0 on success, 1 for
//! usage errors, 2 for data errors and 3 when a tracker broke the streaming
//! contract.

pub mod args;
pub mod config;

use args::{Cli, Command, CommonArgs, EvalArgs};
use config::{parse_thresholds, FileConfig};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;
use trackeval::dataset::{
    audit_sequence, load_dataset, Dataset, LoaderConfig, SequenceKind, SkippedSequence,
};
use trackeval::groundtruth::{make_ground_truth_all, GtConfig};
use trackeval::harness::{
    render_table, run_dataset_eval, EvalConfig, EvalReport, LatencySection, Mode, Tracker,
};
use trackeval::metrics::{ThresholdSchedule, DEFAULT_EFFICIENCY_GATE};
use trackeval::synth::{generate_dataset, SynthConfig};
use trackeval::trackers::{build_tracker, TrackerKind, TrackerParams};
use trackeval::Execution;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum ExitCode {
    Success = 0,
    Usage = 1,
    Data = 2,
    ContractViolation = 3,
}

impl ExitCode {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::Usage,
            CliError::Data(_) => ExitCode::Data,
        }
    }
}

fn data<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Data(e.to_string())
}

/// Exit status for a finished evaluation.
pub fn exit_status(report: &EvalReport) -> ExitCode {
    if report.contract_violations > 0 {
        ExitCode::ContractViolation
    } else {
        ExitCode::Success
    }
}

/// Settings after merging defaults, the config file, the environment and
/// flags, in increasing order of precedence.
#[derive(Clone, Debug)]
pub struct Settings {
    pub tracker: Option<TrackerKind>,
    pub mode: Mode,
    pub thresholds: Option<ThresholdSchedule>,
    pub latency: bool,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub efficiency_gate: f64,
    pub with_control: bool,
    pub params: TrackerParams,
    pub gt: GtConfig,
}

impl Settings {
    pub fn resolve(common: &CommonArgs, file: FileConfig) -> Result<Self, CliError> {
        let tracker = file
            .tracker
            .as_deref()
            .map(|t| t.parse::<TrackerKind>().map_err(CliError::Usage))
            .transpose()?;
        let mode = match file.mode.as_deref() {
            None | Some("2d") => Mode::TwoD,
            Some("3d") => Mode::ThreeD,
            Some(other) => return Err(CliError::Usage(format!("unknown mode {other:?} (expected 2d or 3d)"))),
        };
        let thresholds = file.thresholds.map(schedule).transpose()?;
        Ok(Self {
            tracker,
            mode,
            thresholds,
            latency: file.latency.unwrap_or(false),
            out: common.out.clone().or(file.out),
            seed: file.seed,
            jobs: common.jobs.or(file.jobs),
            efficiency_gate: file.efficiency_gate.unwrap_or(DEFAULT_EFFICIENCY_GATE),
            with_control: !file.no_control.unwrap_or(false),
            params: file.trackers,
            gt: file.gt,
        })
    }

    fn apply_eval(&mut self, args: &EvalArgs, mode: Mode) -> Result<(), CliError> {
        self.mode = mode;
        if let Some(t) = args.tracker {
            self.tracker = Some(t.into());
        }
        if let Some(list) = &args.thresholds {
            self.thresholds = Some(schedule(parse_thresholds(list).map_err(CliError::Usage)?)?);
        }
        self.latency |= args.latency;
        Ok(())
    }

    pub fn execution(&self) -> Execution {
        match self.jobs {
            Some(1) => Execution::Sequential,
            _ => Execution::Parallel,
        }
    }

    fn tracker_or_usage(&self) -> Result<TrackerKind, CliError> {
        self.tracker
            .ok_or_else(|| CliError::Usage("no tracker selected; pass --tracker or set it in the config file".into()))
    }

    fn eval_config(&self) -> EvalConfig {
        EvalConfig {
            mode: self.mode,
            thresholds: self.thresholds.clone(),
            measure_latency: self.latency,
            efficiency_gate: self.efficiency_gate,
            with_control: self.with_control,
            gt: self.gt.clone(),
            execution: self.execution(),
        }
    }

    fn loader(&self) -> LoaderConfig {
        LoaderConfig {
            min_area: self.gt.min_area,
            execution: self.execution(),
            ..LoaderConfig::default()
        }
    }
}

fn schedule(values: Vec<f64>) -> Result<ThresholdSchedule, CliError> {
    ThresholdSchedule::new(values).map_err(|e| CliError::Usage(e.to_string()))
}

/// Where command output goes. With an output path the machine document is
/// written there and the human text goes to stdout; otherwise the machine
/// document goes to stdout and the human text to stderr.
fn emit<T: Serialize>(machine: &T, human: &str, out: Option<&Path>) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(machine).expect("output serializes");
    match out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(data)?;
            }
            std::fs::write(path, json + "\n")
                .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
            print!("{human}");
        }
        None => {
            println!("{json}");
            eprint!("{human}");
        }
    }
    Ok(())
}

/// Runs one parsed command line.
pub fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let file = match &cli.common.config {
        Some(path) => FileConfig::load(path).map_err(CliError::Usage)?,
        None => FileConfig::default(),
    };
    let mut settings = Settings::resolve(&cli.common, file)?;
    if let Some(jobs) = settings.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        trackeval::exec::configure_threads(jobs);
    }
    match cli.command {
        Command::Validate { root } => validate(&root, &settings),
        Command::MakeGt { root } => make_gt(&root, &settings),
        Command::Eval2d(args) => {
            settings.apply_eval(&args, Mode::TwoD)?;
            eval(&args.root, &settings)
        }
        Command::Eval3d(args) => {
            settings.apply_eval(&args, Mode::ThreeD)?;
            eval(&args.root, &settings)
        }
        Command::Latency { root, tracker, mode } => {
            if let Some(t) = tracker {
                settings.tracker = Some(t.into());
            }
            if let Some(m) = mode {
                settings.mode = m.into();
            }
            settings.latency = true;
            latency(&root, &settings)
        }
        Command::Synth { synth_config, seed } => {
            if seed.is_some() {
                settings.seed = seed;
            }
            synth(&synth_config, &settings)
        }
        Command::Report { report } => render_report(&report),
    }
}

fn load(root: &Path, settings: &Settings) -> Result<Dataset, CliError> {
    load_dataset(root, &settings.loader()).map_err(data)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SequenceSummary {
    pub sequence_id: String,
    pub session_id: String,
    pub kind: SequenceKind,
    pub frames: usize,
    pub points: usize,
    pub duration_s: f64,
    pub frame_size: [u32; 2],
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AuditEntry {
    pub sequence_id: String,
    pub issues: Vec<String>,
}

/// Machine output of `validate`.
#[derive(Debug, Serialize, Deserialize)]
pub struct ValidationSummary {
    pub sequences: usize,
    pub total_points: usize,
    pub sessions: Vec<String>,
    pub in_vivo_sessions: usize,
    pub ex_vivo_sessions: usize,
    pub in_vivo_sequences: usize,
    pub ex_vivo_sequences: usize,
    pub total_frames: usize,
    pub mean_clip_s: f64,
    /// Population standard deviation of clip length.
    pub std_clip_s: f64,
    pub all_frames_nominal: bool,
    pub skipped: Vec<SkippedSequence>,
    pub audit: Vec<AuditEntry>,
    pub per_sequence: Vec<SequenceSummary>,
}

fn validation_summary(dataset: &Dataset, execution: Execution) -> ValidationSummary {
    let s = &dataset.summary;
    let durations: Vec<f64> = dataset.sequences.iter().map(|q| q.duration_s()).collect();
    let std_clip_s = if durations.is_empty() {
        0.0
    } else {
        let var = durations.iter().map(|d| (d - s.mean_clip_s).powi(2)).sum::<f64>() / durations.len() as f64;
        var.sqrt()
    };
    let audit = execution
        .map(&dataset.sequences, |q| AuditEntry {
            sequence_id: q.sequence_id.clone(),
            issues: audit_sequence(q),
        })
        .into_iter()
        .filter(|a| !a.issues.is_empty())
        .collect();
    ValidationSummary {
        sequences: s.sequences,
        total_points: s.total_points,
        sessions: s.sessions.clone(),
        in_vivo_sessions: s.in_vivo_sessions,
        ex_vivo_sessions: s.ex_vivo_sessions,
        in_vivo_sequences: s.in_vivo_sequences,
        ex_vivo_sequences: s.ex_vivo_sequences,
        total_frames: s.total_frames,
        mean_clip_s: s.mean_clip_s,
        std_clip_s,
        all_frames_nominal: s.all_frames_nominal,
        skipped: dataset.skipped.clone(),
        audit,
        per_sequence: dataset
            .sequences
            .iter()
            .map(|q| SequenceSummary {
                sequence_id: q.sequence_id.clone(),
                session_id: q.session_id.clone(),
                kind: q.kind,
                frames: q.frame_count(),
                points: q.point_count,
                duration_s: q.duration_s(),
                frame_size: [q.frame_size.0, q.frame_size.1],
            })
            .collect(),
    }
}

fn validation_text(v: &ValidationSummary) -> String {
    let mut out = format!(
        "sequences: {}\npoints: {}\nsessions: {} {{{}}}\nin-vivo / ex-vivo sessions: {} / {}\n\
         in-vivo / ex-vivo sequences: {} / {}\nframes: {}\nclip length: {:.2} ± {:.2} s\n\
         all frames 1280x1024: {}\nskipped: {}\n",
        v.sequences,
        v.total_points,
        v.sessions.len(),
        v.sessions.join(","),
        v.in_vivo_sessions,
        v.ex_vivo_sessions,
        v.in_vivo_sequences,
        v.ex_vivo_sequences,
        v.total_frames,
        v.mean_clip_s,
        v.std_clip_s,
        if v.all_frames_nominal { "yes" } else { "no" },
        v.skipped.len(),
    );
    for s in &v.skipped {
        out += &format!("  skipped {}: {}\n", s.path, s.reason);
    }
    for a in &v.audit {
        for issue in &a.issues {
            out += &format!("  {}: {issue}\n", a.sequence_id);
        }
    }
    out
}

fn validate(root: &Path, settings: &Settings) -> Result<ExitCode, CliError> {
    let dataset = load(root, settings)?;
    let summary = validation_summary(&dataset, settings.execution());
    emit(&summary, &validation_text(&summary), settings.out.as_deref())?;
    if dataset.sequences.is_empty() {
        return Err(CliError::Data(format!("no loadable sequences under {}", root.display())));
    }
    Ok(ExitCode::Success)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GtOutcome {
    pub sequence_id: String,
    pub start_points: usize,
    pub end_points: usize,
    pub triangulated_end: usize,
    pub flagged: usize,
    pub error: Option<String>,
}

fn make_gt(root: &Path, settings: &Settings) -> Result<ExitCode, CliError> {
    let dataset = load(root, settings)?;
    let results = make_ground_truth_all(&dataset.sequences, &settings.gt, settings.execution(), true);
    let outcomes: Vec<GtOutcome> = dataset
        .sequences
        .iter()
        .zip(results)
        .map(|(seq, r)| match r {
            Ok(gt) => GtOutcome {
                sequence_id: seq.sequence_id.clone(),
                start_points: gt.start.len(),
                end_points: gt.end.len(),
                triangulated_end: gt.end.iter().filter(|p| p.position_mm.is_some()).count(),
                flagged: gt.start.iter().chain(&gt.end).filter(|p| p.flagged).count(),
                error: None,
            },
            Err(e) => GtOutcome {
                sequence_id: seq.sequence_id.clone(),
                start_points: 0,
                end_points: 0,
                triangulated_end: 0,
                flagged: 0,
                error: Some(e.to_string()),
            },
        })
        .collect();
    let mut text = String::new();
    for o in &outcomes {
        text += &match &o.error {
            None => format!(
                "{}: {} start, {} end ({} triangulated), {} flagged\n",
                o.sequence_id, o.start_points, o.end_points, o.triangulated_end, o.flagged
            ),
            Some(e) => format!("{}: error: {e}\n", o.sequence_id),
        };
    }
    emit(&outcomes, &text, settings.out.as_deref())?;
    if outcomes.is_empty() {
        return Err(CliError::Data(format!("no loadable sequences under {}", root.display())));
    }
    if outcomes.iter().any(|o| o.error.is_some()) {
        return Ok(ExitCode::Data);
    }
    Ok(ExitCode::Success)
}

/// Evaluates `dataset` with trackers from `factory` under `settings`.
pub fn evaluate(
    dataset: &Dataset,
    factory: &(dyn Fn() -> Box<dyn Tracker> + Sync),
    config: &EvalConfig,
) -> Result<EvalReport, CliError> {
    run_dataset_eval(dataset, factory, config).map_err(data)
}

fn run_eval(root: &Path, settings: &Settings) -> Result<EvalReport, CliError> {
    let dataset = load(root, settings)?;
    let kind = settings.tracker_or_usage()?;
    let params = settings.params.clone();
    let mode = settings.mode;
    let factory = move || build_tracker(kind, mode, &params);
    evaluate(&dataset, &factory, &settings.eval_config())
}

fn eval(root: &Path, settings: &Settings) -> Result<ExitCode, CliError> {
    let report = run_eval(root, settings)?;
    emit(&report, &render_table(&report), settings.out.as_deref())?;
    Ok(exit_status(&report))
}

/// Machine output of `latency`.
#[derive(Debug, Serialize, Deserialize)]
pub struct LatencyReport {
    pub schema_version: u32,
    pub tracker: String,
    pub mode: Mode,
    pub average_accuracy: f64,
    pub latency: LatencySection,
    pub contract_violations: usize,
}

fn latency(root: &Path, settings: &Settings) -> Result<ExitCode, CliError> {
    let report = run_eval(root, settings)?;
    let section = report
        .latency
        .clone()
        .ok_or_else(|| CliError::Data("no frames were timed".into()))?;
    let out = LatencyReport {
        schema_version: report.schema_version,
        tracker: report.tracker.clone(),
        mode: report.mode,
        average_accuracy: report.accuracy.average,
        latency: section,
        contract_violations: report.contract_violations,
    };
    emit(&out, &render_table(&report), settings.out.as_deref())?;
    Ok(exit_status(&report))
}

/// Layout of a `synth` config file: the generator settings plus the output
/// directory, which is resolved against the config file's directory.
#[derive(Debug, Deserialize)]
pub struct SynthFile {
    pub out: Option<PathBuf>,
    #[serde(flatten)]
    pub config: SynthConfig,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SynthSummary {
    pub out: PathBuf,
    pub seed: u64,
    pub sequences: usize,
    pub total_points: usize,
}

fn synth(path: &Path, settings: &Settings) -> Result<ExitCode, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let file: SynthFile =
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("invalid synth config {}: {e}", path.display())))?;
    let mut cfg = file.config;
    if let Some(seed) = settings.seed {
        cfg.seed = seed;
    }
    cfg.execution = settings.execution();
    cfg.validate().map_err(CliError::Usage)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let out = match (&settings.out, file.out) {
        (Some(o), _) => o.clone(),
        (None, Some(o)) => base.join(o),
        (None, None) => return Err(CliError::Usage("no output directory; set `out` in the config or pass --out".into())),
    };
    let manifest = generate_dataset(&cfg, &out).map_err(data)?;
    let summary = SynthSummary {
        out: out.clone(),
        seed: cfg.seed,
        sequences: manifest.sequences.len(),
        total_points: manifest.total_points(),
    };
    println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
    eprintln!(
        "wrote {} sequences, {} points to {}",
        summary.sequences,
        summary.total_points,
        out.display()
    );
    Ok(ExitCode::Success)
}

fn render_report(path: &Path) -> Result<ExitCode, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    let report = EvalReport::from_json(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    print!("{}", render_table(&report));
    Ok(exit_status(&report))
}
