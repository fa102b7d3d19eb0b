//! Streaming evaluation: feed each sequence to a tracker one frame at a
//! time, time every `step`, score the final estimates against ground truth.

mod contract;
mod control;

pub use contract::{Estimates, Mode, StereoFrame, Tracker, TrackerError, TrackerInit};
pub use control::ControlTracker;

use crate::dataset::{open_frame_stream, CameraCalibration, Dataset, DatasetError, Eye, FrameStream, Sequence, StreamError};
use crate::exec::Execution;
use crate::groundtruth::{load_or_make, GroundTruth, GtConfig};
use crate::metrics::{
    accuracy_report, efficiency_eligible, format_percent, latency_stats, nearest_distances, AccuracyReport,
    DistanceSample, LatencyStats, MetricsError, ThresholdSchedule, DEFAULT_EFFICIENCY_GATE,
};
use crate::point::{Point2, Point3};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::time::Instant;
use thiserror::Error;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Stream(#[from] StreamError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("tracker contract violated at frame {frame}: {reason}")]
    ContractViolation { frame: usize, reason: String },
    #[error("stream cursor at {yielded} while serving frame {frame}")]
    Cursor { frame: usize, yielded: usize },
    #[error("sequence has no frames")]
    EmptyStream,
    #[error("no usable sequences to evaluate")]
    NoUsableSequences,
}

/// Per-point trajectory, one entry per frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackRecord {
    pub point_id: usize,
    pub trajectory: Vec<Vec<f64>>,
    #[serde(rename = "final")]
    pub final_estimate: Vec<f64>,
}

/// Result of streaming one sequence through a tracker.
#[derive(Clone, Debug)]
pub struct StreamRun {
    pub frames: usize,
    pub tracks: Vec<TrackRecord>,
    pub final_estimates: Option<Estimates>,
    /// Wall time of each `step` call, milliseconds. Empty unless measured.
    pub step_ms: Vec<f64>,
    pub init_ms: Option<f64>,
    /// Set when the tracker returned an error; the run stopped there.
    pub failure: Option<String>,
}

pub struct StreamInputs<'a> {
    pub left: &'a mut FrameStream,
    pub right: Option<&'a mut FrameStream>,
    pub start_points: &'a [Point2],
    pub calibration: Option<&'a CameraCalibration>,
    pub mode: Mode,
    pub measure_latency: bool,
}

fn check_cursor(stream: &FrameStream, frame: usize) -> Result<(), HarnessError> {
    if stream.frames_yielded() != frame + 1 {
        return Err(HarnessError::Cursor {
            frame,
            yielded: stream.frames_yielded(),
        });
    }
    Ok(())
}

fn check_estimates(estimates: &Estimates, expected: usize, mode: Mode, frame: usize) -> Result<(), HarnessError> {
    let violation = |reason: String| HarnessError::ContractViolation { frame, reason };
    if estimates.len() != expected {
        return Err(violation(format!(
            "returned {} estimates for {expected} start points",
            estimates.len()
        )));
    }
    if estimates.mode() != mode {
        return Err(violation(format!(
            "returned {} estimates in {} mode",
            estimates.mode().label(),
            mode.label()
        )));
    }
    if !estimates.all_finite() {
        return Err(violation("returned a non-finite coordinate".into()));
    }
    Ok(())
}

/// Streams frames `0..n` into `tracker`. `init` sees frame 0, then `step`
/// runs on every frame including frame 0.
pub fn run_streams(tracker: &mut dyn Tracker, inputs: StreamInputs<'_>) -> Result<StreamRun, HarnessError> {
    let StreamInputs {
        left,
        mut right,
        start_points,
        calibration,
        mode,
        measure_latency,
    } = inputs;
    let n = start_points.len();
    let mut run = StreamRun {
        frames: 0,
        tracks: (0..n)
            .map(|point_id| TrackRecord {
                point_id,
                trajectory: Vec::new(),
                final_estimate: Vec::new(),
            })
            .collect(),
        final_estimates: None,
        step_ms: Vec::new(),
        init_ms: None,
        failure: None,
    };

    let Some(mut left_frame) = left.next_frame()? else {
        return Err(HarnessError::EmptyStream);
    };
    let mut right_frame = match right.as_deref_mut() {
        Some(s) => s.next_frame()?,
        None => None,
    };

    let init = TrackerInit {
        start_points,
        left: &left_frame.image,
        right: right_frame.as_ref().map(|f| &f.image),
        calibration,
        mode,
    };
    let t0 = Instant::now();
    let init_result = tracker.init(&init);
    let init_elapsed = t0.elapsed();
    if measure_latency {
        run.init_ms = Some(init_elapsed.as_secs_f64() * 1e3);
    }
    if let Err(e) = init_result {
        run.failure = Some(format!("init: {e}"));
        return Ok(run);
    }

    let mut frame = 0;
    loop {
        check_cursor(left, frame)?;
        if let Some(r) = right.as_deref() {
            check_cursor(r, frame)?;
        }
        let view = StereoFrame {
            index: frame,
            left: &left_frame.image,
            right: right_frame.as_ref().map(|f| &f.image),
        };
        let t0 = Instant::now();
        let result = tracker.step(&view);
        let elapsed = t0.elapsed();
        if measure_latency {
            run.step_ms.push(elapsed.as_secs_f64() * 1e3);
        }
        let estimates = match result {
            Ok(e) => e,
            Err(e) => {
                run.failure = Some(format!("frame {frame}: {e}"));
                return Ok(run);
            }
        };
        check_estimates(&estimates, n, mode, frame)?;
        for (track, c) in run.tracks.iter_mut().zip(estimates.coords()) {
            track.trajectory.push(c);
        }
        run.frames = frame + 1;
        run.final_estimates = Some(estimates);

        match left.next_frame()? {
            Some(f) => left_frame = f,
            None => break,
        }
        if let Some(r) = right.as_deref_mut() {
            right_frame = r.next_frame()?;
            if right_frame.is_none() {
                return Err(DatasetError::Invariant("right stream ended before the left one".into()).into());
            }
        }
        frame += 1;
    }

    for track in &mut run.tracks {
        track.final_estimate = track.trajectory.last().cloned().unwrap_or_default();
    }
    Ok(run)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SequenceStatus {
    Ok,
    /// Tracker error or unreadable frame; every point scores as a miss.
    Failed { reason: String },
    ContractViolation { frame: usize, reason: String },
    /// Not scored and not counted in `N`.
    Excluded { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceResult {
    pub sequence_id: String,
    pub frames: usize,
    pub points: usize,
    /// Ground truth was read from `gt.json` rather than derived on the fly.
    pub gt_from_file: bool,
    #[serde(flatten)]
    pub status: SequenceStatus,
    /// Final-frame error per start point; `null` for a point that was never
    /// estimated (scored as a miss at every threshold).
    pub distances: Vec<Option<f64>>,
    pub tracks: Vec<TrackRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatencySection {
    pub stats: LatencyStats,
    pub init: Option<LatencyStats>,
    pub efficiency_gate: f64,
    /// Whether the run's average accuracy clears the gate.
    pub eligible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlBlock {
    pub accuracy: AccuracyReport,
}

/// Machine-readable evaluation result. See `docs/report-schema.md`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub mode: Mode,
    pub tracker: String,
    pub accuracy: AccuracyReport,
    pub latency: Option<LatencySection>,
    pub control: Option<ControlBlock>,
    pub contract_violations: usize,
    pub failed_sequences: usize,
    pub excluded_sequences: usize,
    pub sequences: Vec<SequenceResult>,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let report: EvalReport = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if report.schema_version != REPORT_SCHEMA_VERSION {
            return Err(format!(
                "report schema version {} is not supported (expected {REPORT_SCHEMA_VERSION})",
                report.schema_version
            ));
        }
        Ok(report)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub mode: Mode,
    /// `None` picks the default schedule for the mode.
    pub thresholds: Option<ThresholdSchedule>,
    pub measure_latency: bool,
    pub efficiency_gate: f64,
    pub with_control: bool,
    pub gt: GtConfig,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            mode: Mode::TwoD,
            thresholds: None,
            measure_latency: false,
            efficiency_gate: DEFAULT_EFFICIENCY_GATE,
            with_control: true,
            gt: GtConfig::default(),
            execution: Execution::default(),
        }
    }
}

impl EvalConfig {
    pub fn schedule(&self) -> ThresholdSchedule {
        self.thresholds.clone().unwrap_or_else(|| match self.mode {
            Mode::TwoD => ThresholdSchedule::default_2d(),
            Mode::ThreeD => ThresholdSchedule::default_3d(),
        })
    }
}

struct Evaluated {
    result: SequenceResult,
    step_ms: Vec<f64>,
    init_ms: Option<f64>,
}

fn score(estimates: &Estimates, gt: &GroundTruth) -> Result<Vec<f64>, MetricsError> {
    match estimates {
        Estimates::Points2(p) => nearest_distances::<Point2>(p, &gt.end_points()),
        Estimates::Points3(p) => nearest_distances::<Point3>(p, &gt.end_points_mm()),
    }
}

/// Streams one sequence through `tracker` and scores its final estimates.
pub fn run_sequence_eval(
    sequence: &Sequence,
    gt: &GroundTruth,
    tracker: &mut dyn Tracker,
    mode: Mode,
    measure_latency: bool,
) -> Result<StreamRun, HarnessError> {
    let mut left = open_frame_stream(sequence, Eye::Left)?;
    let mut right = match mode {
        Mode::ThreeD => Some(open_frame_stream(sequence, Eye::Right)?),
        Mode::TwoD => None,
    };
    let start = gt.start_points();
    run_streams(
        tracker,
        StreamInputs {
            left: &mut left,
            right: right.as_mut(),
            start_points: &start,
            calibration: Some(&sequence.calibration),
            mode,
            measure_latency,
        },
    )
}

fn evaluate_one(
    sequence: &Sequence,
    gt: &Result<(GroundTruth, bool), String>,
    tracker: &mut dyn Tracker,
    mode: Mode,
    measure_latency: bool,
) -> Evaluated {
    let mut result = SequenceResult {
        sequence_id: sequence.sequence_id.clone(),
        frames: 0,
        points: 0,
        gt_from_file: false,
        status: SequenceStatus::Ok,
        distances: Vec::new(),
        tracks: Vec::new(),
    };
    let excluded = |mut result: SequenceResult, reason: String| Evaluated {
        result: {
            result.status = SequenceStatus::Excluded { reason };
            result
        },
        step_ms: Vec::new(),
        init_ms: None,
    };
    let (gt, from_file) = match gt {
        Ok((gt, f)) => (gt, *f),
        Err(e) => return excluded(result, format!("ground truth unavailable: {e}")),
    };
    result.gt_from_file = from_file;
    result.points = gt.start.len();
    let has_labels = match mode {
        Mode::TwoD => !gt.end.is_empty(),
        Mode::ThreeD => !gt.end_points_mm().is_empty(),
    };
    if !has_labels {
        return excluded(result, MetricsError::NoEndLabels.to_string());
    }

    let misses = vec![None; result.points];
    match run_sequence_eval(sequence, gt, tracker, mode, measure_latency) {
        Ok(run) => {
            result.frames = run.frames;
            result.tracks = run.tracks;
            match (&run.failure, &run.final_estimates) {
                (None, Some(est)) => match score(est, gt) {
                    Ok(d) => result.distances = d.into_iter().map(Some).collect(),
                    Err(e) => return excluded(result, e.to_string()),
                },
                (Some(reason), _) => {
                    result.status = SequenceStatus::Failed { reason: reason.clone() };
                    result.distances = misses;
                }
                (None, None) => {
                    result.status = SequenceStatus::Failed {
                        reason: "no estimates produced".into(),
                    };
                    result.distances = misses;
                }
            }
            Evaluated {
                result,
                step_ms: run.step_ms,
                init_ms: run.init_ms,
            }
        }
        Err(HarnessError::ContractViolation { frame, reason }) => {
            result.status = SequenceStatus::ContractViolation { frame, reason };
            result.distances = misses;
            Evaluated {
                result,
                step_ms: Vec::new(),
                init_ms: None,
            }
        }
        Err(e) => {
            result.status = SequenceStatus::Failed { reason: e.to_string() };
            result.distances = misses;
            Evaluated {
                result,
                step_ms: Vec::new(),
                init_ms: None,
            }
        }
    }
}

fn pooled_samples(results: &[SequenceResult]) -> Vec<DistanceSample> {
    results
        .iter()
        .filter(|r| !matches!(r.status, SequenceStatus::Excluded { .. }))
        .flat_map(|r| {
            r.distances.iter().enumerate().map(|(point_id, d)| DistanceSample {
                value: d.unwrap_or(f64::INFINITY),
                point_id,
                sequence_id: r.sequence_id.clone(),
            })
        })
        .collect()
}

type Factory<'a> = dyn Fn() -> Box<dyn Tracker> + Sync + 'a;

fn evaluate_all(
    dataset: &Dataset,
    gts: &[Result<(GroundTruth, bool), String>],
    factory: &Factory<'_>,
    mode: Mode,
    measure_latency: bool,
    execution: Execution,
) -> Vec<Evaluated> {
    // Latency runs never share the machine with another sequence.
    let execution = if measure_latency { Execution::Sequential } else { execution };
    execution.map_range(dataset.sequences.len(), |i| {
        let mut tracker = factory();
        evaluate_one(&dataset.sequences[i], &gts[i], tracker.as_mut(), mode, measure_latency)
    })
}

/// Evaluates every sequence of `dataset`, pooling all points into one
/// accuracy figure, and runs the control tracker alongside.
pub fn run_dataset_eval(
    dataset: &Dataset,
    factory: &Factory<'_>,
    config: &EvalConfig,
) -> Result<EvalReport, HarnessError> {
    let schedule = config.schedule();
    let gts: Vec<Result<(GroundTruth, bool), String>> = config.execution.map(&dataset.sequences, |s| {
        load_or_make(s, &config.gt).map_err(|e| e.to_string())
    });

    let evaluated = evaluate_all(
        dataset,
        &gts,
        factory,
        config.mode,
        config.measure_latency,
        config.execution,
    );
    let tracker_name = factory().name().to_owned();
    let mut step_ms = Vec::new();
    let mut init_ms = Vec::new();
    let mut sequences = Vec::with_capacity(evaluated.len());
    for e in evaluated {
        step_ms.extend(e.step_ms);
        init_ms.extend(e.init_ms);
        sequences.push(e.result);
    }
    let usable = sequences
        .iter()
        .filter(|r| !matches!(r.status, SequenceStatus::Excluded { .. }))
        .count();
    if usable == 0 {
        return Err(HarnessError::NoUsableSequences);
    }
    let accuracy = accuracy_report(&pooled_samples(&sequences), &schedule)?;

    let control = if config.with_control {
        let lift = crate::trackers::LiftConfig::default();
        let control_factory = move || -> Box<dyn Tracker> { Box::new(ControlTracker::new(lift.clone())) };
        let runs = evaluate_all(dataset, &gts, &control_factory, config.mode, false, config.execution);
        let results: Vec<SequenceResult> = runs.into_iter().map(|e| e.result).collect();
        Some(ControlBlock {
            accuracy: accuracy_report(&pooled_samples(&results), &schedule)?,
        })
    } else {
        None
    };

    let latency = if config.measure_latency && !step_ms.is_empty() {
        Some(LatencySection {
            stats: latency_stats(&step_ms)?,
            init: latency_stats(&init_ms).ok(),
            efficiency_gate: config.efficiency_gate,
            eligible: efficiency_eligible(accuracy.average, config.efficiency_gate),
        })
    } else {
        None
    };

    let count = |f: fn(&SequenceStatus) -> bool| sequences.iter().filter(|r| f(&r.status)).count();
    Ok(EvalReport {
        schema_version: REPORT_SCHEMA_VERSION,
        mode: config.mode,
        tracker: tracker_name,
        accuracy,
        latency,
        control,
        contract_violations: count(|s| matches!(s, SequenceStatus::ContractViolation { .. })),
        failed_sequences: count(|s| matches!(s, SequenceStatus::Failed { .. })),
        excluded_sequences: count(|s| matches!(s, SequenceStatus::Excluded { .. })),
        sequences,
    })
}

fn table_row(out: &mut String, name: &str, report: &AccuracyReport) {
    let _ = write!(out, "| {name:<16} |");
    for v in &report.per_threshold {
        let _ = write!(out, " {:>7} |", format_percent(*v));
    }
    let _ = writeln!(out, " {:>7} |", format_percent(report.average));
}

/// Human-readable table: one row per method, a column per threshold, then
/// the average. Latency follows when it was measured.
pub fn render_table(report: &EvalReport) -> String {
    let mut out = String::new();
    let unit = match report.mode {
        Mode::TwoD => "px",
        Mode::ThreeD => "mm",
    };
    let _ = writeln!(
        out,
        "{} accuracy (%), {} points, thresholds in {unit}",
        report.mode.label().to_uppercase(),
        report.accuracy.points
    );
    let _ = write!(out, "| {:<16} |", "Method");
    for l in report.accuracy.thresholds.values() {
        let _ = write!(out, " {:>7} |", format!("l_i={l}"));
    }
    let _ = writeln!(out, " {:>7} |", "Avg.");
    let _ = write!(out, "|{:-<18}|", "");
    for _ in 0..=report.accuracy.thresholds.len() {
        let _ = write!(out, "{:-<9}|", "");
    }
    out.push('\n');
    table_row(&mut out, &report.tracker, &report.accuracy);
    if let Some(c) = &report.control {
        table_row(&mut out, "control", &c.accuracy);
    }

    if let Some(lat) = &report.latency {
        let s = &lat.stats;
        let _ = writeln!(out);
        let _ = writeln!(out, "Latency (ms), {} frames", s.samples);
        let _ = writeln!(out, "| {:<16} | {:>9} | {:>9} | {:>9} | {:>9} | {:>8} |", "Method", "Mean", "p95", "p99", "Score", "Eligible");
        let _ = writeln!(out, "|{:-<18}|{:-<11}|{:-<11}|{:-<11}|{:-<11}|{:-<10}|", "", "", "", "", "", "");
        let _ = writeln!(
            out,
            "| {:<16} | {:>9.2} | {:>9.2} | {:>9.2} | {:>9.2} | {:>8} |",
            report.tracker,
            s.mean_ms,
            s.p95_ms,
            s.p99_ms,
            s.score_ms,
            if lat.eligible { "yes" } else { "no" }
        );
    }
    if report.contract_violations + report.failed_sequences + report.excluded_sequences > 0 {
        let _ = writeln!(
            out,
            "\n{} contract violation(s), {} failed, {} excluded",
            report.contract_violations, report.failed_sequences, report.excluded_sequences
        );
    }
    out
}
