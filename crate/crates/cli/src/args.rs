use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use trackeval::harness::Mode;
use trackeval::trackers::TrackerKind;

#[derive(Debug, Parser)]
#[command(
    name = "trackeval",
    version,
    about = "Streaming evaluation, ground truth and baselines for stereo point-tracking benchmarks",
    long_about = "Streaming evaluation, ground truth and baselines for stereo point-tracking benchmarks.\n\n\
        Every flag can also be set with a TRACKEVAL_* environment variable. Precedence is \
        built-in defaults < --config file < environment < command line.\n\n\
        Exit status: 0 success, 1 usage error, 2 data error, 3 tracker contract violation."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML run configuration.
    #[arg(long, global = true, env = "TRACKEVAL_CONFIG", value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Worker threads for data-parallel stages.
    #[arg(long, global = true, env = "TRACKEVAL_JOBS", value_name = "N")]
    pub jobs: Option<usize>,
    /// Write the machine-readable result here instead of stdout.
    #[arg(long, global = true, env = "TRACKEVAL_OUT", value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TrackerArg {
    Control,
    Template,
    Chain,
}

impl From<TrackerArg> for TrackerKind {
    fn from(t: TrackerArg) -> Self {
        match t {
            TrackerArg::Control => TrackerKind::Control,
            TrackerArg::Template => TrackerKind::Template,
            TrackerArg::Chain => TrackerKind::Chain,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    #[value(name = "2d")]
    TwoD,
    #[value(name = "3d")]
    ThreeD,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::TwoD => Mode::TwoD,
            ModeArg::ThreeD => Mode::ThreeD,
        }
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Dataset root.
    pub root: PathBuf,
    /// Tracker to evaluate.
    #[arg(long, env = "TRACKEVAL_TRACKER", value_enum)]
    pub tracker: Option<TrackerArg>,
    /// Comma-separated, strictly increasing thresholds (px in 2D, mm in 3D).
    #[arg(long, env = "TRACKEVAL_THRESHOLDS", value_name = "LIST")]
    pub thresholds: Option<String>,
    /// Time every step call; sequences then run one at a time.
    #[arg(long, env = "TRACKEVAL_LATENCY")]
    pub latency: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the dataset layout and invariants and print summary statistics.
    Validate {
        /// Dataset root.
        root: PathBuf,
    },
    /// Segment, match and triangulate the IR labels; writes gt.json per sequence.
    MakeGt {
        /// Dataset root.
        root: PathBuf,
    },
    /// Evaluate a tracker in 2D (pixels).
    Eval2d(EvalArgs),
    /// Evaluate a tracker in 3D (millimetres).
    Eval3d(EvalArgs),
    /// Profile per-frame latency of a tracker.
    Latency {
        /// Dataset root.
        root: PathBuf,
        /// Tracker to profile.
        #[arg(long, env = "TRACKEVAL_TRACKER", value_enum)]
        tracker: Option<TrackerArg>,
        /// Evaluation mode.
        #[arg(long, env = "TRACKEVAL_MODE", value_enum)]
        mode: Option<ModeArg>,
    },
    /// Render a synthetic dataset described by a TOML config.
    Synth {
        /// TOML generator settings; `out` names the dataset directory.
        #[arg(value_name = "CONFIG")]
        synth_config: PathBuf,
        /// Override the generator seed.
        #[arg(long, env = "TRACKEVAL_SEED")]
        seed: Option<u64>,
    },
    /// Render an evaluation report as a table.
    Report {
        /// JSON written by eval2d or eval3d.
        report: PathBuf,
    },
}
