use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gaincond::{CellRef, ReportFormat, SelectionMode};

/// Ill-conditioning analysis and bin-grid conditioning of MPC gain matrices.
#[derive(Debug, Parser)]
#[command(name = "gaincond", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a model file and list every violation
    Validate(Common),
    /// Typical-move scaled gains with flag markers
    Scale(Analysis),
    /// Pair report (RGA and condition number) plus higher-order counts
    Analyze(AnalyzeArgs),
    /// Snap selected gains onto the bin grid
    Bin(BinArgs),
    /// List the bin boundaries for a threshold
    Grid(GridArgs),
    /// Cell-by-cell diff of two models
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write the report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Model file (.json or .csv)
    pub model: PathBuf,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long, default_value_t = 12.0)]
    pub rga_threshold: f64,
    #[arg(long, default_value_t = 59.0)]
    pub cn_threshold: f64,
    #[arg(long, default_value_t = 100.0)]
    pub cn_higher_threshold: f64,
}

#[derive(Debug, Args)]
pub struct Analysis {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub thresholds: ThresholdArgs,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub analysis: Analysis,
    /// Report every pair, not only flagged ones
    #[arg(long)]
    pub all_pairs: bool,
    /// Largest square submatrix order to scan (default: all)
    #[arg(long)]
    pub max_order: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BinArgs {
    #[command(flatten)]
    pub analysis: Analysis,
    #[arg(long, value_enum, default_value_t = Mode::RgaFlagged)]
    pub mode: Mode,
    /// Always adjust this gain (repeatable)
    #[arg(long, value_name = "CV:MV")]
    pub include: Vec<CellRef>,
    /// Never adjust this gain (repeatable)
    #[arg(long, value_name = "CV:MV")]
    pub exclude: Vec<CellRef>,
    /// Conditioned model path [default: <model>.conditioned.json]
    #[arg(long)]
    pub model_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 12.0)]
    pub rga_threshold: f64,
    /// Number of bins below B_0
    #[arg(short, default_value_t = 7, conflicts_with = "min_magnitude")]
    pub n: usize,
    /// Extend the grid down to this magnitude instead of using -n
    #[arg(long)]
    pub min_magnitude: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    pub before: PathBuf,
    pub after: PathBuf,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Table => ReportFormat::TextTable,
            Format::Json => ReportFormat::Json,
            Format::Csv => ReportFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Mode {
    RgaFlagged,
    RgaOrCnFlagged,
    AllNonzero,
    Explicit,
}

impl From<Mode> for SelectionMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::RgaFlagged => SelectionMode::RgaFlagged,
            Mode::RgaOrCnFlagged => SelectionMode::RgaOrCnFlagged,
            Mode::AllNonzero => SelectionMode::AllNonzero,
            Mode::Explicit => SelectionMode::Explicit,
        }
    }
}
