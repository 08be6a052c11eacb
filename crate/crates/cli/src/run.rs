use std::path::{Path, PathBuf};

use gaincond::model_io::report::{
    compare_models, AnalysisReport, CompareReport, ConditioningReport, GridReport, PairReport,
    ScaledReport,
};
use gaincond::{
    build_grid, collinear_pairs, condition_matrix, enumerate_pairs, grid_with_len,
    higher_order_scan, max_relative_change, parse_model, parse_model_unchecked, serialize_report,
    typical_move_scale, validate_model, write_model, ConditioningPolicy, ConfigError, Error,
    GainModel64, ModelError, ModelFormat, PairSummary, Report, ReportFormat, Thresholds64,
};
use serde_json::{json, Value};

use crate::args::{
    AnalyzeArgs, BinArgs, Cli, Command, Common, CompareArgs, GridArgs, Output, ThresholdArgs,
};

/// A failure with its exit code and the JSON written to stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub body: Value,
}

impl Failure {
    pub const VALIDATION: u8 = 1;
    pub const IO: u8 = 2;
    pub const CONFIG: u8 = 3;

    pub fn new(code: u8, kind: &str, message: impl ToString) -> Self {
        Failure {
            code,
            body: json!({ "error": { "kind": kind, "message": message.to_string() } }),
        }
    }

    fn with(mut self, key: &str, value: Value) -> Self {
        self.body["error"][key] = value;
        self
    }

    fn io(path: &Path, err: std::io::Error) -> Self {
        Failure::new(Self::IO, "io", err).with("path", json!(path.display().to_string()))
    }

    fn model(path: &Path, err: ModelError) -> Self {
        let f = match &err {
            ModelError::Syntax { line, column, .. } => Failure::new(Self::IO, "parse", &err)
                .with("line", json!(line))
                .with("column", json!(column)),
            ModelError::Invalid(v) => Failure::new(Self::VALIDATION, "validation", &err)
                .with("violation", serde_json::to_value(v).expect("violations serialize")),
        };
        f.with("path", json!(path.display().to_string()))
    }

    fn config(err: ConfigError) -> Self {
        Failure::new(Self::CONFIG, "config", err)
    }

    fn pipeline(path: &Path, err: Error) -> Self {
        match err {
            Error::Model(e) => Failure::model(path, e),
            Error::Config(e) => Failure::config(e),
            other => Failure::new(Self::CONFIG, "config", other),
        }
    }
}

/// Runs one command. On success returns the exit code (0, or 1 when
/// `validate` finds errors).
pub fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Validate(args) => validate(args),
        Command::Scale(args) => {
            let th = thresholds(&args.thresholds)?;
            let model = load(&args.common.model)?;
            let scaled = typical_move_scale(&model).map_err(|e| Failure::model(&args.common.model, e))?;
            let pairs = enumerate_pairs(&scaled.values, &th);
            emit(&ScaledReport::new(scaled, &pairs), &args.common.output)?;
            Ok(0)
        }
        Command::Analyze(args) => analyze(args),
        Command::Bin(args) => bin(args),
        Command::Grid(args) => grid(args),
        Command::Compare(args) => compare(args),
    }
}

fn validate(args: Common) -> Result<u8, Failure> {
    let text = read(&args.model)?;
    let report = match parse_model_unchecked::<f64>(&text, ModelFormat::from_path(&args.model)) {
        Ok(model) => validate_model(&model),
        Err(ModelError::Invalid(v)) => gaincond::ValidationReport { violations: vec![v] },
        Err(e) => return Err(Failure::model(&args.model, e)),
    };
    emit(&report, &args.output)?;
    Ok(if report.is_valid() { 0 } else { Failure::VALIDATION })
}

fn analyze(args: AnalyzeArgs) -> Result<u8, Failure> {
    let common = &args.analysis.common;
    let th = thresholds(&args.analysis.thresholds)?;
    let model = load(&common.model)?;
    let scaled = typical_move_scale(&model).map_err(|e| Failure::model(&common.model, e))?;
    let values = &scaled.values;

    let max = values.rows().min(values.cols());
    let top = args.max_order.unwrap_or(max);
    if top > max {
        return Err(Failure::config(ConfigError::Order { k: top, max }));
    }
    let higher_order = (3..=top)
        .map(|k| higher_order_scan(values, k, th.cn_higher_threshold, th.singular_tol))
        .collect::<Result<Vec<_>, _>>()
        .map_err(Failure::config)?;

    let pairs = enumerate_pairs(values, &th);
    let summary = PairSummary::from_pairs(&pairs);
    let mut report = PairReport {
        mv_names: scaled.mv_names.clone(),
        cv_names: scaled.cv_names.clone(),
        thresholds: th,
        pairs,
    };
    if !args.all_pairs {
        report = report.flagged_only();
    }
    let report = AnalysisReport {
        pairs: report,
        summary,
        collinear: collinear_pairs(values, th.singular_tol),
        higher_order,
    };
    emit(&report, &common.output)?;
    Ok(0)
}

fn bin(args: BinArgs) -> Result<u8, Failure> {
    let common = &args.analysis.common;
    let policy = ConditioningPolicy {
        thresholds: thresholds(&args.analysis.thresholds)?,
        selection_mode: args.mode.into(),
        include: args.include,
        exclude: args.exclude,
    };
    let model = load(&common.model)?;
    let result = condition_matrix(&model, &policy).map_err(|e| Failure::pipeline(&common.model, e))?;

    let model_out = args
        .model_out
        .unwrap_or_else(|| default_model_out(&common.model));
    let conditioned = result.conditioned_model(&model);
    write(&model_out, &write_model(&conditioned, ModelFormat::Json))?;
    emit(&ConditioningReport { result }, &common.output)?;
    Ok(0)
}

fn grid(args: GridArgs) -> Result<u8, Failure> {
    let grid = match args.min_magnitude {
        Some(m) => build_grid(args.rga_threshold, m),
        None => grid_with_len(args.rga_threshold, args.n),
    }
    .map_err(Failure::config)?;
    let report = GridReport {
        max_relative_change_pct: max_relative_change(args.rga_threshold),
        grid,
    };
    emit(&report, &args.output)?;
    Ok(0)
}

fn compare(args: CompareArgs) -> Result<u8, Failure> {
    let before = load(&args.before)?;
    let after = load(&args.after)?;
    let report: CompareReport<f64> =
        compare_models(&before, &after).map_err(|e| Failure::model(&args.after, e))?;
    emit(&report, &args.output)?;
    Ok(0)
}

fn thresholds(args: &ThresholdArgs) -> Result<Thresholds64, Failure> {
    let th = Thresholds64 {
        rga_threshold: args.rga_threshold,
        cn_threshold: args.cn_threshold,
        cn_higher_threshold: args.cn_higher_threshold,
        ..Default::default()
    };
    th.validate().map_err(Failure::config)?;
    Ok(th)
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::io(path, e))
}

fn load(path: &Path) -> Result<GainModel64, Failure> {
    let text = read(path)?;
    parse_model(&text, ModelFormat::from_path(path)).map_err(|e| Failure::model(path, e))
}

fn default_model_out(input: &Path) -> PathBuf {
    let stem = input.file_stem().map_or("model".into(), |s| s.to_string_lossy());
    input.with_file_name(format!("{stem}.conditioned.json"))
}

fn emit<R: Report>(report: &R, output: &Output) -> Result<(), Failure> {
    let text = serialize_report(report, ReportFormat::from(output.format));
    match &output.out {
        Some(path) => write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
