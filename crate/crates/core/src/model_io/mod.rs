//! Gain models, their validation, and the canonical file formats.
//!
//! The canonical format is one JSON document:
//!
//! ```json
//! {"mvs":[{"name":"TC-REBOIL-SP","delta_move":2}],
//!  "cvs":[{"name":"AI-RVP-PV"}],
//!  "gains":[[-0.1942]]}
//! ```
//!
//! with `gains` row-major, one row per CV. CSV is accepted as a convenience
//! import: an empty corner cell and the MV names on row 0, the label
//! `delta_move` and the move sizes on row 1, then one row per CV holding its
//! name followed by its gains.

mod csv_format;
mod json_format;
pub mod extended;
pub mod report;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;

pub use report::{serialize_report, Report, ReportFormat};

/// Input file format of a gain model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelFormat {
    Json,
    Csv,
}

impl ModelFormat {
    /// Guesses the format from a file name: `.csv` is CSV, anything else JSON.
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => ModelFormat::Csv,
            _ => ModelFormat::Json,
        }
    }
}

/// A manipulated variable (matrix column) and its typical move size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct ManipulatedVar<T> {
    pub name: String,
    pub delta_move: T,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<String>,
}

/// A controlled variable (matrix row).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControlledVar {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<String>,
}

/// Steady-state gain model in engineering units: `gains[cv][mv]`.
///
/// Fields are public so that invalid models can be represented and
/// reported on; use [`validate_model`] before trusting one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct GainModel<T> {
    pub mvs: Vec<ManipulatedVar<T>>,
    pub cvs: Vec<ControlledVar>,
    pub gains: DenseMatrix<T>,
}

impl<T: Scalar> GainModel<T> {
    /// Builds a model from names, move sizes and gain rows without validating it.
    pub fn from_parts<S: Into<String>>(
        mvs: impl IntoIterator<Item = (S, T)>,
        cvs: impl IntoIterator<Item = S>,
        gains: DenseMatrix<T>,
    ) -> Self {
        Self {
            mvs: mvs
                .into_iter()
                .map(|(name, delta_move)| ManipulatedVar {
                    name: name.into(),
                    delta_move,
                    units: None,
                })
                .collect(),
            cvs: cvs
                .into_iter()
                .map(|name| ControlledVar {
                    name: name.into(),
                    units: None,
                })
                .collect(),
            gains,
        }
    }

    pub fn n_mvs(&self) -> usize {
        self.mvs.len()
    }

    pub fn n_cvs(&self) -> usize {
        self.cvs.len()
    }

    pub fn mv_names(&self) -> Vec<String> {
        self.mvs.iter().map(|m| m.name.clone()).collect()
    }

    pub fn cv_names(&self) -> Vec<String> {
        self.cvs.iter().map(|c| c.name.clone()).collect()
    }

    pub fn delta_moves(&self) -> Vec<T> {
        self.mvs.iter().map(|m| m.delta_move).collect()
    }

    pub fn mv_index(&self, name: &str) -> Option<usize> {
        self.mvs.iter().position(|m| m.name == name)
    }

    pub fn cv_index(&self, name: &str) -> Option<usize> {
        self.cvs.iter().position(|c| c.name == name)
    }

    /// Same names and move sizes with a different gain matrix.
    pub fn with_gains(&self, gains: DenseMatrix<T>) -> Self {
        Self {
            mvs: self.mvs.clone(),
            cvs: self.cvs.clone(),
            gains,
        }
    }

    pub fn cast<U: Scalar>(&self) -> GainModel<U> {
        GainModel {
            mvs: self
                .mvs
                .iter()
                .map(|m| ManipulatedVar {
                    name: m.name.clone(),
                    delta_move: U::from_f64(m.delta_move.to_f64_lossy()).unwrap_or_else(U::nan),
                    units: m.units.clone(),
                })
                .collect(),
            cvs: self.cvs.clone(),
            gains: self.gains.cast(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationCode {
    EmptyModel,
    DimensionMismatch,
    EmptyName,
    DuplicateMvName,
    DuplicateCvName,
    NonPositiveDeltaMove,
    NonFiniteDeltaMove,
    NonFiniteGain,
    /// Warning: every gain in a CV row is zero.
    ZeroRow,
}

impl ViolationCode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ViolationCode::EmptyModel => "empty_model",
            ViolationCode::DimensionMismatch => "dimension_mismatch",
            ViolationCode::EmptyName => "empty_name",
            ViolationCode::DuplicateMvName => "duplicate_mv_name",
            ViolationCode::DuplicateCvName => "duplicate_cv_name",
            ViolationCode::NonPositiveDeltaMove => "non_positive_delta_move",
            ViolationCode::NonFiniteDeltaMove => "non_finite_delta_move",
            ViolationCode::NonFiniteGain => "non_finite_gain",
            ViolationCode::ZeroRow => "zero_row",
        }
    }

    pub fn severity(&self) -> Severity {
        match self {
            ViolationCode::ZeroRow => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Warning,
    Error,
}

/// Where in the model a finding applies. Indices are zero-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Location {
    Model,
    Cell { row: usize, col: usize },
    Row { row: usize },
    Column { col: usize },
    Name { name: String },
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Model => f.write_str("model"),
            Location::Cell { row, col } => write!(f, "({row}, {col})"),
            Location::Row { row } => write!(f, "row {row}"),
            Location::Column { col } => write!(f, "column {col}"),
            Location::Name { name } => write!(f, "{name}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub severity: Severity,
    pub location: Location,
    pub message: String,
}

impl Violation {
    pub fn new(code: ViolationCode, location: Location, message: impl Into<String>) -> Self {
        Self {
            code,
            severity: code.severity(),
            location,
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.code.as_str(), self.location, self.message)
    }
}

/// Every finding for a model; warnings do not make it invalid.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors().next().is_none()
    }

    pub fn errors(&self) -> impl Iterator<Item = &Violation> {
        self.violations
            .iter()
            .filter(|v| v.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Violation> {
        self.violations
            .iter()
            .filter(|v| v.severity == Severity::Warning)
    }

    pub fn has_code(&self, code: ViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }
}

/// Reports every invariant violation of `model`, plus a `zero_row` warning
/// for each CV whose gains are all zero.
pub fn validate_model<T: Scalar>(model: &GainModel<T>) -> ValidationReport {
    let mut out = Vec::new();

    if model.mvs.is_empty() || model.cvs.is_empty() {
        out.push(Violation::new(
            ViolationCode::EmptyModel,
            Location::Model,
            "model needs at least one MV and one CV",
        ));
    }
    if model.gains.shape() != (model.cvs.len(), model.mvs.len()) {
        out.push(Violation::new(
            ViolationCode::DimensionMismatch,
            Location::Model,
            format!(
                "gains are {}x{} but the model has {} CVs and {} MVs",
                model.gains.rows(),
                model.gains.cols(),
                model.cvs.len(),
                model.mvs.len()
            ),
        ));
    }

    check_names(
        model.mvs.iter().map(|m| m.name.as_str()),
        ViolationCode::DuplicateMvName,
        "MV",
        &mut out,
    );
    check_names(
        model.cvs.iter().map(|c| c.name.as_str()),
        ViolationCode::DuplicateCvName,
        "CV",
        &mut out,
    );

    for (j, mv) in model.mvs.iter().enumerate() {
        if !mv.delta_move.is_finite() {
            out.push(Violation::new(
                ViolationCode::NonFiniteDeltaMove,
                Location::Column { col: j },
                format!("delta_move of {} is {}", mv.name, mv.delta_move),
            ));
        } else if mv.delta_move <= T::zero() {
            out.push(Violation::new(
                ViolationCode::NonPositiveDeltaMove,
                Location::Column { col: j },
                format!("non-positive delta_move {} for {}", mv.delta_move, mv.name),
            ));
        }
    }

    for (i, j, g) in model.gains.indexed_iter() {
        if !g.is_finite() {
            out.push(Violation::new(
                ViolationCode::NonFiniteGain,
                Location::Cell { row: i, col: j },
                format!("gain is {g}"),
            ));
        }
    }

    for i in 0..model.gains.rows() {
        if model.gains.cols() > 0 && model.gains.row(i).iter().all(|g| *g == T::zero()) {
            let name = model.cvs.get(i).map_or("?", |c| c.name.as_str());
            out.push(Violation::new(
                ViolationCode::ZeroRow,
                Location::Row { row: i },
                format!("all gains of {name} are zero"),
            ));
        }
    }

    ValidationReport { violations: out }
}

fn check_names<'a>(
    names: impl Iterator<Item = &'a str>,
    duplicate: ViolationCode,
    kind: &str,
    out: &mut Vec<Violation>,
) {
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for (idx, name) in names.enumerate() {
        if name.trim().is_empty() {
            out.push(Violation::new(
                ViolationCode::EmptyName,
                Location::Name {
                    name: format!("{kind} #{idx}"),
                },
                format!("{kind} at position {idx} has an empty name"),
            ));
            continue;
        }
        if let Some(first) = seen.insert(name, idx) {
            out.push(Violation::new(
                duplicate,
                Location::Name {
                    name: name.to_string(),
                },
                format!("{kind} name {name} used at positions {first} and {idx}"),
            ));
        }
    }
}

/// Parses syntax and shape only; run [`validate_model`] for the semantic checks.
pub fn parse_model_unchecked<T: Scalar>(
    text: &str,
    format: ModelFormat,
) -> Result<GainModel<T>, ModelError> {
    match format {
        ModelFormat::Json => json_format::parse(text),
        ModelFormat::Csv => csv_format::parse(text),
    }
}

/// Parses a gain model and rejects it on the first invariant violation.
///
/// All-zero CV rows are accepted (they only produce warnings).
pub fn parse_model<T: Scalar>(text: &str, format: ModelFormat) -> Result<GainModel<T>, ModelError> {
    let model = parse_model_unchecked(text, format)?;
    let first_error = validate_model(&model).errors().next().cloned();
    match first_error {
        Some(v) => Err(ModelError::Invalid(v)),
        None => Ok(model),
    }
}

/// Writes a model in the requested format. Numbers use the shortest
/// representation that parses back to the same value.
pub fn write_model<T: Scalar>(model: &GainModel<T>, format: ModelFormat) -> String {
    match format {
        ModelFormat::Json => json_format::write(model),
        ModelFormat::Csv => csv_format::write(model),
    }
}
