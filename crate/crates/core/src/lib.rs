//! Ill-conditioning analysis and bin-grid conditioning of steady-state gain
//! matrices for model predictive control.
//!
//! The pipeline is: load a [`GainModel`], apply [`typical_move_scale`],
//! screen every 2×2 pair with [`enumerate_pairs`] (relative gain and
//! condition number), scan larger submatrices with [`higher_order_scan`],
//! then snap selected gains onto a threshold-derived grid with
//! [`condition_matrix`].
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the `*64` aliases
//! below fix the common double-precision case.

pub mod analysis;
pub mod binning;
pub mod error;
pub mod matrix;
pub mod model_io;
pub mod numerics;
pub mod rga;
pub mod scalar;
pub mod scaling;

pub use analysis::{
    collinear_pairs, enumerate_pairs, higher_order_scan, structural_pairs, summarize,
    AnalysisSummary, HigherOrderScan, PairIndex, PairMetrics, PairSummary, Thresholds,
};
pub use binning::{
    build_grid, condition_matrix, grid_with_len, max_relative_change, select_targets, snap,
    BinGrid, CellRef, ConditioningPolicy, ConditioningResult, SelectionMode,
};
pub use error::{ConfigError, Error, ModelError, ShapeError, SnapError, ZeroGainError};
pub use matrix::DenseMatrix;
pub use model_io::{
    parse_model, parse_model_unchecked, serialize_report, validate_model, write_model, GainModel, ModelFormat, Report,
    ReportFormat, ValidationReport, Violation, ViolationCode,
};
pub use numerics::{condition_number, singular_values, ConditionNumber, SingularSpectrum};
pub use rga::{lambda_2x2, rga_2x2, rga_number, unity_scale, Degeneracy, Rga2x2};
pub use scalar::Scalar;
pub use scaling::{typical_move_scale, unscale, ScaledGainMatrix};

pub type Matrix64 = DenseMatrix<f64>;
pub type GainModel64 = GainModel<f64>;
pub type ScaledGainMatrix64 = ScaledGainMatrix<f64>;
pub type Thresholds64 = Thresholds<f64>;
pub type PairMetrics64 = PairMetrics<f64>;
pub type BinGrid64 = BinGrid<f64>;
pub type ConditioningPolicy64 = ConditioningPolicy<f64>;
pub type ConditioningResult64 = ConditioningResult<f64>;
