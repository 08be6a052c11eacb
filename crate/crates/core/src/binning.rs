//! Bin-grid conditioning.
//!
//! For an RGA threshold `t`, the grid ratio is `k = 1 − 1/t` and the bin
//! boundaries are `B_i = k^i` (with `B_0 = 1`, the row peak of a
//! typical-move-scaled matrix). Snapping every gain of interest to the nearest
//! boundary makes each 2×2 magnitude ratio an integer power of `k`: equal
//! powers give a collinear pair, any other power keeps the RGA number at or
//! below `t`. The largest relative change snapping can cause is
//! `δ_max = (1/t) / (2 − 1/t)`, reached at the midpoint of `[B_1, B_0]`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::analysis::{enumerate_pairs, summarize, AnalysisSummary, PairMetrics, Thresholds};
use crate::error::{ConfigError, Error, SnapError};
use crate::matrix::DenseMatrix;
use crate::model_io::GainModel;
use crate::scalar::Scalar;
use crate::scaling::{typical_move_scale, unscale, ScaledGainMatrix};

/// Refuse grids longer than this many boundaries.
const MAX_BOUNDARIES: usize = 1_000_000;

/// Geometric bin boundaries `B_0 = 1 > B_1 > … > B_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct BinGrid<T> {
    pub rga_threshold: T,
    pub b0: T,
    /// `k = 1 − 1/rga_threshold`.
    pub ratio: T,
    pub boundaries: Vec<T>,
}

impl<T: Scalar> BinGrid<T> {
    /// Index of the last boundary, `n`.
    pub fn n(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn lowest(&self) -> T {
        *self.boundaries.last().expect("grid has B_0")
    }

    /// `w_i = B_i − B_{i+1}`.
    pub fn widths(&self) -> Vec<T> {
        self.boundaries.windows(2).map(|w| w[0] - w[1]).collect()
    }
}

fn check_threshold<T: Scalar>(rga_threshold: T) -> Result<(), ConfigError> {
    if rga_threshold.is_finite() && rga_threshold > T::one() {
        Ok(())
    } else {
        Err(ConfigError::Threshold {
            name: "rga_threshold",
            value: rga_threshold.to_f64_lossy(),
        })
    }
}

/// Builds the grid for `rga_threshold` with `n` the smallest integer such
/// that `k^n <= min_magnitude`.
pub fn build_grid<T: Scalar>(rga_threshold: T, min_magnitude: T) -> Result<BinGrid<T>, ConfigError> {
    check_threshold(rga_threshold)?;
    if !(min_magnitude > T::zero() && min_magnitude <= T::one()) {
        return Err(ConfigError::MinMagnitude(min_magnitude.to_f64_lossy()));
    }
    let ratio = T::one() - rga_threshold.recip();
    let power = |i: usize| ratio.powf(T::from_usize(i).expect("index fits"));

    let estimate = (min_magnitude.ln() / ratio.ln()).ceil().max(T::zero());
    let mut n = estimate.to_usize().unwrap_or(usize::MAX);
    if n > MAX_BOUNDARIES {
        return Err(ConfigError::MinMagnitude(min_magnitude.to_f64_lossy()));
    }
    while n > 0 && power(n - 1) <= min_magnitude {
        n -= 1;
    }
    while power(n) > min_magnitude {
        n += 1;
    }

    Ok(BinGrid {
        rga_threshold,
        b0: T::one(),
        ratio,
        boundaries: (0..=n).map(power).collect(),
    })
}

/// Grid with exactly `n + 1` boundaries, for listing.
pub fn grid_with_len<T: Scalar>(rga_threshold: T, n: usize) -> Result<BinGrid<T>, ConfigError> {
    check_threshold(rga_threshold)?;
    let ratio = T::one() - rga_threshold.recip();
    Ok(BinGrid {
        rga_threshold,
        b0: T::one(),
        ratio,
        boundaries: (0..=n)
            .map(|i| ratio.powf(T::from_usize(i).expect("index fits")))
            .collect(),
    })
}

/// One snapped gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct Snapped<T> {
    pub binned: T,
    pub bin_index: usize,
    /// `(binned − g) / g · 100`.
    pub change_pct: T,
}

/// Moves `g` to the nearest grid boundary, keeping its sign.
///
/// With `B_{j+1} <= |g| < B_j`, the result is `B_j` when `|g|` lies strictly
/// above the interval midpoint and `B_{j+1}` otherwise, so an exact midpoint
/// goes down. A gain already on a boundary is returned unchanged.
pub fn snap<T: Scalar>(g: T, grid: &BinGrid<T>) -> Result<Snapped<T>, SnapError> {
    let mag = g.abs();
    if mag == T::zero() {
        return Err(SnapError::Zero);
    }
    let b = &grid.boundaries;
    if !(mag <= b[0] && mag >= grid.lowest()) {
        return Err(SnapError::OutOfRange {
            magnitude: mag.to_f64_lossy(),
            lowest: grid.lowest().to_f64_lossy(),
        });
    }

    // Boundaries are decreasing; `lower` is the first one at or below |g|.
    let lower = b.partition_point(|&x| x > mag);
    let index = if b[lower] == mag {
        lower
    } else {
        let upper = lower - 1;
        let midpoint = (b[upper] + b[lower]) / T::lit(2.0);
        if mag > midpoint { upper } else { lower }
    };
    let binned = g.signum() * b[index];
    Ok(Snapped {
        binned,
        bin_index: index,
        change_pct: (binned - g) / g * T::lit(100.0),
    })
}

/// Worst-case snapping change in percent: `100 · (1/t) / (2 − 1/t)`.
pub fn max_relative_change<T: Scalar>(rga_threshold: T) -> T {
    let inv = rga_threshold.recip();
    T::lit(100.0) * inv / (T::lit(2.0) - inv)
}

/// Which gains a conditioning run adjusts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    /// Cells of every RGA-flagged pair.
    #[default]
    RgaFlagged,
    /// Cells of every RGA- or condition-number-flagged pair.
    RgaOrCnFlagged,
    /// Every non-zero cell.
    AllNonzero,
    /// Only the include list.
    Explicit,
}

/// A gain addressed by names, written `CV:MV` on the command line.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellRef {
    pub cv: String,
    pub mv: String,
}

impl CellRef {
    pub fn new(cv: impl Into<String>, mv: impl Into<String>) -> Self {
        Self {
            cv: cv.into(),
            mv: mv.into(),
        }
    }
}

impl std::str::FromStr for CellRef {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once(':') {
            Some((cv, mv)) if !cv.is_empty() && !mv.is_empty() => Ok(CellRef::new(cv, mv)),
            _ => Err(format!("expected CV:MV, got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct ConditioningPolicy<T> {
    pub thresholds: Thresholds<T>,
    pub selection_mode: SelectionMode,
    /// Always adjusted (if non-zero).
    pub include: Vec<CellRef>,
    /// Never adjusted.
    pub exclude: Vec<CellRef>,
}

impl<T: Scalar> Default for ConditioningPolicy<T> {
    fn default() -> Self {
        Self {
            thresholds: Thresholds::default(),
            selection_mode: SelectionMode::default(),
            include: Vec::new(),
            exclude: Vec::new(),
        }
    }
}

impl<T: Scalar> ConditioningPolicy<T> {
    pub fn with_mode(mode: SelectionMode) -> Self {
        Self {
            selection_mode: mode,
            ..Self::default()
        }
    }
}

/// Picks the `(cv, mv)` cells to snap.
pub fn select_targets<T: Scalar>(
    scaled: &ScaledGainMatrix<T>,
    pairs: &[PairMetrics<T>],
    policy: &ConditioningPolicy<T>,
) -> Result<BTreeSet<(usize, usize)>, ConfigError> {
    if let Some(c) = policy.include.iter().find(|c| policy.exclude.contains(c)) {
        return Err(ConfigError::ConflictingPair {
            cv: c.cv.clone(),
            mv: c.mv.clone(),
        });
    }
    let resolve = |c: &CellRef| -> Result<(usize, usize), ConfigError> {
        let cv = scaled.cv_names.iter().position(|n| *n == c.cv);
        let mv = scaled.mv_names.iter().position(|n| *n == c.mv);
        cv.zip(mv).ok_or_else(|| ConfigError::UnknownPair {
            cv: c.cv.clone(),
            mv: c.mv.clone(),
        })
    };
    let include = policy.include.iter().map(resolve).collect::<Result<Vec<_>, _>>()?;
    let exclude = policy.exclude.iter().map(resolve).collect::<Result<Vec<_>, _>>()?;

    let values = &scaled.values;
    let mut out = BTreeSet::new();
    match policy.selection_mode {
        SelectionMode::RgaFlagged => {
            for p in pairs.iter().filter(|p| p.rga_flagged) {
                out.extend(p.cells());
            }
        }
        SelectionMode::RgaOrCnFlagged => {
            for p in pairs.iter().filter(|p| p.rga_flagged || p.cn_flagged) {
                out.extend(p.cells());
            }
        }
        SelectionMode::AllNonzero => {
            out.extend(values.indexed_iter().map(|(i, j, _)| (i, j)));
        }
        SelectionMode::Explicit => {}
    }
    out.extend(include);
    for cell in exclude {
        out.remove(&cell);
    }
    let zero_tol = policy.thresholds.singular_tol;
    out.retain(|&(i, j)| values[(i, j)].abs() >= zero_tol);
    Ok(out)
}

/// Output of [`condition_matrix`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct ConditioningResult<T> {
    pub scaled: ScaledGainMatrix<T>,
    pub grid: BinGrid<T>,
    /// Adjusted cells as `(cv, mv)`, sorted.
    pub selected: Vec<(usize, usize)>,
    /// Binned matrix in the scaled domain.
    pub binned: DenseMatrix<T>,
    /// Boundary index for every adjusted cell.
    pub bin_index: Vec<Vec<Option<usize>>>,
    /// Percent change per cell, 0 where untouched.
    pub change_pct: DenseMatrix<T>,
    /// Binned gains mapped back to engineering units.
    pub engineering: DenseMatrix<T>,
    pub flags_before: AnalysisSummary,
    pub flags_after: AnalysisSummary,
}

impl<T: Scalar> ConditioningResult<T> {
    /// Cells whose value actually moved.
    pub fn changed_cells(&self) -> Vec<(usize, usize)> {
        self.change_pct
            .indexed_iter()
            .filter(|(_, _, c)| *c != T::zero())
            .map(|(i, j, _)| (i, j))
            .collect()
    }

    /// The conditioned model in engineering units, with the source's names and moves.
    pub fn conditioned_model(&self, source: &GainModel<T>) -> GainModel<T> {
        source.with_gains(self.engineering.clone())
    }
}

/// Scales the model, flags pairs, snaps the selected gains onto the grid and
/// maps the result back to engineering units.
pub fn condition_matrix<T: Scalar>(
    model: &GainModel<T>,
    policy: &ConditioningPolicy<T>,
) -> Result<ConditioningResult<T>, Error> {
    let th = &policy.thresholds;
    th.validate()?;
    let scaled = typical_move_scale(model)?;
    let pairs = enumerate_pairs(&scaled.values, th);
    let targets = select_targets(&scaled, &pairs, policy)?;

    let min_magnitude = targets
        .iter()
        .map(|&(i, j)| scaled.values[(i, j)].abs())
        .fold(T::one(), T::min);
    let grid = build_grid(th.rga_threshold, min_magnitude)?;

    let (rows, cols) = scaled.shape();
    let mut binned = scaled.values.clone();
    let mut change_pct = DenseMatrix::zeros(rows, cols);
    let mut bin_index = vec![vec![None; cols]; rows];
    for &(i, j) in &targets {
        let s = snap(scaled.values[(i, j)], &grid)?;
        binned[(i, j)] = s.binned;
        change_pct[(i, j)] = s.change_pct;
        bin_index[i][j] = Some(s.bin_index);
    }
    let engineering = unscale(&scaled, &binned)?;

    Ok(ConditioningResult {
        flags_before: summarize(&scaled.values, th),
        flags_after: summarize(&binned, th),
        selected: targets.into_iter().collect(),
        scaled,
        grid,
        binned,
        bin_index,
        change_pct,
        engineering,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn threshold_twelve_boundaries() {
        let g = grid_with_len(12.0f64, 7).unwrap();
        let expect = [1.0, 0.9167, 0.8403, 0.7703, 0.7061, 0.6472, 0.5933, 0.5439];
        for (b, e) in g.boundaries.iter().zip(expect) {
            assert!((b - e).abs() < 5e-5, "{b} vs {e}");
        }
    }

    #[test]
    fn halving_grid() {
        let g = build_grid(2.0, 0.1).unwrap();
        assert_eq!(&g.boundaries[..4], &[1.0, 0.5, 0.25, 0.125]);
        assert_eq!(g.n(), 4);
    }

    #[test]
    fn grid_length_by_logarithm() {
        // 0.91667^39 ≈ 0.0333 <= 0.0337 < 0.91667^38 ≈ 0.0363
        let g = build_grid(12.0, 0.0337).unwrap();
        assert_eq!(g.n(), 39);
        assert_eq!(build_grid(12.0, 1.0).unwrap().n(), 0);
        // Exactly on a boundary needs no further bin.
        let b3 = (11.0f64 / 12.0).powf(3.0);
        assert_eq!(build_grid(12.0, b3).unwrap().n(), 3);
    }

    #[test]
    fn grid_errors() {
        assert!(build_grid(1.0, 0.5).is_err());
        assert!(build_grid(0.5, 0.5).is_err());
        assert!(build_grid(12.0, 0.0).is_err());
        assert!(build_grid(12.0, 1.5).is_err());
        assert!(build_grid(1e9, 1e-300).is_err());
    }

    #[test]
    fn snap_examples() {
        let grid = build_grid(12.0f64, 0.05).unwrap();
        let s = snap(-0.0754, &grid).unwrap();
        assert!((s.binned - (-0.07351)).abs() < 5e-6);
        assert!((s.change_pct - (-2.5)).abs() < 0.05);

        let s = snap(0.9666, &grid).unwrap();
        assert_eq!(s.binned, 1.0);
        assert!((s.change_pct - 3.46).abs() < 0.01);

        let b3 = grid.boundaries[3];
        let s = snap(b3, &grid).unwrap();
        assert_eq!((s.binned, s.bin_index, s.change_pct), (b3, 3, 0.0));

        let mid = (grid.boundaries[0] + grid.boundaries[1]) / 2.0;
        let s = snap(mid, &grid).unwrap();
        assert_eq!(s.binned, grid.boundaries[1]);
        assert_relative_eq!(s.change_pct.abs(), max_relative_change(12.0f64), max_relative = 1e-12);
    }

    #[test]
    fn snap_errors() {
        let grid = build_grid(12.0, 0.5).unwrap();
        assert_eq!(snap(0.0, &grid), Err(SnapError::Zero));
        assert!(matches!(snap(1.01, &grid), Err(SnapError::OutOfRange { .. })));
        assert!(matches!(snap(0.01, &grid), Err(SnapError::OutOfRange { .. })));
    }

    #[test]
    fn delta_max_values() {
        assert!((max_relative_change(12.0f64) - 4.35).abs() < 0.01);
        assert!((max_relative_change(6.0f64) - 9.09).abs() < 0.01);
        assert_relative_eq!(max_relative_change(2.0), 100.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn cell_ref_parsing() {
        let c: CellRef = "DP-DEBUT-PV:FI-FEED-PV".parse().unwrap();
        assert_eq!(c, CellRef::new("DP-DEBUT-PV", "FI-FEED-PV"));
        assert!("nocolon".parse::<CellRef>().is_err());
        assert!(":MV".parse::<CellRef>().is_err());
    }

    fn scaled_two_by_two() -> GainModel<f64> {
        GainModel::from_parts(
            [("MV1", 1.0), ("MV2", 1.0)],
            ["CV1", "CV2"],
            DenseMatrix::from_rows(vec![vec![-1.0, -0.0754], vec![1.0, -0.7813]]).unwrap(),
        )
    }

    #[test]
    fn two_by_two_all_nonzero() {
        let r = condition_matrix(&scaled_two_by_two(), &ConditioningPolicy::with_mode(SelectionMode::AllNonzero))
            .unwrap();
        let expect = [-1.0, -0.07351, 1.0, -0.77025];
        for (v, e) in r.binned.as_slice().iter().zip(expect) {
            assert!((v - e).abs() < 5e-6, "{v} vs {e}");
        }
        assert_eq!(r.changed_cells(), vec![(0, 1), (1, 1)]);
        assert_eq!(r.bin_index[0][0], Some(0));
    }

    #[test]
    fn selection_lists() {
        let model = scaled_two_by_two();
        let scaled = typical_move_scale(&model).unwrap();
        let pairs = enumerate_pairs(&scaled.values, &Thresholds::default());
        let mut policy = ConditioningPolicy::<f64>::default();
        assert!(select_targets(&scaled, &pairs, &policy).unwrap().is_empty());

        policy.include.push(CellRef::new("CV2", "MV2"));
        assert_eq!(
            select_targets(&scaled, &pairs, &policy).unwrap().into_iter().collect::<Vec<_>>(),
            vec![(1, 1)]
        );

        policy.exclude.push(CellRef::new("CV2", "MV2"));
        assert!(matches!(
            select_targets(&scaled, &pairs, &policy),
            Err(ConfigError::ConflictingPair { .. })
        ));

        let policy = ConditioningPolicy::<f64> {
            include: vec![CellRef::new("CV9", "MV1")],
            ..Default::default()
        };
        assert!(matches!(
            select_targets(&scaled, &pairs, &policy),
            Err(ConfigError::UnknownPair { .. })
        ));

        let policy = ConditioningPolicy::<f64> {
            selection_mode: SelectionMode::AllNonzero,
            exclude: vec![CellRef::new("CV1", "MV1")],
            ..Default::default()
        };
        assert_eq!(select_targets(&scaled, &pairs, &policy).unwrap().len(), 3);
    }

    #[test]
    fn zero_cells_never_selected() {
        let model = GainModel::from_parts(
            [("a", 1.0), ("b", 1.0)],
            ["x", "y"],
            DenseMatrix::from_rows(vec![vec![1.0, 0.0], vec![0.3, 0.8]]).unwrap(),
        );
        let policy = ConditioningPolicy::<f64> {
            selection_mode: SelectionMode::AllNonzero,
            include: vec![CellRef::new("x", "b")],
            ..Default::default()
        };
        let r = condition_matrix(&model, &policy).unwrap();
        assert_eq!(r.selected, vec![(0, 0), (1, 0), (1, 1)]);
        assert_eq!(r.binned[(0, 1)], 0.0);
    }

    #[test]
    fn on_grid_model_unchanged() {
        let b = |i: i32| (11.0f64 / 12.0).powf(i as f64);
        let model = GainModel::from_parts(
            [("a", 1.0), ("b", 1.0), ("c", 1.0)],
            ["x", "y"],
            DenseMatrix::from_rows(vec![vec![1.0, -b(3), b(20)], vec![-b(1), 1.0, b(7)]]).unwrap(),
        );
        let r = condition_matrix(&model, &ConditioningPolicy::with_mode(SelectionMode::AllNonzero))
            .unwrap();
        assert!(r.changed_cells().is_empty());
        assert_eq!(r.binned, model.gains);
        assert_eq!(r.engineering, model.gains);
    }
}
