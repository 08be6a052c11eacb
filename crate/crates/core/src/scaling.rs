//! Typical-move scaling and its inverse.
//!
//! Each MV column is multiplied by its typical move size, then each CV row is
//! divided by its largest resulting magnitude, so every non-zero row of the
//! scaled matrix peaks at exactly ±1.

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, ShapeError};
use crate::matrix::DenseMatrix;
use crate::model_io::{validate_model, GainModel};
use crate::scalar::Scalar;

/// Scaled gains together with the diagonal factors that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct ScaledGainMatrix<T> {
    pub values: DenseMatrix<T>,
    /// Per-MV factors (the typical move sizes).
    pub col_scales: Vec<T>,
    /// Per-CV factors, `1 / max_j |gain·move|`; 1 for all-zero rows.
    pub row_scales: Vec<T>,
    pub mv_names: Vec<String>,
    pub cv_names: Vec<String>,
    /// Rows whose gains are all zero; they are left unscaled.
    pub zero_rows: Vec<usize>,
}

impl<T: Scalar> ScaledGainMatrix<T> {
    /// The scaled gains as a model with unit move sizes.
    pub fn to_model(&self) -> GainModel<T> {
        GainModel::from_parts(
            self.mv_names.iter().map(|n| (n.clone(), T::one())),
            self.cv_names.iter().cloned(),
            self.values.clone(),
        )
    }

    pub fn shape(&self) -> (usize, usize) {
        self.values.shape()
    }
}

/// Applies typical-move scaling to a valid model.
pub fn typical_move_scale<T: Scalar>(model: &GainModel<T>) -> Result<ScaledGainMatrix<T>, ModelError> {
    if let Some(v) = validate_model(model).errors().next() {
        return Err(ModelError::Invalid(v.clone()));
    }

    let col_scales = model.delta_moves();
    let moved = DenseMatrix::from_fn(model.n_cvs(), model.n_mvs(), |i, j| {
        model.gains[(i, j)] * col_scales[j]
    });

    let mut row_scales = Vec::with_capacity(moved.rows());
    let mut zero_rows = Vec::new();
    let mut values = moved.clone();
    for i in 0..moved.rows() {
        let peak = moved
            .row(i)
            .iter()
            .fold(T::zero(), |acc, x| acc.max(x.abs()));
        if peak == T::zero() {
            zero_rows.push(i);
            row_scales.push(T::one());
            continue;
        }
        // Divide rather than multiply by the reciprocal so the peak lands on ±1 exactly.
        for j in 0..moved.cols() {
            values[(i, j)] = moved[(i, j)] / peak;
        }
        row_scales.push(T::one() / peak);
    }

    Ok(ScaledGainMatrix {
        values,
        col_scales,
        row_scales,
        mv_names: model.mv_names(),
        cv_names: model.cv_names(),
        zero_rows,
    })
}

/// Maps scaled-domain values back to engineering units using the factors
/// retained in `scaled`: `gain[i][j] = value[i][j] / (row_scale[i] · col_scale[j])`.
pub fn unscale<T: Scalar>(
    scaled: &ScaledGainMatrix<T>,
    replacement_values: &DenseMatrix<T>,
) -> Result<DenseMatrix<T>, ShapeError> {
    if replacement_values.shape() != scaled.values.shape() {
        return Err(ShapeError::Mismatch {
            expected: scaled.values.shape(),
            found: replacement_values.shape(),
        });
    }
    Ok(DenseMatrix::from_fn(
        replacement_values.rows(),
        replacement_values.cols(),
        |i, j| replacement_values[(i, j)] / scaled.row_scales[i] / scaled.col_scales[j],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn two_by_two_model() -> GainModel<f64> {
        GainModel::from_parts(
            [("TC-REBOIL-SP", 2.0), ("FC-REFLUX-SP", 10.0)],
            ["AI-RVP-PV", "AI-DIST-C5"],
            DenseMatrix::from_rows(vec![vec![-0.1942, -0.0029], vec![0.1843, -0.0288]]).unwrap(),
        )
    }

    #[test]
    fn worked_two_by_two() {
        let s = typical_move_scale(&two_by_two_model()).unwrap();
        let expect = [[-1.0, -0.0747], [1.0, -0.7813]];
        for (i, j, v) in s.values.indexed_iter() {
            assert!((v - expect[i][j]).abs() < 1e-3);
        }
        assert_eq!(s.values[(0, 0)], -1.0);
        assert_eq!(s.values[(1, 0)], 1.0);
    }

    #[test]
    fn single_element_scales_to_unity() {
        let m = GainModel::from_parts(
            [("u", 3.0)],
            ["y"],
            DenseMatrix::from_rows(vec![vec![5.0]]).unwrap(),
        );
        let s = typical_move_scale(&m).unwrap();
        assert_eq!(s.values[(0, 0)], 1.0);
        assert_relative_eq!(s.row_scales[0], 1.0 / 15.0, max_relative = 1e-15);
    }

    #[test]
    fn zero_row_left_alone() {
        let mut m = two_by_two_model();
        m.gains[(1, 0)] = 0.0;
        m.gains[(1, 1)] = 0.0;
        let s = typical_move_scale(&m).unwrap();
        assert_eq!(s.zero_rows, vec![1]);
        assert_eq!(s.row_scales[1], 1.0);
        assert_eq!(s.values.row(1), &[0.0, 0.0]);
    }

    #[test]
    fn invalid_model_rejected() {
        let mut m = two_by_two_model();
        m.mvs[0].delta_move = 0.0;
        assert!(typical_move_scale(&m).is_err());
    }

    #[test]
    fn unscale_round_trip_and_zeros() {
        let m = two_by_two_model();
        let s = typical_move_scale(&m).unwrap();
        let back = unscale(&s, &s.values).unwrap();
        for (i, j, g) in m.gains.indexed_iter() {
            assert_relative_eq!(back[(i, j)], g, max_relative = 1e-12);
        }
        let zeros = unscale(&s, &DenseMatrix::zeros(2, 2)).unwrap();
        assert!(zeros.as_slice().iter().all(|&x| x == 0.0));
        assert!(unscale(&s, &DenseMatrix::zeros(2, 3)).is_err());
    }
}
