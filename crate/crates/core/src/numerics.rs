//! Singular values of small dense matrices and the condition number.
//!
//! The kernel is a one-sided (Hestenes) Jacobi iteration: plane rotations are
//! applied to pairs of columns until every pair is numerically orthogonal, at
//! which point the column norms are the singular values. It is slow for large
//! matrices but computes small singular values to high relative accuracy,
//! which is what separates near-collinear gain submatrices from exactly
//! singular ones.

use serde::{Deserialize, Serialize};

use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;

const MAX_SWEEPS: usize = 80;

/// Singular values in descending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct SingularSpectrum<T> {
    pub values: Vec<T>,
}

impl<T: Scalar> SingularSpectrum<T> {
    /// Largest singular value (zero for an empty spectrum).
    pub fn max(&self) -> T {
        self.values.first().copied().unwrap_or_else(T::zero)
    }

    /// Smallest singular value (zero for an empty spectrum).
    pub fn min(&self) -> T {
        self.values.last().copied().unwrap_or_else(T::zero)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Condition number with the reason it is infinite, if it is.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionNumber<T> {
    Finite(T),
    /// Smallest singular value below `singular_tol` times the largest.
    Singular,
    /// Every entry is zero.
    ZeroMatrix,
}

impl<T: Scalar> ConditionNumber<T> {
    /// The condition number as an extended real (`+inf` unless finite).
    pub fn value(&self) -> T {
        match *self {
            ConditionNumber::Finite(v) => v,
            ConditionNumber::Singular | ConditionNumber::ZeroMatrix => T::infinity(),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ConditionNumber::Finite(_))
    }
}

/// Computes all `min(rows, cols)` singular values of `m`, largest first.
pub fn singular_values<T: Scalar>(m: &DenseMatrix<T>) -> SingularSpectrum<T> {
    // Work on the orientation with at least as many rows as columns so the
    // column count equals the number of singular values.
    let tall = if m.cols() > m.rows() {
        m.transpose()
    } else {
        m.clone()
    };
    let (rows, cols) = tall.shape();
    if cols == 0 {
        return SingularSpectrum { values: Vec::new() };
    }

    let scale = tall.max_abs();
    if scale == T::zero() {
        return SingularSpectrum {
            values: vec![T::zero(); cols],
        };
    }

    let mut columns: Vec<Vec<T>> = (0..cols)
        .map(|j| (0..rows).map(|i| tall[(i, j)] / scale).collect())
        .collect();

    let eps = T::epsilon();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let (alpha, beta, gamma) = gram(&columns[p], &columns[q]);
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (gamma + gamma);
                let t = zeta.signum() / (zeta.abs() + T::one().hypot(zeta));
                let c = T::one() / T::one().hypot(t);
                let s = c * t;
                let (left, right) = columns.split_at_mut(q);
                let (cp, cq) = (&mut left[p], &mut right[0]);
                for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
                    let (xp, yq) = (*x, *y);
                    *x = c * xp - s * yq;
                    *y = s * xp + c * yq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut values: Vec<T> = columns.iter().map(|c| norm(c) * scale).collect();
    values.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    SingularSpectrum { values }
}

/// `σ̄ / σ̲`, reported as singular when `σ̲ < singular_tol · σ̄`.
pub fn condition_number<T: Scalar>(m: &DenseMatrix<T>, singular_tol: T) -> ConditionNumber<T> {
    condition_from_spectrum(&singular_values(m), singular_tol)
}

pub fn condition_from_spectrum<T: Scalar>(
    spectrum: &SingularSpectrum<T>,
    singular_tol: T,
) -> ConditionNumber<T> {
    let (hi, lo) = (spectrum.max(), spectrum.min());
    if hi == T::zero() {
        ConditionNumber::ZeroMatrix
    } else if lo < singular_tol * hi {
        ConditionNumber::Singular
    } else if hi == lo {
        ConditionNumber::Finite(T::one())
    } else {
        ConditionNumber::Finite(hi / lo)
    }
}

fn gram<T: Scalar>(a: &[T], b: &[T]) -> (T, T, T) {
    a.iter().zip(b).fold(
        (T::zero(), T::zero(), T::zero()),
        |(aa, bb, ab), (&x, &y)| (aa + x * x, bb + y * y, ab + x * y),
    )
}

fn norm<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, &x| acc.hypot(x))
}
