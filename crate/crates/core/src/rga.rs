//! Relative gain of a 2×2 gain submatrix
//!
//! ```text
//! G = | g11  g12 |      λ = 1 / (1 − r),   r = |g12·g21| / |g11·g22|
//!     | g21  g22 |      rga_number = max(|λ|, |1 − λ|)
//! ```
//!
//! The flagging scalar uses the magnitude ratio `r`. The plain signed form,
//! `λ_signed = 1 / (1 − g12·g21 / (g11·g22))`, is reported alongside it and
//! is the one tied to the unity-scaled gain `k = 1 − 1/λ_signed`.
//!
//! Both values are unchanged by any non-zero scaling of a row or a column,
//! and swapping two rows or two columns maps `λ` to `1 − λ`.

use serde::{Deserialize, Serialize};

use crate::error::ZeroGainError;
use crate::matrix::DenseMatrix;
use crate::model_io::extended;
use crate::scalar::Scalar;

/// Why a submatrix is excluded from RGA flagging.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Degeneracy {
    None,
    /// One cross product is zero: the pairing is decoupled.
    DecoupledZero,
    /// Both cross products are zero; the submatrix is singular.
    SingularZero,
    /// Gain-ratio magnitudes are equal (`r = 1`), so `λ` is infinite.
    Collinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct Rga2x2<T> {
    #[serde(with = "extended")]
    pub lambda: T,
    #[serde(with = "extended")]
    pub lambda_signed: T,
    #[serde(with = "extended")]
    pub rga_number: T,
    pub degenerate: Degeneracy,
}

/// Full 2×2 relative-gain evaluation.
///
/// Entries with `|g| < zero_tol` count as exact zeros; `|1 − r| <= collinear_tol`
/// counts as collinear.
pub fn rga_2x2<T: Scalar>(
    g11: T,
    g12: T,
    g21: T,
    g22: T,
    zero_tol: T,
    collinear_tol: T,
) -> Rga2x2<T> {
    let is_zero = |g: T| g.abs() < zero_tol;
    let diag_zero = is_zero(g11) || is_zero(g22);
    let off_zero = is_zero(g12) || is_zero(g21);
    let one = T::one();

    let degenerate = |lambda: T, degenerate| Rga2x2 {
        lambda,
        lambda_signed: lambda,
        rga_number: one,
        degenerate,
    };
    match (diag_zero, off_zero) {
        (false, true) => return degenerate(one, Degeneracy::DecoupledZero),
        (true, false) => return degenerate(T::zero(), Degeneracy::DecoupledZero),
        // Both products vanish, so the determinant does too.
        (true, true) => return degenerate(one, Degeneracy::SingularZero),
        (false, false) => {}
    }

    let diag = g11 * g22;
    let signed = (g12 * g21) / diag;
    let ratio = signed.abs();
    let lambda_signed = if (one - signed).abs() <= collinear_tol {
        T::infinity()
    } else {
        one / (one - signed)
    };

    if (one - ratio).abs() <= collinear_tol {
        return Rga2x2 {
            lambda: T::infinity(),
            lambda_signed,
            rga_number: T::infinity(),
            degenerate: Degeneracy::Collinear,
        };
    }
    let lambda = one / (one - ratio);
    Rga2x2 {
        lambda,
        lambda_signed,
        rga_number: lambda.abs().max((one - lambda).abs()),
        degenerate: Degeneracy::None,
    }
}

/// `λ` under the magnitude convention, default tolerances.
pub fn lambda_2x2<T: Scalar>(g11: T, g12: T, g21: T, g22: T) -> T {
    let tol = T::default_tol();
    rga_2x2(g11, g12, g21, g22, tol, tol).lambda
}

/// The flagging scalar `max(|λ|, |1 − λ|)`, default tolerances.
pub fn rga_number<T: Scalar>(g11: T, g12: T, g21: T, g22: T) -> T {
    let tol = T::default_tol();
    rga_2x2(g11, g12, g21, g22, tol, tol).rga_number
}

/// Rescales a 2×2 with non-zero gains to `[[1, k], [1, 1]]`, where
/// `k = g12·g21 / (g11·g22) = 1 − 1/λ_signed`.
pub fn unity_scale<T: Scalar>(
    g11: T,
    g12: T,
    g21: T,
    g22: T,
) -> Result<(DenseMatrix<T>, T), ZeroGainError> {
    if [g11, g12, g21, g22].iter().any(|g| *g == T::zero()) {
        return Err(ZeroGainError);
    }
    let k = (g12 * g21) / (g11 * g22);
    let one = T::one();
    let unity = DenseMatrix::from_rows(vec![vec![one, k], vec![one, one]])
        .expect("2x2 literal");
    Ok((unity, k))
}
