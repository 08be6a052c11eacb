//! Exhaustive submatrix scans of a (scaled) gain matrix.
//!
//! Every 2×2 combination of two MVs and two CVs gets a condition number and
//! an RGA number; square k×k combinations for k ≥ 3 get a condition number.
//! Enumeration is lexicographic by MV indices, then CV indices.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::matrix::DenseMatrix;
use crate::model_io::extended;
use crate::numerics::{condition_number, ConditionNumber};
use crate::rga::{rga_2x2, Degeneracy};
use crate::scalar::Scalar;

/// Relative slack on the RGA comparison. A pair snapped one bin apart has an
/// RGA number equal to the threshold up to rounding and must not be flagged.
const RGA_FLAG_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct Thresholds<T> {
    /// Pairs with an RGA number above this are flagged.
    pub rga_threshold: T,
    /// Pairs with a finite condition number at or above this are flagged.
    pub cn_threshold: T,
    /// k×k submatrices (k ≥ 3) with a finite condition number above this are reported.
    pub cn_higher_threshold: T,
    /// Relative singular-value cutoff; also the exact-zero test for entries.
    pub singular_tol: T,
}

impl<T: Scalar> Default for Thresholds<T> {
    fn default() -> Self {
        Self {
            rga_threshold: T::lit(12.0),
            cn_threshold: T::lit(59.0),
            cn_higher_threshold: T::lit(100.0),
            singular_tol: T::default_tol(),
        }
    }
}

impl<T: Scalar> Thresholds<T> {
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, v) in [
            ("rga_threshold", self.rga_threshold),
            ("cn_threshold", self.cn_threshold),
            ("cn_higher_threshold", self.cn_higher_threshold),
        ] {
            if !(v.is_finite() && v > T::one()) {
                return Err(ConfigError::Threshold {
                    name,
                    value: v.to_f64_lossy(),
                });
            }
        }
        let tol = self.singular_tol;
        if !(tol > T::zero() && tol < T::lit(1e-6)) {
            return Err(ConfigError::SingularTol(tol.to_f64_lossy()));
        }
        Ok(())
    }

    pub fn is_rga_flagged(&self, rga_number: T, degenerate: Degeneracy) -> bool {
        degenerate == Degeneracy::None
            && rga_number.is_finite()
            && rga_number > self.rga_threshold * (T::one() + T::lit(RGA_FLAG_SLACK))
    }

    pub fn is_cn_flagged(&self, cond: T) -> bool {
        cond.is_finite() && cond >= self.cn_threshold
    }
}

/// Metrics of one 2×2 submatrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct PairMetrics<T> {
    pub mv_pair: (usize, usize),
    pub cv_pair: (usize, usize),
    #[serde(with = "extended")]
    pub cond: T,
    #[serde(with = "extended")]
    pub rga_number: T,
    #[serde(with = "extended")]
    pub lambda: T,
    pub rga_flagged: bool,
    pub cn_flagged: bool,
    pub degenerate: Degeneracy,
    /// The submatrix has an all-zero row or column.
    pub structural: bool,
}

impl<T: Scalar> PairMetrics<T> {
    pub fn is_flagged(&self) -> bool {
        self.rga_flagged || self.cn_flagged
    }

    /// The four `(cv, mv)` cells of the submatrix.
    pub fn cells(&self) -> [(usize, usize); 4] {
        let (c1, c2) = self.cv_pair;
        let (m1, m2) = self.mv_pair;
        [(c1, m1), (c1, m2), (c2, m1), (c2, m2)]
    }
}

/// Identifies a 2×2 submatrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PairIndex {
    pub mv_pair: (usize, usize),
    pub cv_pair: (usize, usize),
}

/// A square k×k submatrix (k ≥ 3) and its condition number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct SubmatrixMetrics<T> {
    pub mv_set: Vec<usize>,
    pub cv_set: Vec<usize>,
    #[serde(with = "extended")]
    pub cond: T,
}

/// Outcome of a k×k scan: the flagged list plus counts for every other class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct HigherOrderScan<T> {
    pub k: usize,
    pub total: usize,
    /// Finite condition number not above the threshold.
    pub below_threshold: usize,
    /// Singular to tolerance, including all-zero submatrices.
    pub singular: usize,
    pub flagged: Vec<SubmatrixMetrics<T>>,
}

/// Counts derived from a pair list.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairSummary {
    pub total: usize,
    pub rga_flagged: usize,
    pub cn_flagged: usize,
    /// Infinite condition number without a zero row or column.
    pub collinear: usize,
    pub structural: usize,
    pub degenerate: usize,
}

impl PairSummary {
    pub fn from_pairs<T: Scalar>(pairs: &[PairMetrics<T>]) -> Self {
        let mut s = PairSummary {
            total: pairs.len(),
            ..Default::default()
        };
        for p in pairs {
            s.rga_flagged += usize::from(p.rga_flagged);
            s.cn_flagged += usize::from(p.cn_flagged);
            s.structural += usize::from(p.structural);
            s.collinear += usize::from(!p.structural && p.cond.is_infinite());
            s.degenerate += usize::from(p.degenerate != Degeneracy::None);
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HigherOrderSummary {
    pub k: usize,
    pub total: usize,
    pub above_threshold: usize,
    pub singular: usize,
}

/// Pair counts plus a count line for every square order from 3 up.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisSummary {
    pub pairs: PairSummary,
    pub higher_order: Vec<HigherOrderSummary>,
}

/// One record per (MV pair, CV pair); empty with fewer than two MVs or CVs.
pub fn enumerate_pairs<T: Scalar>(values: &DenseMatrix<T>, th: &Thresholds<T>) -> Vec<PairMetrics<T>> {
    let (n_cv, n_mv) = values.shape();
    let tol = th.singular_tol;
    let mut out = Vec::with_capacity(n_pairs(n_mv) * n_pairs(n_cv));
    for (m1, m2) in (0..n_mv).tuple_combinations() {
        for (c1, c2) in (0..n_cv).tuple_combinations() {
            let (g11, g12) = (values[(c1, m1)], values[(c1, m2)]);
            let (g21, g22) = (values[(c2, m1)], values[(c2, m2)]);
            let sub = values.select(&[c1, c2], &[m1, m2]);
            let cond = condition_number(&sub, tol).value();
            let rga = rga_2x2(g11, g12, g21, g22, tol, tol);
            out.push(PairMetrics {
                mv_pair: (m1, m2),
                cv_pair: (c1, c2),
                cond,
                rga_number: rga.rga_number,
                lambda: rga.lambda,
                rga_flagged: th.is_rga_flagged(rga.rga_number, rga.degenerate),
                cn_flagged: th.is_cn_flagged(cond),
                degenerate: rga.degenerate,
                structural: has_zero_line([g11, g12, g21, g22], tol),
            });
        }
    }
    out
}

fn n_pairs(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

fn has_zero_line<T: Scalar>([a, b, c, d]: [T; 4], tol: T) -> bool {
    let z = |x: T| x.abs() < tol;
    (z(a) && z(b)) || (z(c) && z(d)) || (z(a) && z(c)) || (z(b) && z(d))
}

/// 2×2 submatrices with `|det| < singular_tol · (product of the two largest
/// entry magnitudes)`. Submatrices with an all-zero row or column are left
/// to [`structural_pairs`].
pub fn collinear_pairs<T: Scalar>(values: &DenseMatrix<T>, singular_tol: T) -> Vec<PairIndex> {
    scan_pairs(values, |g| {
        if has_zero_line(g, singular_tol) {
            return false;
        }
        let [a, b, c, d] = g;
        let mut mags = g.map(|x| x.abs());
        mags.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
        (a * d - b * c).abs() < singular_tol * mags[0] * mags[1]
    })
}

/// 2×2 submatrices that contain an all-zero row or column.
pub fn structural_pairs<T: Scalar>(values: &DenseMatrix<T>, singular_tol: T) -> Vec<PairIndex> {
    scan_pairs(values, |g| has_zero_line(g, singular_tol))
}

fn scan_pairs<T: Scalar>(values: &DenseMatrix<T>, keep: impl Fn([T; 4]) -> bool) -> Vec<PairIndex> {
    let (n_cv, n_mv) = values.shape();
    let mut out = Vec::new();
    for (m1, m2) in (0..n_mv).tuple_combinations() {
        for (c1, c2) in (0..n_cv).tuple_combinations() {
            let g = [
                values[(c1, m1)],
                values[(c1, m2)],
                values[(c2, m1)],
                values[(c2, m2)],
            ];
            if keep(g) {
                out.push(PairIndex {
                    mv_pair: (m1, m2),
                    cv_pair: (c1, c2),
                });
            }
        }
    }
    out
}

/// Scans all k×k submatrices, `3 <= k <= min(n_mv, n_cv)`, and returns those
/// with a finite condition number strictly above `cn_threshold`.
pub fn higher_order_scan<T: Scalar>(
    values: &DenseMatrix<T>,
    k: usize,
    cn_threshold: T,
    singular_tol: T,
) -> Result<HigherOrderScan<T>, ConfigError> {
    let (n_cv, n_mv) = values.shape();
    let max = n_cv.min(n_mv);
    if k < 3 || k > max {
        return Err(ConfigError::Order { k, max });
    }

    let mut scan = HigherOrderScan {
        k,
        total: 0,
        below_threshold: 0,
        singular: 0,
        flagged: Vec::new(),
    };
    for mv_set in (0..n_mv).combinations(k) {
        for cv_set in (0..n_cv).combinations(k) {
            scan.total += 1;
            match condition_number(&values.select(&cv_set, &mv_set), singular_tol) {
                ConditionNumber::Finite(cond) if cond > cn_threshold => {
                    scan.flagged.push(SubmatrixMetrics {
                        mv_set: mv_set.clone(),
                        cv_set,
                        cond,
                    });
                }
                ConditionNumber::Finite(_) => scan.below_threshold += 1,
                ConditionNumber::Singular | ConditionNumber::ZeroMatrix => scan.singular += 1,
            }
        }
    }
    Ok(scan)
}

/// Pair counts and every higher-order count the matrix admits.
pub fn summarize<T: Scalar>(values: &DenseMatrix<T>, th: &Thresholds<T>) -> AnalysisSummary {
    let pairs = PairSummary::from_pairs(&enumerate_pairs(values, th));
    let max = values.rows().min(values.cols());
    let higher_order = (3..=max)
        .map(|k| {
            let scan = higher_order_scan(values, k, th.cn_higher_threshold, th.singular_tol)
                .expect("order within range");
            HigherOrderSummary {
                k,
                total: scan.total,
                above_threshold: scan.flagged.len(),
                singular: scan.singular,
            }
        })
        .collect();
    AnalysisSummary {
        pairs,
        higher_order,
    }
}
