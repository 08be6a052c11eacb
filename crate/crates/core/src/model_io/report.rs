//! Report types and their JSON, CSV and plain-text renderings.
//!
//! JSON is lossless (infinities as strings, see [`super::extended`]); CSV
//! uses the shortest round-trip decimal for every number; text tables are for
//! people and round to four decimals.
//!
//! In text tables a trailing `#` marks a gain in an RGA-flagged pair and `*`
//! a gain in a condition-number-flagged pair.

use std::collections::BTreeSet;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::extended::{self, format_extended};
use super::{GainModel, Location, ValidationReport, Violation, ViolationCode};
use crate::analysis::{HigherOrderScan, PairIndex, PairMetrics, PairSummary, Thresholds};
use crate::binning::{BinGrid, ConditioningResult};
use crate::error::ModelError;
use crate::scalar::Scalar;
use crate::scaling::ScaledGainMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Json,
    Csv,
    TextTable,
}

/// Anything that renders in all three report formats.
pub trait Report: Serialize + DeserializeOwned {
    fn csv_header(&self) -> Vec<String>;
    fn csv_rows(&self) -> Vec<Vec<String>>;
    fn text_table(&self) -> String;
}

/// Renders `report` deterministically in `format`.
pub fn serialize_report<R: Report>(report: &R, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
        ReportFormat::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            w.write_record(report.csv_header()).expect("in-memory write");
            for row in report.csv_rows() {
                w.write_record(row).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
        }
        ReportFormat::TextTable => report.text_table(),
    }
}

fn num<T: Scalar>(v: T) -> String {
    format_extended(v)
}

fn fixed<T: Scalar>(v: T, decimals: usize) -> String {
    if v.is_finite() {
        let s = format!("{:.*}", decimals, v.to_f64_lossy());
        // Avoid "-0.0000".
        if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
            s.trim_start_matches('-').to_string()
        } else {
            s
        }
    } else {
        format_extended(v)
    }
}

/// Aligns a table: first column left-aligned, the rest right-aligned.
fn render_table(header: &[String], rows: &[Vec<String>]) -> String {
    let ncol = header.len();
    let mut width = vec![0usize; ncol];
    for row in std::iter::once(header).chain(rows.iter().map(Vec::as_slice)) {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |row: &[String]| {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(j, c)| {
                if j == 0 {
                    format!("{:<w$}", c, w = width[0])
                } else {
                    format!("{:>w$}", c, w = width[j])
                }
            })
            .collect();
        cells.join("  ").trim_end().to_string()
    };
    let mut out = line(header);
    out.push('\n');
    let total: usize = width.iter().sum::<usize>() + 2 * ncol.saturating_sub(1);
    out.push_str(&"-".repeat(total));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}

impl Report for ValidationReport {
    fn csv_header(&self) -> Vec<String> {
        ["code", "severity", "location", "message"].map(String::from).to_vec()
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.violations
            .iter()
            .map(|v| {
                vec![
                    v.code.as_str().to_string(),
                    format!("{:?}", v.severity).to_lowercase(),
                    v.location.to_string(),
                    v.message.clone(),
                ]
            })
            .collect()
    }

    fn text_table(&self) -> String {
        if self.violations.is_empty() {
            return "model is valid\n".to_string();
        }
        let mut out = render_table(&self.csv_header(), &self.csv_rows());
        let errors = self.errors().count();
        out.push_str(&format!(
            "{} error(s), {} warning(s)\n",
            errors,
            self.violations.len() - errors
        ));
        out
    }
}

/// 2×2 pair metrics with the variable names they index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct PairReport<T> {
    pub mv_names: Vec<String>,
    pub cv_names: Vec<String>,
    pub thresholds: Thresholds<T>,
    pub pairs: Vec<PairMetrics<T>>,
}

impl<T: Scalar> PairReport<T> {
    /// Keeps only RGA- or condition-number-flagged pairs, sorted by condition number.
    pub fn flagged_only(mut self) -> Self {
        self.pairs.retain(PairMetrics::is_flagged);
        self.pairs.sort_by(|a, b| {
            a.cond
                .partial_cmp(&b.cond)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then((a.mv_pair, a.cv_pair).cmp(&(b.mv_pair, b.cv_pair)))
        });
        self
    }

    fn names(&self, p: &PairMetrics<T>) -> [String; 4] {
        [
            self.mv_names[p.mv_pair.0].clone(),
            self.mv_names[p.mv_pair.1].clone(),
            self.cv_names[p.cv_pair.0].clone(),
            self.cv_names[p.cv_pair.1].clone(),
        ]
    }
}

impl<T: Scalar> Report for PairReport<T> {
    fn csv_header(&self) -> Vec<String> {
        ["mv1", "mv2", "cv1", "cv2", "cond", "rga"].map(String::from).to_vec()
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.pairs
            .iter()
            .map(|p| {
                let mut row = self.names(p).to_vec();
                row.push(num(p.cond));
                row.push(num(p.rga_number));
                row
            })
            .collect()
    }

    fn text_table(&self) -> String {
        let header: Vec<String> = ["MV1", "MV2", "CV1", "CV2", "cond", "RGA", "flags"]
            .map(String::from)
            .to_vec();
        let rows: Vec<Vec<String>> = self
            .pairs
            .iter()
            .map(|p| {
                let mut row = self.names(p).to_vec();
                row.push(fixed(p.cond, 2));
                row.push(fixed(p.rga_number, 2));
                let mut flags = String::new();
                if p.rga_flagged {
                    flags.push('#');
                }
                if p.cn_flagged {
                    flags.push('*');
                }
                row.push(flags);
                row
            })
            .collect();
        render_table(&header, &rows)
    }
}

/// Scaled gains with per-cell flag markers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct ScaledReport<T> {
    pub scaled: ScaledGainMatrix<T>,
    /// `(cv, mv)` cells belonging to an RGA-flagged pair.
    pub rga_marked: Vec<(usize, usize)>,
    /// `(cv, mv)` cells belonging to a condition-number-flagged pair.
    pub cn_marked: Vec<(usize, usize)>,
}

impl<T: Scalar> ScaledReport<T> {
    pub fn new(scaled: ScaledGainMatrix<T>, pairs: &[PairMetrics<T>]) -> Self {
        let mut rga = BTreeSet::new();
        let mut cn = BTreeSet::new();
        for p in pairs {
            if p.rga_flagged {
                rga.extend(p.cells());
            }
            if p.cn_flagged {
                cn.extend(p.cells());
            }
        }
        Self {
            scaled,
            rga_marked: rga.into_iter().collect(),
            cn_marked: cn.into_iter().collect(),
        }
    }
}

impl<T: Scalar> Report for ScaledReport<T> {
    fn csv_header(&self) -> Vec<String> {
        std::iter::once(String::new())
            .chain(self.scaled.mv_names.iter().cloned())
            .collect()
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let s = &self.scaled;
        let mut rows = vec![std::iter::once("delta_move".to_string())
            .chain(s.col_scales.iter().map(|&v| num(v)))
            .collect()];
        for (i, cv) in s.cv_names.iter().enumerate() {
            rows.push(
                std::iter::once(cv.clone())
                    .chain(s.values.row(i).iter().map(|&v| num(v)))
                    .collect(),
            );
        }
        rows
    }

    fn text_table(&self) -> String {
        let s = &self.scaled;
        let mut header = vec![String::new()];
        header.extend(s.mv_names.iter().cloned());
        let mut rows = vec![std::iter::once("delta_move".to_string())
            .chain(s.col_scales.iter().map(|&v| format!("{}  ", num(v))))
            .collect()];
        for (i, cv) in s.cv_names.iter().enumerate() {
            let mut row = vec![cv.clone()];
            for j in 0..s.values.cols() {
                let rga = if self.rga_marked.contains(&(i, j)) { '#' } else { ' ' };
                let cn = if self.cn_marked.contains(&(i, j)) { '*' } else { ' ' };
                row.push(format!("{} {rga}{cn}", fixed(s.values[(i, j)], 4)));
            }
            rows.push(row);
        }
        let mut out = render_table(&header, &rows);
        out.push_str("# = part of an RGA-flagged pair, * = part of a condition-number-flagged pair\n");
        out
    }
}

/// A k×k scan with names resolved, for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct AnalysisReport<T> {
    pub pairs: PairReport<T>,
    pub summary: PairSummary,
    pub collinear: Vec<PairIndex>,
    pub higher_order: Vec<HigherOrderScan<T>>,
}

impl<T: Scalar> Report for AnalysisReport<T> {
    fn csv_header(&self) -> Vec<String> {
        self.pairs.csv_header()
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.pairs.csv_rows()
    }

    fn text_table(&self) -> String {
        let s = &self.summary;
        let th = &self.pairs.thresholds;
        let mut out = self.pairs.text_table();
        out.push_str(&format!(
            "\n{} pairs: {} RGA-flagged (RGA > {}), {} condition-flagged (cond >= {}), {} collinear, {} structural\n",
            s.total, s.rga_flagged, th.rga_threshold, s.cn_flagged, th.cn_threshold, s.collinear, s.structural
        ));
        for scan in &self.higher_order {
            out.push_str(&format!(
                "{k}x{k}: {} of {} submatrices with cond > {}, {} singular\n",
                scan.flagged.len(),
                scan.total,
                th.cn_higher_threshold,
                scan.singular,
                k = scan.k
            ));
        }
        out
    }
}

/// A conditioning run with names attached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct ConditioningReport<T> {
    pub result: ConditioningResult<T>,
}

impl<T: Scalar> Report for ConditioningReport<T> {
    fn csv_header(&self) -> Vec<String> {
        ["cv", "mv", "scaled", "binned", "bin_index", "change_pct", "engineering"]
            .map(String::from)
            .to_vec()
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let r = &self.result;
        r.binned
            .indexed_iter()
            .map(|(i, j, b)| {
                vec![
                    r.scaled.cv_names[i].clone(),
                    r.scaled.mv_names[j].clone(),
                    num(r.scaled.values[(i, j)]),
                    num(b),
                    r.bin_index[i][j].map_or(String::new(), |k| k.to_string()),
                    num(r.change_pct[(i, j)]),
                    num(r.engineering[(i, j)]),
                ]
            })
            .collect()
    }

    fn text_table(&self) -> String {
        let r = &self.result;
        let mut header = vec![String::new()];
        header.extend(r.scaled.mv_names.iter().cloned());
        let rows: Vec<Vec<String>> = r
            .scaled
            .cv_names
            .iter()
            .enumerate()
            .map(|(i, cv)| {
                let mut row = vec![cv.clone()];
                for j in 0..r.binned.cols() {
                    let c = r.change_pct[(i, j)];
                    let note = if c != T::zero() {
                        format!(" ({:+.2})", c.to_f64_lossy())
                    } else {
                        String::new()
                    };
                    row.push(format!("{}{}", fixed(r.binned[(i, j)], 4), note));
                }
                row
            })
            .collect();
        let mut out = render_table(&header, &rows);
        let b = &r.flags_before.pairs;
        let a = &r.flags_after.pairs;
        out.push_str(&format!(
            "\nRGA threshold {} (grid ratio {:.4}, max change {:.2}%): {} cells selected, {} changed\n",
            r.grid.rga_threshold,
            r.grid.ratio.to_f64_lossy(),
            crate::binning::max_relative_change(r.grid.rga_threshold).to_f64_lossy(),
            r.selected.len(),
            r.changed_cells().len()
        ));
        out.push_str(&format!(
            "pairs before: {} RGA-flagged, {} condition-flagged, {} collinear\n",
            b.rga_flagged, b.cn_flagged, b.collinear
        ));
        out.push_str(&format!(
            "pairs after:  {} RGA-flagged, {} condition-flagged, {} collinear\n",
            a.rga_flagged, a.cn_flagged, a.collinear
        ));
        for (hb, ha) in r.flags_before.higher_order.iter().zip(&r.flags_after.higher_order) {
            out.push_str(&format!(
                "{k}x{k} above cond threshold: {} -> {}\n",
                hb.above_threshold,
                ha.above_threshold,
                k = hb.k
            ));
        }
        out
    }
}

/// Boundary listing for a threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct GridReport<T> {
    pub grid: BinGrid<T>,
    pub max_relative_change_pct: T,
}

impl<T: Scalar> Report for GridReport<T> {
    fn csv_header(&self) -> Vec<String> {
        ["index", "boundary", "width"].map(String::from).to_vec()
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let widths = self.grid.widths();
        self.grid
            .boundaries
            .iter()
            .enumerate()
            .map(|(i, &b)| {
                vec![
                    i.to_string(),
                    num(b),
                    widths.get(i).map_or(String::new(), |&w| num(w)),
                ]
            })
            .collect()
    }

    fn text_table(&self) -> String {
        let header: Vec<String> = ["bin", "boundary"].map(String::from).to_vec();
        let rows: Vec<Vec<String>> = self
            .grid
            .boundaries
            .iter()
            .enumerate()
            .map(|(i, &b)| vec![format!("B_{i}"), fixed(b, 4)])
            .collect();
        let mut out = render_table(&header, &rows);
        out.push_str(&format!(
            "RGA threshold {}: ratio {:.4}, max relative change {:.2}%\n",
            self.grid.rga_threshold,
            self.grid.ratio.to_f64_lossy(),
            self.max_relative_change_pct.to_f64_lossy()
        ));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct CellDiff<T> {
    pub cv: String,
    pub mv: String,
    pub before: T,
    pub after: T,
    /// `(after − before) / before · 100`; infinite when a zero became non-zero.
    #[serde(with = "extended")]
    pub change_pct: T,
}

/// Cell-by-cell comparison of two models with the same variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct CompareReport<T> {
    pub cells: Vec<CellDiff<T>>,
}

impl<T: Scalar> CompareReport<T> {
    pub fn changed(&self) -> impl Iterator<Item = &CellDiff<T>> {
        self.cells.iter().filter(|c| c.before != c.after)
    }

    pub fn max_abs_change_pct(&self) -> T {
        self.changed()
            .fold(T::zero(), |acc, c| acc.max(c.change_pct.abs()))
    }
}

/// Compares two models whose MV and CV names agree in order.
pub fn compare_models<T: Scalar>(
    before: &GainModel<T>,
    after: &GainModel<T>,
) -> Result<CompareReport<T>, ModelError> {
    let mismatch = |what: &str| {
        ModelError::Invalid(Violation::new(
            ViolationCode::DimensionMismatch,
            Location::Model,
            format!("models differ in their {what}"),
        ))
    };
    if before.mv_names() != after.mv_names() {
        return Err(mismatch("MV names"));
    }
    if before.cv_names() != after.cv_names() {
        return Err(mismatch("CV names"));
    }
    if before.gains.shape() != after.gains.shape() {
        return Err(mismatch("gain matrix shape"));
    }
    let cells = before
        .gains
        .indexed_iter()
        .map(|(i, j, b)| {
            let a = after.gains[(i, j)];
            let change_pct = if a == b {
                T::zero()
            } else if b == T::zero() {
                T::infinity() * a.signum()
            } else {
                (a - b) / b * T::lit(100.0)
            };
            CellDiff {
                cv: before.cvs[i].name.clone(),
                mv: before.mvs[j].name.clone(),
                before: b,
                after: a,
                change_pct,
            }
        })
        .collect();
    Ok(CompareReport { cells })
}

impl<T: Scalar> Report for CompareReport<T> {
    fn csv_header(&self) -> Vec<String> {
        ["cv", "mv", "before", "after", "change_pct"].map(String::from).to_vec()
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.cells
            .iter()
            .map(|c| {
                vec![
                    c.cv.clone(),
                    c.mv.clone(),
                    num(c.before),
                    num(c.after),
                    num(c.change_pct),
                ]
            })
            .collect()
    }

    fn text_table(&self) -> String {
        let header: Vec<String> = ["CV", "MV", "before", "after", "change %"]
            .map(String::from)
            .to_vec();
        let rows: Vec<Vec<String>> = self
            .changed()
            .map(|c| {
                vec![
                    c.cv.clone(),
                    c.mv.clone(),
                    num(c.before),
                    num(c.after),
                    if c.change_pct.is_finite() {
                        format!("{:+.2}", c.change_pct.to_f64_lossy())
                    } else {
                        format_extended(c.change_pct)
                    },
                ]
            })
            .collect();
        let mut out = render_table(&header, &rows);
        out.push_str(&format!(
            "{} of {} cells differ, largest change {:.2}%\n",
            rows.len(),
            self.cells.len(),
            self.max_abs_change_pct().to_f64_lossy()
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::enumerate_pairs;
    use crate::matrix::DenseMatrix;

    fn report(pairs: Vec<PairMetrics<f64>>) -> PairReport<f64> {
        PairReport {
            mv_names: vec!["A".into(), "B".into()],
            cv_names: vec!["X".into(), "Y".into()],
            thresholds: Thresholds::default(),
            pairs,
        }
    }

    #[test]
    fn empty_pair_report_is_header_only() {
        assert_eq!(
            serialize_report(&report(vec![]), ReportFormat::Csv),
            "mv1,mv2,cv1,cv2,cond,rga\n"
        );
    }

    #[test]
    fn pair_csv_and_json_round_trip() {
        let m = DenseMatrix::from_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let r = report(enumerate_pairs(&m, &Thresholds::default()));
        assert_eq!(
            serialize_report(&r, ReportFormat::Csv),
            "mv1,mv2,cv1,cv2,cond,rga\nA,B,X,Y,inf,inf\n"
        );
        let json = serialize_report(&r, ReportFormat::Json);
        let back: PairReport<f64> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        assert_eq!(serialize_report(&r, ReportFormat::Json), json);
    }

    #[test]
    fn validation_text() {
        assert_eq!(ValidationReport::default().text_table(), "model is valid\n");
    }

    #[test]
    fn compare_reports_changes() {
        let a = GainModel::from_parts(
            [("u", 1.0f64)],
            ["y1", "y2"],
            DenseMatrix::from_rows(vec![vec![2.0], vec![0.0]]).unwrap(),
        );
        let b = a.with_gains(DenseMatrix::from_rows(vec![vec![2.1], vec![0.0]]).unwrap());
        let c = compare_models(&a, &b).unwrap();
        assert_eq!(c.changed().count(), 1);
        assert!((c.max_abs_change_pct() - 5.0).abs() < 1e-9);
        let mut other = b.clone();
        other.cvs[0].name = "z".into();
        assert!(compare_models(&a, &other).is_err());
    }

    #[test]
    fn fixed_formatting() {
        assert_eq!(fixed(-0.00001f64, 4), "0.0000");
        assert_eq!(fixed(-0.0754f64, 4), "-0.0754");
        assert_eq!(fixed(f64::INFINITY, 2), "inf");
    }
}
