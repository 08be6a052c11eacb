use super::{ControlledVar, GainModel, Location, ManipulatedVar, Violation, ViolationCode};
use crate::error::ModelError;
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;

const DELTA_LABEL: &str = "delta_move";

pub(super) fn parse<T: Scalar>(text: &str) -> Result<GainModel<T>, ModelError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            ModelError::Syntax {
                line,
                column: 0,
                message: e.to_string(),
            }
        })?;
        let line = rec.position().map_or(records.len() + 1, |p| p.line() as usize);
        records.push((line, rec));
    }

    let mut rows = records.into_iter();
    let (_, header) = rows.next().ok_or_else(|| syntax(1, 1, "empty input"))?;
    let mv_names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();

    let (delta_line, delta_rec) = rows
        .next()
        .ok_or_else(|| syntax(2, 1, "missing delta_move row"))?;
    if !delta_rec
        .get(0)
        .is_some_and(|s| s.eq_ignore_ascii_case(DELTA_LABEL))
    {
        return Err(syntax(
            delta_line,
            1,
            "second row must start with the label delta_move",
        ));
    }
    if delta_rec.len() != header.len() {
        return Err(mismatch(
            Location::Row { row: 1 },
            format!(
                "delta_move row has {} values for {} MVs",
                delta_rec.len().saturating_sub(1),
                mv_names.len()
            ),
        ));
    }
    let deltas = delta_rec
        .iter()
        .skip(1)
        .enumerate()
        .map(|(j, cell)| number::<T>(cell, delta_line, j + 2))
        .collect::<Result<Vec<_>, _>>()?;

    let mut cvs = Vec::new();
    let mut gain_rows = Vec::new();
    for (line, rec) in rows {
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let row_idx = cvs.len();
        if rec.len() != header.len() {
            return Err(mismatch(
                Location::Row { row: row_idx },
                format!(
                    "line {line}: {} gains for {} MVs",
                    rec.len().saturating_sub(1),
                    mv_names.len()
                ),
            ));
        }
        cvs.push(ControlledVar {
            name: rec.get(0).unwrap_or_default().to_string(),
            units: None,
        });
        let gains = rec
            .iter()
            .skip(1)
            .enumerate()
            .map(|(j, cell)| number::<T>(cell, line, j + 2))
            .collect::<Result<Vec<_>, _>>()?;
        gain_rows.push(gains);
    }

    let gains = if gain_rows.is_empty() {
        DenseMatrix::zeros(0, mv_names.len())
    } else {
        DenseMatrix::from_rows(gain_rows).expect("row lengths checked above")
    };
    Ok(GainModel {
        mvs: mv_names
            .into_iter()
            .zip(deltas)
            .map(|(name, delta_move)| ManipulatedVar {
                name,
                delta_move,
                units: None,
            })
            .collect(),
        cvs,
        gains,
    })
}

fn number<T: Scalar>(cell: &str, line: usize, column: usize) -> Result<T, ModelError> {
    cell.parse::<f64>()
        .ok()
        .and_then(T::from_f64)
        .ok_or_else(|| syntax(line, column, &format!("not a number: {cell:?}")))
}

fn syntax(line: usize, column: usize, message: &str) -> ModelError {
    ModelError::Syntax {
        line,
        column,
        message: message.to_string(),
    }
}

fn mismatch(location: Location, message: String) -> ModelError {
    ModelError::Invalid(Violation::new(
        ViolationCode::DimensionMismatch,
        location,
        message,
    ))
}

pub(super) fn write<T: Scalar>(model: &GainModel<T>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let header = std::iter::once(String::new()).chain(model.mvs.iter().map(|m| m.name.clone()));
    w.write_record(header).expect("in-memory write");
    let deltas = std::iter::once(DELTA_LABEL.to_string())
        .chain(model.mvs.iter().map(|m| m.delta_move.to_string()));
    w.write_record(deltas).expect("in-memory write");
    for (i, cv) in model.cvs.iter().enumerate() {
        let row = std::iter::once(cv.name.clone())
            .chain(model.gains.row(i).iter().map(|g| g.to_string()));
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}
