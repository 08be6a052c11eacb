use serde::Deserialize;

use super::{ControlledVar, GainModel, Location, ManipulatedVar, Violation, ViolationCode};
use crate::error::ModelError;
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;

#[derive(Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
struct RawModel<T> {
    mvs: Vec<ManipulatedVar<T>>,
    cvs: Vec<ControlledVar>,
    gains: Vec<Vec<T>>,
}

pub(super) fn parse<T: Scalar>(text: &str) -> Result<GainModel<T>, ModelError> {
    let raw: RawModel<T> = serde_json::from_str(text).map_err(|e| ModelError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;

    if raw.gains.len() != raw.cvs.len() {
        return Err(mismatch(
            Location::Model,
            format!(
                "gains has {} rows but {} CVs are declared",
                raw.gains.len(),
                raw.cvs.len()
            ),
        ));
    }
    for (i, row) in raw.gains.iter().enumerate() {
        if row.len() != raw.mvs.len() {
            return Err(mismatch(
                Location::Row { row: i },
                format!(
                    "row {} ({}) has {} gains but {} MVs are declared",
                    i,
                    raw.cvs[i].name,
                    row.len(),
                    raw.mvs.len()
                ),
            ));
        }
    }

    let gains = if raw.gains.is_empty() {
        DenseMatrix::zeros(0, raw.mvs.len())
    } else {
        DenseMatrix::from_rows(raw.gains).expect("row lengths checked above")
    };
    Ok(GainModel {
        mvs: raw.mvs,
        cvs: raw.cvs,
        gains,
    })
}

fn mismatch(location: Location, message: String) -> ModelError {
    ModelError::Invalid(Violation::new(
        ViolationCode::DimensionMismatch,
        location,
        message,
    ))
}

pub(super) fn write<T: Scalar>(model: &GainModel<T>) -> String {
    let mvs: Vec<String> = model.mvs.iter().map(to_json).collect();
    let cvs: Vec<String> = model.cvs.iter().map(to_json).collect();
    let rows: Vec<String> = (0..model.gains.rows())
        .map(|i| to_json(&model.gains.row(i)))
        .collect();

    let block = |items: &[String]| {
        if items.is_empty() {
            "[]".to_string()
        } else {
            format!("[\n    {}\n  ]", items.join(",\n    "))
        }
    };
    format!(
        "{{\n  \"mvs\": {},\n  \"cvs\": {},\n  \"gains\": {}\n}}\n",
        block(&mvs),
        block(&cvs),
        block(&rows)
    )
}

fn to_json<S: serde::Serialize + ?Sized>(item: &S) -> String {
    serde_json::to_string(item).expect("model items serialize")
}
