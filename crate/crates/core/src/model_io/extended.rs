//! Serde adaptor for extended reals: finite values as JSON numbers,
//! infinities and NaN as the strings `"inf"`, `"-inf"` and `"nan"`.
//!
//! Use with `#[serde(with = "crate::model_io::extended")]`.

use serde::de::{self, Deserializer, Visitor};
use serde::Serializer;

use crate::scalar::Scalar;

pub fn serialize<T: Scalar, S: Serializer>(value: &T, s: S) -> Result<S::Ok, S::Error> {
    if value.is_finite() {
        value.serialize(s)
    } else {
        s.serialize_str(&format_extended(*value))
    }
}

pub fn deserialize<'de, T: Scalar, D: Deserializer<'de>>(d: D) -> Result<T, D::Error> {
    struct ExtVisitor;

    impl Visitor<'_> for ExtVisitor {
        type Value = f64;

        fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
            f.write_str("a number or one of \"inf\", \"-inf\", \"nan\"")
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
            Ok(v)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
            parse_extended(v).ok_or_else(|| E::invalid_value(de::Unexpected::Str(v), &self))
        }
    }

    let v = d.deserialize_any(ExtVisitor)?;
    T::from_f64(v).ok_or_else(|| de::Error::custom("value out of range"))
}

/// Text form used in CSV and tables as well: `inf`, `-inf`, `nan`, or the
/// shortest round-trip decimal.
pub fn format_extended<T: Scalar>(v: T) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > T::zero() { "inf".into() } else { "-inf".into() }
    } else {
        v.to_string()
    }
}

pub fn parse_extended(s: &str) -> Option<f64> {
    match s {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        "nan" => Some(f64::NAN),
        _ => s.parse().ok(),
    }
}
