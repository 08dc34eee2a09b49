//! Sequence files, JSON reports and CSV tables. Every float is written with
//! 17 significant digits so that files round-trip binary64 exactly.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};

use crate::disc::DiscPoint;
use crate::error::{Error, Result};
use crate::sequence::{TailModel, ZeroSequence};

/// `x` with 17 significant digits, as used in every CSV cell.
pub fn f17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// JSON number with 17 significant digits; `null` for non-finite values.
pub fn num17(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Value::Number(f17(x).parse::<Number>().expect("formatted float is a JSON number"))
}

/// Rewrites every non-integer number in `v` to 17 significant digits.
pub fn normalize_floats(v: Value) -> Value {
    match v {
        Value::Number(n) => {
            if n.is_i64() || n.is_u64() {
                Value::Number(n)
            } else {
                num17(n.as_f64().unwrap_or(f64::NAN))
            }
        }
        Value::Array(items) => Value::Array(items.into_iter().map(normalize_floats).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, normalize_floats(v))).collect()),
        other => other,
    }
}

/// `serde_json::to_value` followed by [`normalize_floats`].
pub fn to_json17<T: Serialize + ?Sized>(value: &T) -> Result<Value> {
    Ok(normalize_floats(serde_json::to_value(value)?))
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Writes a CSV file with the given header and pre-formatted rows.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.write_record(row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// CSV text for the given header and rows.
pub fn csv_string(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.write_record(row).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Input(e.to_string()))
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Input(format!("{other:?}")),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ComplexRecord {
    re: f64,
    im: f64,
}

/// One point. `offset` carries the low-order part of points that binary64
/// cannot hold in one number (clustered or extremely deep points); the
/// point is `(re + i im) + (offset.re + i offset.im)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct PointRecord {
    re: f64,
    im: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    offset: Option<ComplexRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SequenceFile {
    label: String,
    points: Vec<PointRecord>,
    #[serde(default)]
    meta: Map<String, Value>,
}

pub fn sequence_to_json(z: &ZeroSequence) -> Result<Value> {
    let points = z
        .points()
        .iter()
        .map(|p| {
            let off = p.offset();
            PointRecord {
                re: p.base().re,
                im: p.base().im,
                offset: (off != Complex64::new(0.0, 0.0)).then_some(ComplexRecord { re: off.re, im: off.im }),
            }
        })
        .collect();
    to_json17(&SequenceFile {
        label: z.label().to_string(),
        points,
        meta: z.meta().clone(),
    })
}

pub fn sequence_from_json(v: Value) -> Result<ZeroSequence> {
    let file: SequenceFile = serde_json::from_value(v).map_err(|e| Error::Input(format!("sequence file: {e}")))?;
    let points = file
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let off = p.offset.as_ref().map_or(Complex64::new(0.0, 0.0), |o| Complex64::new(o.re, o.im));
            DiscPoint::from_parts(Complex64::new(p.re, p.im), off)
                .map_err(|e| Error::Input(format!("point {i}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut z = ZeroSequence::new(points, file.label)?;
    let tail = tail_from_meta(&file.meta);
    for (k, v) in file.meta {
        z.meta_mut().insert(k, v);
    }
    Ok(match tail {
        Some(t) => z.with_tail(t),
        None => z,
    })
}

fn tail_from_meta(meta: &Map<String, Value>) -> Option<TailModel> {
    let f = |k: &str| meta.get(k).and_then(Value::as_f64);
    let u = |k: &str| meta.get(k).and_then(Value::as_u64).map(|x| x as usize);
    match meta.get("generator").and_then(Value::as_str)? {
        "geometric" => Some(TailModel::Geometric {
            ratio: f("ratio")?,
            count: u("count")?,
        }),
        "sharpness" => Some(TailModel::Sharpness {
            eta1: f("eta1")?,
            eta2: f("eta2")?,
            n_max: u("n_max")?,
        }),
        _ => None,
    }
}

pub fn write_sequence(z: &ZeroSequence, path: &Path) -> Result<()> {
    write_json(path, &sequence_to_json(z)?)
}

pub fn read_sequence(path: &Path) -> Result<ZeroSequence> {
    let text = fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    sequence_from_json(v)
}
