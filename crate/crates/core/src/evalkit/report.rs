use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{Number, Value};

use super::{RocCurve, SegScores, SweepRecord};
use crate::{Error, Result};

/// Fixed six-decimal rendering used by every writer.
pub fn fmt6(x: f64) -> String {
    format!("{x:.6}")
}

/// A JSON number printed with six decimals.
pub fn json6(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Value::Number(Number::from_str(&fmt6(x)).expect("fixed-point text is a JSON number"))
}

/// Serializes `value`, rewriting every non-integer number to six decimals.
pub fn to_json6(value: &impl Serialize) -> Value {
    fn walk(v: Value) -> Value {
        match v {
            Value::Number(n) if n.is_f64() => json6(n.as_f64().unwrap_or(f64::NAN)),
            Value::Array(a) => Value::Array(a.into_iter().map(walk).collect()),
            Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, walk(v))).collect()),
            other => other,
        }
    }
    walk(serde_json::to_value(value).expect("report types serialize"))
}

/// Pretty-printed JSON with six-decimal floats.
pub fn write_json(path: impl AsRef<Path>, value: &impl Serialize) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(&to_json6(value)).expect("values serialize");
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        other => Error::io(path, std::io::Error::other(format!("{other:?}"))),
    }
}

fn write_rows(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// `sequence_id, <threshold>, detected, fraction` per sweep record.
pub fn write_metrics_csv(
    path: impl AsRef<Path>,
    threshold_name: &str,
    records: &[SweepRecord],
) -> Result<()> {
    write_rows(
        path.as_ref(),
        &["sequence_id", threshold_name, "detected", "fraction"],
        records.iter().map(|r| {
            vec![
                r.sequence_id.clone(),
                fmt6(r.threshold),
                r.detected.to_string(),
                fmt6(r.fraction),
            ]
        }),
    )
}

/// `<threshold>, fpr, tpr` per measured point.
pub fn write_roc_csv(path: impl AsRef<Path>, threshold_name: &str, curve: &RocCurve) -> Result<()> {
    write_rows(
        path.as_ref(),
        &[threshold_name, "fpr", "tpr"],
        curve.measured().iter().map(|p| {
            vec![
                p.threshold.map(fmt6).unwrap_or_default(),
                fmt6(p.fpr),
                fmt6(p.tpr),
            ]
        }),
    )
}

/// `id, iou, dice, accuracy` per scored mask pair.
pub fn write_seg_csv(path: impl AsRef<Path>, rows: &[(String, SegScores)]) -> Result<()> {
    write_rows(
        path.as_ref(),
        &["id", "iou", "dice", "accuracy"],
        rows.iter()
            .map(|(id, s)| vec![id.clone(), fmt6(s.iou), fmt6(s.dice), fmt6(s.accuracy)]),
    )
}
