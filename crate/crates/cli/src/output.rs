//! Number formatting and file output shared by all subcommands.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::Value;

const SIG_DIGITS: usize = 9;

/// `v` rounded to nine significant digits.
pub fn round_sig(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{:.*e}", SIG_DIGITS - 1, v).parse().unwrap_or(v)
}

/// Nine significant digits as text; plain notation in the usual range.
pub fn fmt_num(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let r = round_sig(v);
    if r == 0.0 || (1e-4..1e15).contains(&r.abs()) {
        r.to_string()
    } else {
        format!("{:.*e}", SIG_DIGITS - 1, r)
    }
}

/// Rounds every float in a JSON tree. Non-finite values are already `null`
/// after `serde_json` conversion.
pub fn round_json(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(round_sig).and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

pub fn json_text(mut value: Value) -> Result<String> {
    round_json(&mut value);
    Ok(serde_json::to_string_pretty(&value)? + "\n")
}

/// CSV with a header row; every field already formatted.
pub fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Writes to stdout, or to `path` via a temporary file in the same
/// directory renamed into place.
pub fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    let Some(path) = path else {
        print!("{text}");
        return Ok(());
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp =
        tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating file in {}", dir.display()))?;
    tmp.write_all(text.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_num(1.345663706431), "1.34566371");
        assert_eq!(fmt_num(0.335), "0.335");
        assert_eq!(fmt_num(-0.159154943091895), "-0.159154943");
        assert_eq!(fmt_num(1.2345678912e-7), "1.23456789e-7");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
        assert_eq!(fmt_num(0.0), "0");
    }

    #[test]
    fn json_rounding_keeps_integers_and_nulls() {
        let mut v = serde_json::json!({"a": 0.1234567891234, "n": 40, "inf": f64::INFINITY, "xs": [2.0000000001]});
        round_json(&mut v);
        assert_eq!(v["a"], 0.123456789);
        assert_eq!(v["n"], 40);
        assert!(v["inf"].is_null());
        assert_eq!(v["xs"][0], 2.0);
    }

    #[test]
    fn csv_has_header() {
        let text = csv_text(&["x", "w"], vec![vec!["0".into(), "1.5".into()]]).unwrap();
        assert_eq!(text, "x,w\n0,1.5\n");
    }

    #[test]
    fn emit_writes_atomically_into_place() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        emit("old\n", Some(&path)).unwrap();
        emit("new\n", Some(&path)).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "new\n");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
