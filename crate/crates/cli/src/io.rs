//! Zeta family files and report output.
//!
//! A family file is a JSON object with `"n"` and `"zeta1"`..`"zeta5"`.
//! Each matrix is an `n x n` nested array of complex numbers written as
//! `[re, im]`; for `n = 1` a bare `[re, im]` is accepted as well.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use pentagon_core::{CMatrix64, ZetaFamily64};
use serde_json::{Map, Value};

use crate::config::CliError;
use crate::report::Report;

fn parse_err(source: &str, location: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Parse {
        source_name: source.into(),
        location: location.into(),
        message: message.into(),
    }
}

fn complex(v: &Value, source: &str, loc: &str) -> Result<Complex64, CliError> {
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) => match (re.as_f64(), im.as_f64()) {
            (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
            _ => Err(parse_err(source, loc, "complex parts must be numbers")),
        },
        _ => Err(parse_err(source, loc, "expected a complex number [re, im]")),
    }
}

fn matrix(v: &Value, n: usize, source: &str, field: &str) -> Result<CMatrix64, CliError> {
    if n == 1 {
        if let Ok(z) = complex(v, source, field) {
            return Ok(CMatrix64::scalar(z));
        }
    }
    let rows = v
        .as_array()
        .ok_or_else(|| parse_err(source, field, "expected an array of rows"))?;
    if rows.len() != n {
        return Err(parse_err(
            source,
            field,
            format!("expected {n} rows, found {}", rows.len()),
        ));
    }
    let mut m = CMatrix64::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        let loc = format!("{field}, row {i}");
        let cells = row
            .as_array()
            .ok_or_else(|| parse_err(source, loc.as_str(), "expected an array"))?;
        if cells.len() != n {
            return Err(parse_err(
                source,
                loc,
                format!("expected {n} entries, found {}", cells.len()),
            ));
        }
        for (j, cell) in cells.iter().enumerate() {
            m[(i, j)] = complex(cell, source, &format!("{field}, row {i}, column {j}"))?;
        }
    }
    Ok(m)
}

/// Parse a family document. With `strict`, every matrix must be symmetric.
pub fn parse_zeta(text: &str, source: &str, strict: bool) -> Result<ZetaFamily64, CliError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| {
        parse_err(
            source,
            format!("line {}, column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    let obj = doc
        .as_object()
        .ok_or_else(|| parse_err(source, "top level", "expected an object"))?;
    let n = obj
        .get("n")
        .and_then(Value::as_u64)
        .filter(|&n| n >= 1)
        .ok_or_else(|| parse_err(source, "n", "expected a positive integer"))? as usize;
    let mut mats = Vec::with_capacity(5);
    for k in 1..=5 {
        let field = format!("zeta{k}");
        let v = obj
            .get(&field)
            .ok_or_else(|| parse_err(source, field.as_str(), "missing"))?;
        let m = matrix(v, n, source, &field)?;
        if strict && !m.is_symmetric() {
            return Err(parse_err(
                source,
                field,
                format!(
                    "matrix is not symmetric (residual {:.3e})",
                    m.symmetry_residual()
                ),
            ));
        }
        mats.push(m);
    }
    let mats: [CMatrix64; 5] = mats.try_into().expect("five matrices");
    let built = if strict {
        ZetaFamily64::new(mats)
    } else {
        ZetaFamily64::general(mats)
    };
    built.map_err(|e| parse_err(source, "family", e.to_string()))
}

pub fn load_zeta(path: &Path, strict: bool) -> Result<ZetaFamily64, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_zeta(&text, &path.display().to_string(), strict)
}

fn complex_value(z: Complex64) -> Value {
    Value::from(vec![z.re, z.im])
}

/// JSON document for a family (always in nested-array form).
pub fn zeta_to_json(zf: &ZetaFamily64) -> Value {
    let n = zf.n();
    let mut obj = Map::new();
    obj.insert("n".into(), Value::from(n));
    for (k, m) in zf.members().iter().enumerate() {
        let rows: Vec<Value> = (0..n)
            .map(|i| Value::from((0..n).map(|j| complex_value(m[(i, j)])).collect::<Vec<_>>()))
            .collect();
        obj.insert(format!("zeta{}", k + 1), Value::from(rows));
    }
    Value::Object(obj)
}

pub fn save_zeta(zf: &ZetaFamily64, path: &Path) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(&zeta_to_json(zf)).expect("plain JSON value");
    write(path, text + "\n")
}

pub fn save_report(report: &Report, path: &Path) -> Result<(), CliError> {
    write(path, report.to_json() + "\n")
}

fn write(path: &Path, text: String) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
