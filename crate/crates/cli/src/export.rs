//! Tabular outputs. CSV values use 17 significant digits so that parsing
//! them back reproduces the written `f64` bit for bit.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use itlab_core::densmat::DensityMatrixSlice;
use itlab_core::states::RealField;
use serde_json::{json, Map, Value};

use crate::config::Format;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width does not match table '{}'",
            self.name
        );
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// Two-column `(x, density)` table of a position-space field.
    pub fn from_field(name: &str, field: &RealField) -> Self {
        let mut t = Table::new(name, &["x", "density"]);
        for (x, v) in field.coordinates().into_iter().zip(&field.values) {
            t.push(vec![x, *v]);
        }
        t
    }

    /// Long-form `(x, x_prime, re, im)` table of a density-matrix slice.
    pub fn from_slice(name: &str, rho: &DensityMatrixSlice) -> Self {
        let mut t = Table::new(name, &["x", "x_prime", "re", "im"]);
        for (i, &x) in rho.xs.iter().enumerate() {
            for (j, &xp) in rho.xps.iter().enumerate() {
                let v = rho.get(i, j);
                t.push(vec![x, xp, v.re, v.im]);
            }
        }
        t
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            for (k, v) in row.iter().enumerate() {
                if k > 0 {
                    s.push(',');
                }
                write!(s, "{v:.16e}").expect("writing to a String cannot fail");
            }
            s.push('\n');
        }
        s
    }

    /// `{"meta": {...}, "data": {column: [values...]}}`.
    pub fn to_json(&self, meta: &Value) -> String {
        let mut data = Map::new();
        for (k, c) in self.columns.iter().enumerate() {
            let values: Vec<Value> = self.rows.iter().map(|r| number(r[k])).collect();
            data.insert(c.clone(), Value::Array(values));
        }
        let doc = json!({ "meta": meta, "data": data });
        let mut s = serde_json::to_string_pretty(&doc).expect("JSON values always serialise");
        s.push('\n');
        s
    }

    pub fn parse_csv(name: &str, text: &str) -> Result<Self, String> {
        let mut lines = text.lines();
        let header = lines.next().ok_or("empty CSV")?;
        let columns: Vec<String> = header.split(',').map(String::from).collect();
        let mut rows = Vec::new();
        for (n, line) in lines.enumerate() {
            let row = line
                .split(',')
                .map(|v| v.parse::<f64>().map_err(|e| format!("line {}: {e}", n + 2)))
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() != columns.len() {
                return Err(format!(
                    "line {}: {} fields, expected {}",
                    n + 2,
                    row.len(),
                    columns.len()
                ));
            }
            rows.push(row);
        }
        Ok(Table {
            name: name.to_string(),
            columns,
            rows,
        })
    }

    pub fn parse_json(name: &str, text: &str) -> Result<Self, String> {
        let doc: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let data = doc
            .get("data")
            .and_then(Value::as_object)
            .ok_or("missing \"data\" object")?;
        let columns: Vec<String> = data.keys().cloned().collect();
        let cols: Vec<Vec<f64>> = data
            .values()
            .map(|v| {
                v.as_array()
                    .ok_or("column is not an array")?
                    .iter()
                    .map(|x| match x {
                        Value::String(s) => s.parse::<f64>().map_err(|_| "bad number"),
                        other => other.as_f64().ok_or("bad number"),
                    })
                    .collect::<Result<Vec<f64>, _>>()
            })
            .collect::<Result<_, _>>()?;
        let n = cols.first().map_or(0, Vec::len);
        Ok(Table {
            name: name.to_string(),
            columns,
            rows: (0..n)
                .map(|i| cols.iter().map(|c| c[i]).collect())
                .collect(),
        })
    }
}

/// JSON has no NaN or infinities; those are written as strings.
fn number(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or_else(|| Value::String(v.to_string()), Value::Number)
}

/// Writes `table` into `dir` as `<name>.<ext>` and returns the path.
pub fn export(table: &Table, dir: &Path, format: Format, meta: &Value) -> CliResult<PathBuf> {
    let path = dir.join(format!("{}.{}", table.name, format.extension()));
    let body = match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(meta),
    };
    std::fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn awkward() -> Table {
        let mut t = Table::new("t", &["a", "b"]);
        t.push(vec![0.1 + 0.2, -1.0 / 3.0]);
        t.push(vec![f64::MIN_POSITIVE, 1e300]);
        t.push(vec![5e-324, -0.0]);
        t.push(vec![std::f64::consts::PI, 123456789.0]);
        t
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let t = awkward();
        let back = Table::parse_csv("t", &t.to_csv()).unwrap();
        for (a, b) in t.rows.iter().flatten().zip(back.rows.iter().flatten()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert!(!t.to_csv().contains('\r'));
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let t = awkward();
        let text = t.to_json(&json!({"k": 1}));
        let doc: Value = serde_json::from_str(&text).unwrap();
        assert!(doc.get("meta").is_some() && doc.get("data").is_some());
        let back = Table::parse_json("t", &text).unwrap();
        assert_eq!(back.columns, t.columns);
        for (a, b) in t.rows.iter().flatten().zip(back.rows.iter().flatten()) {
            assert_eq!(a.to_bits(), b.to_bits(), "{a} vs {b}");
        }
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let err = export(
            &awkward(),
            Path::new("/nonexistent/dir"),
            Format::Csv,
            &json!({}),
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }
}
