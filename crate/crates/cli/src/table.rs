//! CSV time-series tables with a JSON metadata sidecar.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::Value;

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("table invariant violated: {0}")]
    Invariant(String),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },

    #[error("{path}: {reason}")]
    Format { path: PathBuf, reason: String },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> TableError + '_ {
    move |source| TableError::Io { path: path.to_path_buf(), source }
}

/// Rectangular real-valued table whose first column is time.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeriesTable {
    pub columns: Vec<String>,
    /// Row-major values.
    pub rows: Vec<Vec<f64>>,
    pub metadata: Value,
}

impl TimeSeriesTable {
    pub fn new(columns: Vec<String>, metadata: Value) -> Self {
        Self { columns, rows: Vec::new(), metadata }
    }

    /// Builds a table from a time column and named value columns of equal length.
    pub fn from_columns(times: &[f64], columns: Vec<(String, Vec<f64>)>, metadata: Value) -> Self {
        let mut names = vec!["t".to_string()];
        names.extend(columns.iter().map(|(n, _)| n.clone()));
        let rows = (0..times.len())
            .map(|j| std::iter::once(times[j]).chain(columns.iter().map(|(_, c)| c[j])).collect())
            .collect();
        Self { columns: names, rows, metadata }
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn check(&self) -> Result<(), TableError> {
        let fail = |s: String| Err(TableError::Invariant(s));
        if self.columns.is_empty() {
            return fail("a table needs at least the time column".into());
        }
        for (j, row) in self.rows.iter().enumerate() {
            if row.len() != self.columns.len() {
                return fail(format!("row {j} has {} values for {} columns", row.len(), self.columns.len()));
            }
            if let Some(c) = row.iter().position(|v| !v.is_finite()) {
                return fail(format!("row {j}, column `{}` is not finite", self.columns[c]));
            }
            if j > 0 && row[0] <= self.rows[j - 1][0] {
                return fail(format!("time column is not strictly increasing at row {j}"));
            }
        }
        Ok(())
    }
}

/// Fixed 17-significant-digit scientific notation: lossless for `f64`.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes a header and rows as CSV with `\n` terminators.
pub fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<(), TableError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| TableError::Format { path: path.to_path_buf(), reason: e.to_string() })?;
    let wrap = |e: csv::Error| TableError::Format { path: path.to_path_buf(), reason: e.to_string() };
    w.write_record(header).map_err(wrap)?;
    for row in rows {
        w.write_record(row).map_err(wrap)?;
    }
    w.flush().map_err(io_err(path))
}

/// `<stem>.meta.json` next to `path`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("meta.json")
}

/// Writes `table` to `path` and its metadata to the sidecar. Invariants are
/// checked before anything touches the disk.
pub fn write_table(table: &TimeSeriesTable, path: &Path) -> Result<(), TableError> {
    table.check()?;
    let rows: Vec<Vec<String>> = table.rows.iter().map(|r| r.iter().copied().map(format_float).collect()).collect();
    write_csv(path, &table.columns, &rows)?;
    let meta = serde_json::to_string_pretty(&table.metadata)
        .map_err(|e| TableError::Format { path: path.to_path_buf(), reason: e.to_string() })?;
    let side = sidecar_path(path);
    fs::write(&side, meta + "\n").map_err(io_err(&side))
}

/// Reads a table written by [`write_table`], including its sidecar when present.
pub fn read_table(path: &Path) -> Result<TimeSeriesTable, TableError> {
    let format = |reason: String| TableError::Format { path: path.to_path_buf(), reason };
    let mut r = csv::ReaderBuilder::new().from_path(path).map_err(|e| format(e.to_string()))?;
    let columns: Vec<String> = r.headers().map_err(|e| format(e.to_string()))?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| format(e.to_string()))?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| format(format!("`{f}`: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    let side = sidecar_path(path);
    let metadata = match fs::read_to_string(&side) {
        Ok(text) => serde_json::from_str(&text).map_err(|e| format(e.to_string()))?,
        Err(e) if e.kind() == io::ErrorKind::NotFound => Value::Null,
        Err(e) => return Err(io_err(&side)(e)),
    };
    Ok(TimeSeriesTable { columns, rows, metadata })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
        assert_eq!(format_float(-0.1), "-1.0000000000000001e-1");
        for v in [0.1, 1.0 / 3.0, 6.02214076e23, -5e-324, f64::MAX] {
            assert_eq!(format_float(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn invariants() {
        let mut t = TimeSeriesTable::new(vec!["t".into(), "x".into()], json!({}));
        t.push_row(vec![0.0, 1.0]);
        t.push_row(vec![1.0, 2.0]);
        assert!(t.check().is_ok());
        t.push_row(vec![1.0, 3.0]);
        assert!(matches!(t.check(), Err(TableError::Invariant(_))));
        t.rows.pop();
        t.push_row(vec![2.0]);
        assert!(t.check().is_err());
        t.rows.pop();
        t.push_row(vec![2.0, f64::NAN]);
        assert!(t.check().is_err());
    }

    #[test]
    fn from_columns_layout() {
        let t = TimeSeriesTable::from_columns(&[0.0, 0.5], vec![("a".into(), vec![1.0, 2.0])], Value::Null);
        assert_eq!(t.columns, ["t", "a"]);
        assert_eq!(t.rows, vec![vec![0.0, 1.0], vec![0.5, 2.0]]);
        assert_eq!(t.column("a").unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(sidecar_path(Path::new("out/populations.csv")), Path::new("out/populations.meta.json"));
    }
}
