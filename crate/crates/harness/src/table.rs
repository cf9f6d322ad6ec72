//! Plain tables written as CSV and echoed in reports.

use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

/// Columns of preformatted cells. Floats go through [`num`] so that the
/// bytes written to disk depend only on the values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Short tables shown in the text report.
    pub summary: bool,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: false,
        }
    }

    pub fn summary(mut self) -> Self {
        self.summary = true;
        self
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }

    pub fn write_csv(&self, dir: &Path) -> Result<()> {
        let path = dir.join(self.file_name());
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))?;
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Table> {
        let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
        let columns = r.headers()?.iter().map(str::to_string).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|r| r.iter().map(str::to_string).collect()))
            .collect::<std::result::Result<_, _>>()?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Ok(Table {
            name,
            columns,
            rows,
            summary: false,
        })
    }

    /// Fixed-width text rendering for reports.
    pub fn render(&self) -> String {
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.len()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let line = |cells: &[String]| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        let mut out = format!("  {}\n", self.name);
        out.push_str(&format!("    {}\n", line(&self.columns)));
        for row in &self.rows {
            out.push_str(&format!("    {}\n", line(row)));
        }
        out
    }
}

/// Shortest round-trip formatting in scientific notation.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

/// Fixed six-digit rendering for human-facing columns.
pub fn short(x: f64) -> String {
    format!("{x:.6e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Table::new("demo", &["x", "y"]);
        t.push(vec![num(0.1), num(-2.5e-300)]);
        t.write_csv(dir.path()).unwrap();
        let back = Table::read_csv(&dir.path().join("demo.csv")).unwrap();
        assert_eq!(back.rows, t.rows);
        assert_eq!(back.rows[0][0].parse::<f64>().unwrap(), 0.1);
        assert!(t.render().contains("-2.5e-300"));
    }
}
