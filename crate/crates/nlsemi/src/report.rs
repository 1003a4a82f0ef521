//! Deterministic plain-text outputs: tab-separated tables with headered
//! columns and key-value metadata files.  All numbers are printed with
//! a fixed format so identical inputs yield identical bytes.

use std::path::Path;

use crate::Result;

/// Fixed numeric format used in all emitted files.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.12e}")
}

/// A tab-separated table with a header row.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width does not match the header"
        );
        self.rows.push(row);
    }

    pub fn to_tsv(&self) -> String {
        let mut out = self.columns.join("\t");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|&v| fmt_num(v)).collect();
            out.push_str(&line.join("\t"));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(path, self.to_tsv())?;
        Ok(())
    }
}

/// An ordered key-value metadata record.
#[derive(Debug, Clone, Default)]
pub struct Metadata {
    entries: Vec<(String, String)>,
}

impl Metadata {
    pub fn new() -> Self {
        Metadata::default()
    }

    pub fn push(&mut self, key: &str, value: impl std::fmt::Display) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn push_num(&mut self, key: &str, value: f64) {
        self.entries.push((key.to_string(), fmt_num(value)));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push('\t');
            out.push_str(v);
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(path, self.render())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_renders_deterministically() {
        let mut t = Table::new(&["x", "y"]);
        t.push_row(vec![1.0, 2.5]);
        t.push_row(vec![-0.125, 1e-9]);
        let a = t.to_tsv();
        let b = t.to_tsv();
        assert_eq!(a, b);
        assert!(a.starts_with("x\ty\n"));
        assert!(a.contains("1.000000000000e0\t2.500000000000e0"));
    }

    #[test]
    fn metadata_preserves_order() {
        let mut m = Metadata::new();
        m.push("study", "scaling");
        m.push_num("epsilon", 0.05);
        let r = m.render();
        let lines: Vec<&str> = r.lines().collect();
        assert_eq!(lines[0], "study\tscaling");
        assert!(lines[1].starts_with("epsilon\t5.0000"));
    }

    #[test]
    fn write_round_trip() {
        let dir = std::env::temp_dir().join("nlsemi_report_test");
        let path = dir.join("t.tsv");
        let mut t = Table::new(&["a"]);
        t.push_row(vec![3.0]);
        t.write(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, t.to_tsv());
        std::fs::remove_dir_all(&dir).ok();
    }
}
