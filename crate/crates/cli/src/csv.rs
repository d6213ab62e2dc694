//! Minimal CSV assembly with fixed float formatting (17 significant digits)
//! so that identical runs produce identical bytes.

use std::path::Path;

use crate::error::CliError;

pub fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Empty cell for missing values.
pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_header(header: Vec<String>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.render()).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            source: e,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt(-2.0), "-2.0000000000000000e0");
        assert_eq!(fmt_opt(None), "");
    }

    #[test]
    fn render_rows() {
        let mut c = Csv::new(&["a", "b"]);
        c.push(vec!["1".into(), "".into()]);
        assert_eq!(c.render(), "a,b\n1,\n");
    }
}
