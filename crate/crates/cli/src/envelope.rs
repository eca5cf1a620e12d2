//! Result envelope and CSV tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use levykit::mcoracle::Estimate;
use levykit::Complex64;
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    /// Requested numerical tolerance of the routine that produced the value.
    Tolerance,
    /// Monte Carlo standard error; `error` is the larger of the two components.
    StandardError,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scalar {
    pub re: f64,
    pub im: f64,
    pub error: f64,
    pub error_kind: ErrorKind,
}

impl Scalar {
    pub fn computed(v: Complex64, rel_tol: f64) -> Self {
        Self {
            re: v.re,
            im: v.im,
            error: rel_tol * v.norm().max(1e-300),
            error_kind: ErrorKind::Tolerance,
        }
    }

    pub fn real(v: f64, rel_tol: f64) -> Self {
        Self::computed(Complex64::new(v, 0.0), rel_tol)
    }

    pub fn exact(v: f64) -> Self {
        Self {
            re: v,
            im: 0.0,
            error: 0.0,
            error_kind: ErrorKind::Exact,
        }
    }

    pub fn estimate(e: &Estimate) -> Self {
        Self {
            re: e.mean.re,
            im: e.mean.im,
            error: e.se_re.max(e.se_im),
            error_kind: ErrorKind::StandardError,
        }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    /// Observed deviation.
    pub value: f64,
    /// Allowed deviation.
    pub limit: f64,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            pass: value <= limit,
            value,
            limit,
        }
    }
}

/// A CSV table; `panel` is written as a leading `#` comment line.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub panel: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, panel: &str, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            panel: panel.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {}", self.panel);
        let _ = writeln!(s, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultEnvelope {
    pub command: String,
    pub input_hash: String,
    pub outputs: BTreeMap<String, Scalar>,
    /// Table name to written CSV path; `null` when no output directory was given.
    pub tables: BTreeMap<String, Option<PathBuf>>,
    pub diagnostics: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub table_data: Vec<Table>,
}

impl ResultEnvelope {
    pub fn new(command: &str, input: &serde_json::Value) -> Self {
        let bytes = serde_json::to_vec(input).expect("serialising a JSON value cannot fail");
        Self {
            command: command.into(),
            input_hash: hex::encode(Sha256::digest(&bytes)),
            outputs: BTreeMap::new(),
            tables: BTreeMap::new(),
            diagnostics: BTreeMap::new(),
            checks: Vec::new(),
            table_data: Vec::new(),
        }
    }

    pub fn output(&mut self, name: impl Into<String>, s: Scalar) {
        self.outputs.insert(name.into(), s);
    }

    pub fn diagnostic(&mut self, name: impl Into<String>, v: f64) {
        self.diagnostics.insert(name.into(), v);
    }

    pub fn table(&mut self, t: Table) {
        self.tables.insert(t.name.clone(), None);
        self.table_data.push(t);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn write_tables(&mut self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for t in &self.table_data {
            let path = dir.join(t.file_name());
            std::fs::write(&path, t.to_csv()).with_context(|| format!("writing {}", path.display()))?;
            self.tables.insert(t.name.clone(), Some(path));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("envelope serialisation cannot fail")
    }

    /// Human-readable summary; tables not written to disk are appended as CSV.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} (input {})", self.command, &self.input_hash[..16]);
        for (k, v) in &self.outputs {
            let kind = match v.error_kind {
                ErrorKind::Tolerance => "tol",
                ErrorKind::StandardError => "se",
                ErrorKind::Exact => "exact",
            };
            if v.im == 0.0 {
                let _ = writeln!(s, "  {k} = {} ({kind} {:.2e})", v.re, v.error);
            } else {
                let _ = writeln!(s, "  {k} = {} {:+}i ({kind} {:.2e})", v.re, v.im, v.error);
            }
        }
        for (k, v) in &self.diagnostics {
            let _ = writeln!(s, "  [{k}] {v}");
        }
        for c in &self.checks {
            let status = if c.pass { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "  {status} {}: {:.3e} (limit {:.3e})", c.name, c.value, c.limit);
        }
        for t in &self.table_data {
            match self.tables.get(&t.name).cloned().flatten() {
                Some(p) => {
                    let _ = writeln!(s, "  wrote {}", p.display());
                }
                None => {
                    let _ = writeln!(s, "{}", t.to_csv().trim_end());
                }
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new("demo", "a panel", &["x", "density"]);
        t.push(vec![0.5, 1.0]);
        assert_eq!(t.to_csv(), "# a panel\nx,density\n5e-1,1e0\n");
    }

    #[test]
    fn hash_depends_on_input() {
        let a = ResultEnvelope::new("charfn", &serde_json::json!({"u": 1}));
        let b = ResultEnvelope::new("charfn", &serde_json::json!({"u": 2}));
        assert_ne!(a.input_hash, b.input_hash);
        assert_eq!(a.input_hash, ResultEnvelope::new("charfn", &serde_json::json!({"u": 1})).input_hash);
    }

    #[test]
    fn checks_compare_against_limit() {
        assert!(Check::new("ok", 1.0, 1.0).pass);
        assert!(!Check::new("bad", 1.5, 1.0).pass);
        assert!(!Check::new("nan", f64::NAN, 1.0).pass);
    }
}
