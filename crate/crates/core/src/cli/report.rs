//! Per-case rows, CSV and summary emission.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    /// `|computed − expected| ≤ tolerance`
    Within,
    /// `computed ≥ expected − tolerance`
    AtLeast,
    /// `computed ≤ expected + tolerance`
    AtMost,
}

impl Check {
    fn name(self) -> &'static str {
        match self {
            Check::Within => "within",
            Check::AtLeast => "at_least",
            Check::AtMost => "at_most",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub computed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub check: Check,
}

impl Row {
    pub fn new(name: impl Into<String>, computed: f64, expected: f64, tolerance: f64, check: Check) -> Self {
        Row {
            name: name.into(),
            computed,
            expected,
            tolerance,
            check,
        }
    }

    pub fn within(name: impl Into<String>, computed: f64, expected: f64, tolerance: f64) -> Self {
        Row::new(name, computed, expected, tolerance, Check::Within)
    }

    pub fn at_least(name: impl Into<String>, computed: f64, bound: f64) -> Self {
        Row::new(name, computed, bound, 0.0, Check::AtLeast)
    }

    pub fn at_most(name: impl Into<String>, computed: f64, bound: f64) -> Self {
        Row::new(name, computed, bound, 0.0, Check::AtMost)
    }

    pub fn pass(&self) -> bool {
        match self.check {
            Check::Within => (self.computed - self.expected).abs() <= self.tolerance,
            Check::AtLeast => self.computed >= self.expected - self.tolerance,
            Check::AtMost => self.computed <= self.expected + self.tolerance,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub command: String,
    pub target: String,
    pub rows: Vec<Row>,
    /// Extra structured output for the summary file.
    pub details: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str, target: &str) -> Self {
        Report {
            command: command.to_string(),
            target: target.to_string(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    pub fn detail(&mut self, key: &str, value: Value) {
        self.details.insert(key.to_string(), value);
    }

    pub fn pass(&self) -> bool {
        self.rows.iter().all(Row::pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass() {
            0
        } else {
            1
        }
    }

    pub fn write_csv<W: io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["name", "computed", "expected", "tolerance", "pass"])?;
        for r in &self.rows {
            w.write_record([
                r.name.clone(),
                r.computed.to_string(),
                r.expected.to_string(),
                r.tolerance.to_string(),
                r.pass().to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                json!({
                    "name": r.name,
                    "computed": finite_or_null(r.computed),
                    "expected": finite_or_null(r.expected),
                    "tolerance": finite_or_null(r.tolerance),
                    "check": r.check.name(),
                    "pass": r.pass(),
                })
            })
            .collect();
        let failed: Vec<&str> = self.rows.iter().filter(|r| !r.pass()).map(|r| r.name.as_str()).collect();
        json!({
            "command": self.command,
            "target": self.target,
            "pass": self.pass(),
            "cases": self.rows.len(),
            "failed": failed,
            "rows": rows,
            "details": Value::Object(self.details.clone()),
        })
    }

    /// One line per failing row.
    pub fn diff(&self) -> Vec<String> {
        self.rows
            .iter()
            .filter(|r| !r.pass())
            .map(|r| {
                let rel = match r.check {
                    Check::Within => "=",
                    Check::AtLeast => ">=",
                    Check::AtMost => "<=",
                };
                format!(
                    "FAIL {}: computed {}, expected {} {} (tolerance {})",
                    r.name, r.computed, rel, r.expected, r.tolerance
                )
            })
            .collect()
    }

    /// Writes `<stem>.csv` and `<stem>.summary.json` under `dir`.
    pub fn save(&self, dir: &Path, stem: &str) -> io::Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("{stem}.csv"));
        let summary_path = dir.join(format!("{stem}.summary.json"));
        self.write_csv(fs::File::create(&csv_path)?).map_err(io::Error::other)?;
        let text = serde_json::to_string_pretty(&self.summary()).map_err(io::Error::other)?;
        fs::write(&summary_path, text + "\n")?;
        Ok((csv_path, summary_path))
    }
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}
