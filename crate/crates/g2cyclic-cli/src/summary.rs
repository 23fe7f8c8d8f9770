//! Check records, the machine summary and the human report.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: String,
    pub expected: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, value: impl ToString, expected: impl ToString) -> Self {
        Self { name: name.into(), pass, value: value.to_string(), expected: expected.to_string() }
    }

    /// `value <= limit`, printed in scientific notation.
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self::new(name, value <= limit, format!("{value:.3e}"), format!("<= {limit:.1e}"))
    }

    pub fn equals<T: PartialEq + ToString>(name: impl Into<String>, value: T, expected: T) -> Self {
        Self::new(name, value == expected, value.to_string(), expected.to_string())
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, ok, ok, true)
    }
}

/// Everything one subcommand produced.
pub struct Outcome {
    pub subcommand: &'static str,
    pub checks: Vec<Check>,
    /// Extra machine-readable data, merged into the summary.
    pub data: Map<String, Value>,
    /// Free-form lines for the human report.
    pub notes: Vec<String>,
    pub artifacts: Vec<String>,
    dir: PathBuf,
}

impl Outcome {
    pub fn new(subcommand: &'static str, dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(Self { subcommand, checks: Vec::new(), data: Map::new(), notes: Vec::new(), artifacts: Vec::new(), dir: dir.to_path_buf() })
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    pub fn put<T: Serialize>(&mut self, key: &str, value: &T) -> Result<()> {
        self.data.insert(key.to_string(), serde_json::to_value(value)?);
        Ok(())
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Creates an artifact file and records it.
    pub fn create(&mut self, name: &str) -> Result<fs::File> {
        self.artifacts.push(name.to_string());
        let p = self.path(name);
        fs::File::create(&p).with_context(|| format!("creating {}", p.display()))
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<()> {
        self.artifacts.push(name.to_string());
        let p = self.path(name);
        fs::write(&p, text).with_context(|| format!("writing {}", p.display()))
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn summary_json(&self, seed: u64) -> Value {
        let mut m = Map::new();
        m.insert("subcommand".into(), self.subcommand.into());
        m.insert("seed".into(), seed.into());
        m.insert("all_pass".into(), self.all_pass().into());
        m.insert("passed".into(), self.checks.iter().filter(|c| c.pass).count().into());
        m.insert("total".into(), self.checks.len().into());
        m.insert("checks".into(), serde_json::to_value(&self.checks).expect("plain data"));
        let mut artifacts = self.artifacts.clone();
        artifacts.push("summary.json".into());
        artifacts.push("report.txt".into());
        m.insert("artifacts".into(), artifacts.into());
        m.insert("data".into(), Value::Object(self.data.clone()));
        Value::Object(m)
    }

    pub fn report_text(&self) -> String {
        let mut s = String::new();
        let passed = self.checks.iter().filter(|c| c.pass).count();
        let _ = writeln!(s, "g2cyclic {}: {passed}/{} checks pass", self.subcommand, self.checks.len());
        let _ = writeln!(s);
        for line in &self.notes {
            let _ = writeln!(s, "{line}");
        }
        if !self.notes.is_empty() {
            let _ = writeln!(s);
        }
        let width = self.checks.iter().map(|c| c.name.chars().count()).max().unwrap_or(0);
        for c in &self.checks {
            let pad = width - c.name.chars().count();
            let _ = writeln!(s, "[{}] {}{}  {}  (expected {})", if c.pass { "pass" } else { "FAIL" }, c.name, " ".repeat(pad), c.value, c.expected);
        }
        s
    }

    /// Writes `summary.json` and `report.txt`; returns whether every check passed.
    pub fn finish(self, seed: u64) -> Result<bool> {
        let json = serde_json::to_string_pretty(&self.summary_json(seed))?;
        fs::write(self.path("summary.json"), json + "\n").context("writing summary.json")?;
        fs::write(self.path("report.txt"), self.report_text()).context("writing report.txt")?;
        Ok(self.all_pass())
    }
}
