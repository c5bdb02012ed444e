use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;

use crate::error::Result;

pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// `"0"`, `"1;2"`.
pub fn fmt_k(k: &[usize]) -> String {
    k.iter().map(usize::to_string).collect::<Vec<_>>().join(";")
}

pub fn fmt_bool(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "fail"
    }
}

/// A CSV file in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len(), "{}", self.name);
        self.rows.push(row);
    }

    pub fn write_to(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(format!("{}.csv", self.name));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(path)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
    Skipped,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::Inconclusive => "inconclusive",
            Self::Skipped => "skipped",
        }
    }
}

/// Aggregate of one check family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    pub count: usize,
    pub failures: usize,
    pub inconclusive: usize,
    /// Smallest slack seen (`None` if the family has no slack column).
    pub worst_slack: Option<f64>,
    pub runtime_s: f64,
}

impl CheckResult {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            status: Status::Skipped,
            count: 0,
            failures: 0,
            inconclusive: 0,
            worst_slack: None,
            runtime_s: 0.0,
        }
    }

    pub fn record(&mut self, status: Status, slack: Option<f64>) {
        self.count += 1;
        match status {
            Status::Fail => self.failures += 1,
            Status::Inconclusive => self.inconclusive += 1,
            _ => {}
        }
        if let Some(s) = slack.filter(|s| !s.is_nan()) {
            self.worst_slack = Some(self.worst_slack.map_or(s, |w| w.min(s)));
        }
        self.status = if self.failures > 0 {
            Status::Fail
        } else if self.count == self.inconclusive {
            Status::Inconclusive
        } else {
            Status::Pass
        };
    }

    pub fn pass_fail(&mut self, pass: bool, slack: Option<f64>) {
        self.record(if pass { Status::Pass } else { Status::Fail }, slack);
    }

    pub fn add_time(&mut self, t: Duration) {
        self.runtime_s += t.as_secs_f64();
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub command: String,
    pub checks: Vec<CheckResult>,
    pub tables: Vec<Table>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    /// 0 when nothing failed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// `summary` table: one row per check, without runtimes.
    pub fn summary_table(&self) -> Table {
        let mut t = Table::new("summary", &["check", "status", "count", "failures", "inconclusive", "worst_slack"]);
        for c in &self.checks {
            t.push(vec![
                c.name.clone(),
                c.status.as_str().into(),
                c.count.to_string(),
                c.failures.to_string(),
                c.inconclusive.to_string(),
                c.worst_slack.map_or_else(String::new, fmt),
            ]);
        }
        t
    }

    /// Write every table, `summary.csv` and `manifest.json` into `dir`.
    pub fn write(&self, dir: &Path, config_hash: &str, config_json: &str) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut paths = Vec::new();
        for t in self.tables.iter().chain(std::iter::once(&self.summary_table())) {
            paths.push(t.write_to(dir)?);
        }
        let manifest = Manifest {
            command: &self.command,
            package: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            config_hash,
            config: serde_json::from_str(config_json)?,
            files: self.tables.iter().map(|t| format!("{}.csv", t.name)).collect(),
            checks: &self.checks,
            passed: self.passed(),
        };
        let path = dir.join("manifest.json");
        fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
        paths.push(path);
        Ok(paths)
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    package: &'a str,
    version: &'a str,
    config_hash: &'a str,
    config: serde_json::Value,
    files: Vec<String>,
    checks: &'a [CheckResult],
    passed: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_aggregation() {
        let mut c = CheckResult::new("x");
        assert_eq!(c.status, Status::Skipped);
        c.record(Status::Inconclusive, None);
        assert_eq!(c.status, Status::Inconclusive);
        c.pass_fail(true, Some(0.5));
        assert_eq!(c.status, Status::Pass);
        c.pass_fail(false, Some(-1.0));
        assert_eq!(c.status, Status::Fail);
        assert_eq!((c.count, c.failures, c.inconclusive), (3, 1, 1));
        assert_eq!(c.worst_slack, Some(-1.0));
    }

    #[test]
    fn k_labels() {
        assert_eq!(fmt_k(&[0]), "0");
        assert_eq!(fmt_k(&[1, 2]), "1;2");
    }
}
