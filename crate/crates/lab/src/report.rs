//! Experiment reports: tables, fits, predictions and per-criterion verdicts.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use grauert_core::asymptotics::Prediction;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::RunResult;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    /// Acceptance criterion (`AC1` … `AC12`) or property identifier.
    pub id: String,
    pub description: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

impl CriterionResult {
    pub fn new(id: &str, description: &str, measured: f64, threshold: f64, passed: bool) -> Self {
        Self { id: id.into(), description: description.into(), passed, measured, threshold, detail: String::new() }
    }

    /// Passes when `measured ≤ threshold`.
    pub fn at_most(id: &str, description: &str, measured: f64, threshold: f64) -> Self {
        Self::new(id, description, measured, threshold, measured <= threshold)
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: {} (measured {:.3e}, threshold {:.3e}){}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.description,
            self.measured,
            self.threshold,
            if self.detail.is_empty() { String::new() } else { format!(" — {}", self.detail) }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, path: &Path) -> RunResult<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r.iter().map(|v| format!("{v:e}")))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlotKind {
    /// log y against linear x, with fitted lines.
    Semilog,
    /// log y against log x, with fitted lines.
    LogLog,
    /// y against x with a horizontal line at 1.
    Ratio,
}

/// `log y = slope·(x or log x) + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitLine {
    pub slope: f64,
    pub intercept: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub fit: Option<FitLine>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub label: String,
    pub values: BTreeMap<String, f64>,
    pub model: Option<String>,
}

impl FitRecord {
    pub fn new(label: &str, values: &[(&str, f64)]) -> Self {
        Self { label: label.into(), values: values.iter().map(|(k, v)| (k.to_string(), *v)).collect(), model: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: String,
    pub config: ExperimentConfig,
    pub seed: u64,
    pub tables: Vec<Table>,
    pub predictions: Vec<Prediction>,
    pub fits: Vec<FitRecord>,
    pub criteria: Vec<CriterionResult>,
    pub series: Vec<Series>,
    pub plot_kind: Option<PlotKind>,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
    pub timings: BTreeMap<String, f64>,
    pub cache_hits: usize,
    pub cache_misses: usize,
}

impl Report {
    pub fn new(config: &ExperimentConfig) -> Self {
        Self {
            experiment: config.experiment.name().into(),
            config: config.clone(),
            seed: config.seed,
            tables: Vec::new(),
            predictions: Vec::new(),
            fits: Vec::new(),
            criteria: Vec::new(),
            series: Vec::new(),
            plot_kind: None,
            warnings: Vec::new(),
            notes: Vec::new(),
            timings: BTreeMap::new(),
            cache_hits: 0,
            cache_misses: 0,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn criterion(&self, id: &str) -> Option<&CriterionResult> {
        self.criteria.iter().find(|c| c.id == id)
    }

    pub fn summary_lines(&self) -> Vec<String> {
        self.criteria.iter().map(CriterionResult::line).collect()
    }

    /// Writes `<experiment>.csv` (first table), `<experiment>-<name>.csv` for
    /// the rest, and `<experiment>.json`. Returns the written paths.
    pub fn write(&self, dir: &Path) -> RunResult<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut out = Vec::new();
        for (i, t) in self.tables.iter().enumerate() {
            let name =
                if i == 0 { format!("{}.csv", self.experiment) } else { format!("{}-{}.csv", self.experiment, t.name) };
            let p = dir.join(name);
            t.write_csv(&p)?;
            out.push(p);
        }
        let p = dir.join(format!("{}.json", self.experiment));
        fs::write(&p, serde_json::to_string_pretty(self)?)?;
        out.push(p);
        Ok(out)
    }
}
