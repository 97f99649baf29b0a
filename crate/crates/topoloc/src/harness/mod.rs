//! Config-driven sweeps and machine-readable reports.

mod config;
mod tasks;

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

pub use config::{point_seed, OutputFormat, OutputSpec, Point, RunConfig, SweepAxis, Task, TaskOptions, DEFAULT_MAX_POINTS};
pub use tasks::{evaluate, route_geometry, Certificate, ErrorInfo, RouteResult, Value};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;
/// Significant digits kept for real numbers in reports.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub index: usize,
    pub parameters: BTreeMap<String, Json>,
    pub seed: u64,
    pub results: Vec<RouteResult>,
    /// Cross-validation only: whether every route produced the same invariant.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agree: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub divergent: Vec<Task>,
}

impl PointReport {
    pub fn ok(&self) -> bool {
        self.results.iter().all(RouteResult::ok) && self.agree != Some(false)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub points: usize,
    pub succeeded: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub schema_version: u32,
    pub command: String,
    pub routes: Vec<Task>,
    pub config: RunConfig,
    pub points: Vec<PointReport>,
    pub summary: Summary,
}

impl InvariantReport {
    pub fn all_ok(&self) -> bool {
        self.summary.failed == 0
    }

    /// JSON with reals rounded to [`SIGNIFICANT_DIGITS`].
    pub fn to_json(&self) -> Result<String> {
        let mut v = serde_json::to_value(self).map_err(|e| Error::Io(e.to_string()))?;
        round_reals(&mut v);
        let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::Io(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    /// One row per point and route.
    pub fn to_csv(&self) -> Result<String> {
        let params: Vec<String> = self.config.sweep.iter().map(|a| a.path.clone()).collect();
        let mut w = csv::Writer::from_writer(vec![]);
        let mut header = vec!["point".to_string(), "seed".to_string()];
        header.extend(params.iter().cloned());
        header.extend(
            ["route", "value", "gap", "localizer_gap", "tuning_ok", "tolerance", "raw", "error_code"].map(String::from),
        );
        w.write_record(&header).map_err(io)?;
        for p in &self.points {
            for r in &p.results {
                let mut row = vec![p.index.to_string(), p.seed.to_string()];
                row.extend(params.iter().map(|k| p.parameters.get(k).map(json_cell).unwrap_or_default()));
                let c = r.certificate.clone().unwrap_or_default();
                let f = |x: Option<f64>| x.map(fmt_real).unwrap_or_default();
                row.push(r.route.to_string());
                row.push(match &r.value {
                    Some(Value::Integer(i)) => i.to_string(),
                    Some(Value::Real(x)) => fmt_real(*x),
                    Some(Value::Map(m)) => {
                        m.iter().map(|v| v.map(|i| i.to_string()).unwrap_or_else(|| "null".into())).collect::<Vec<_>>().join(";")
                    }
                    None => String::new(),
                });
                row.extend([f(c.gap), f(c.localizer_gap), c.tuning_ok.map(|b| b.to_string()).unwrap_or_default(), f(c.tolerance), f(c.raw)]);
                row.push(r.error.as_ref().map(|e| e.code.clone()).unwrap_or_default());
                w.write_record(&row).map_err(io)?;
            }
        }
        String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => self.to_csv(),
        }
    }

    /// Writes to the configured output path, if any.
    pub fn write(&self) -> Result<()> {
        if let Some(path) = &self.config.output.path {
            write_text(path, &self.render(self.config.output.format)?)?;
        }
        Ok(())
    }
}

fn io(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn json_cell(v: &Json) -> String {
    match v {
        Json::String(s) => s.clone(),
        Json::Number(n) if n.is_f64() => fmt_real(n.as_f64().unwrap()),
        other => other.to_string(),
    }
}

pub fn round_significant(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

fn fmt_real(x: f64) -> String {
    let r = round_significant(x);
    if r != 0.0 && !(1e-4..1e15).contains(&r.abs()) {
        format!("{r:e}")
    } else {
        r.to_string()
    }
}

fn round_reals(v: &mut Json) {
    match v {
        Json::Number(n) if n.is_f64() => {
            if let Some(r) = serde_json::Number::from_f64(round_significant(n.as_f64().unwrap())) {
                *n = r;
            }
        }
        Json::Array(a) => a.iter_mut().for_each(round_reals),
        Json::Object(o) => o.values_mut().for_each(round_reals),
        _ => {}
    }
}

/// Whether sweep points run on the worker pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Parallel,
    Serial,
}

/// Runs `config.task` at every sweep point.
pub fn run(config: &RunConfig) -> Result<InvariantReport> {
    run_with(config, Execution::Parallel)
}

pub fn run_with(config: &RunConfig, exec: Execution) -> Result<InvariantReport> {
    let task = config.task.ok_or_else(|| config::invalid("task", "run needs a task"))?;
    let points = config.validate()?;
    let timing = config.output.timing;
    let reports = map_points(&points, exec, |p| PointReport {
        index: p.index,
        parameters: p.parameters.clone(),
        seed: p.seed,
        results: vec![evaluate(task, p, false, timing)],
        agree: None,
        divergent: vec![],
    });
    Ok(assemble("run", vec![task], config, reports))
}

/// Runs every route at every point and flags disagreements.
///
/// Each route gets the boundary conditions it needs; only the extents of the
/// configured geometry are shared.
pub fn cross_validate(config: &RunConfig) -> Result<InvariantReport> {
    cross_validate_with(config, Execution::Parallel)
}

pub fn cross_validate_with(config: &RunConfig, exec: Execution) -> Result<InvariantReport> {
    if config.routes.len() < 2 {
        return Err(config::invalid("routes", "cross-validation needs at least two routes"));
    }
    let points = config.validate()?;
    let timing = config.output.timing;
    let reports = map_points(&points, exec, |p| {
        let results: Vec<RouteResult> = config.routes.iter().map(|&r| evaluate(r, p, true, timing)).collect();
        let (agree, divergent) = compare(&results, p.options.marker_tol);
        PointReport { index: p.index, parameters: p.parameters.clone(), seed: p.seed, results, agree: Some(agree), divergent }
    });
    Ok(assemble("cross-validate", config.routes.clone(), config, reports))
}

fn map_points<F>(points: &[Point], exec: Execution, f: F) -> Vec<PointReport>
where
    F: Fn(&Point) -> PointReport + Sync,
{
    match exec {
        Execution::Parallel => points.par_iter().map(&f).collect(),
        Execution::Serial => points.iter().map(&f).collect(),
    }
}

fn assemble(command: &str, routes: Vec<Task>, config: &RunConfig, points: Vec<PointReport>) -> InvariantReport {
    let failed = points.iter().filter(|p| !p.ok()).count();
    InvariantReport {
        schema_version: SCHEMA_VERSION,
        command: command.to_string(),
        routes,
        config: config.clone(),
        summary: Summary { points: points.len(), succeeded: points.len() - failed, failed },
        points,
    }
}

/// Consensus is the most frequent integer; reals agree if within `real_tol` of it.
fn compare(results: &[RouteResult], real_tol: f64) -> (bool, Vec<Task>) {
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for r in results {
        if let Some(v) = r.canonical() {
            *counts.entry(v).or_default() += 1;
        }
    }
    let consensus = results
        .iter()
        .filter_map(RouteResult::canonical)
        .max_by_key(|v| (counts[v], std::cmp::Reverse(results.iter().position(|r| r.canonical() == Some(*v)))));
    let mut divergent = Vec::new();
    for r in results {
        let agrees = match (&r.value, consensus) {
            (Some(Value::Real(x)), Some(c)) => (x - c as f64).abs() <= real_tol,
            (Some(_), Some(c)) => r.canonical() == Some(c),
            _ => false,
        };
        if !agrees {
            divergent.push(r.route);
        }
    }
    (divergent.is_empty(), divergent)
}

/// Exit status contract of the command line.
pub fn exit_code(result: &Result<InvariantReport>) -> i32 {
    match result {
        Ok(r) if r.all_ok() => 0,
        Ok(_) => 2,
        Err(Error::ConfigInvalid { .. }) => 1,
        Err(_) => 2,
    }
}

#[cfg(test)]
mod tests;
