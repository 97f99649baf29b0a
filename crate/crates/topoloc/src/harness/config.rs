use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

use crate::error::{Error, Result};
use crate::localizer::{Shape, Variant};
use crate::models::ModelSpec;

pub const DEFAULT_MAX_POINTS: usize = 10_000;

/// Computations the harness can dispatch; each one is also a cross-validation route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Chern,
    Winding,
    /// Index pairing on a finite sample (`PFP` for even, `EAE` for odd dimension).
    Index,
    Localizer,
    Z2,
    Bbc,
    FluxFlow,
    LocalMap,
    Semimetal,
    Marker,
}

impl Task {
    pub const ALL: [Task; 10] = [
        Task::Chern,
        Task::Winding,
        Task::Index,
        Task::Localizer,
        Task::Z2,
        Task::Bbc,
        Task::FluxFlow,
        Task::LocalMap,
        Task::Semimetal,
        Task::Marker,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::Chern => "chern",
            Task::Winding => "winding",
            Task::Index => "index",
            Task::Localizer => "localizer",
            Task::Z2 => "z2",
            Task::Bbc => "bbc",
            Task::FluxFlow => "flux_flow",
            Task::LocalMap => "local_map",
            Task::Semimetal => "semimetal",
            Task::Marker => "marker",
        }
    }
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-task numerical parameters; every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TaskOptions {
    pub mu: f64,
    pub nk: usize,
    pub kappa: f64,
    /// Truncation radius; `None` uses 0.4 times the shortest extent.
    pub rho: Option<f64>,
    pub shape: Shape,
    /// Localizer variant; `None` picks one from dimension and symmetries.
    pub variant: Option<Variant>,
    pub certify: bool,
    pub steps: usize,
    /// Open axis for boundary tasks; `None` is the last axis.
    pub axis: Option<usize>,
    pub grid_step: f64,
    /// Kernel window for the semimetal count; `None` uses the default.
    pub tol: Option<f64>,
    pub marker_side: usize,
    pub marker_tol: f64,
    pub zero_tol: f64,
}

impl Default for TaskOptions {
    fn default() -> Self {
        TaskOptions {
            mu: 0.0,
            nk: 24,
            kappa: 0.2,
            rho: None,
            shape: Shape::Square,
            variant: None,
            certify: true,
            steps: 64,
            axis: None,
            grid_step: 2.0,
            tol: None,
            marker_side: 4,
            marker_tol: 0.1,
            zero_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: OutputFormat,
    /// Record wall-clock time per point.
    pub timing: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { path: None, format: OutputFormat::Json, timing: true }
    }
}

/// One sweep axis: a dotted path into the config and the values it takes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub path: String,
    pub values: Vec<Json>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub task: Option<Task>,
    /// Routes compared by `cross-validate`.
    #[serde(default)]
    pub routes: Vec<Task>,
    pub model: ModelSpec,
    #[serde(default)]
    pub options: TaskOptions,
    #[serde(default)]
    pub sweep: Vec<SweepAxis>,
    /// Base seeds; every sweep point is run once per seed.
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default = "default_max_points")]
    pub max_points: usize,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_max_points() -> usize {
    DEFAULT_MAX_POINTS
}

pub(crate) fn invalid(path: &str, message: impl Into<String>) -> Error {
    Error::ConfigInvalid { path: path.to_string(), message: message.into() }
}

/// A fully resolved sweep point.
#[derive(Debug, Clone)]
pub struct Point {
    pub index: usize,
    pub parameters: BTreeMap<String, Json>,
    pub base_seed: u64,
    /// Seed handed to the Hamiltonian builder.
    pub seed: u64,
    pub model: ModelSpec,
    pub options: TaskOptions,
}

/// Seed of point `index`, independent of evaluation order.
pub fn point_seed(base: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(index as u64);
    rng.next_u64()
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let path = e.span().map(|s| key_at(text, s.start)).unwrap_or_default();
            invalid(&path, e.message().to_string())
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Number of points including the seed multiplicity.
    pub fn point_count(&self) -> usize {
        let sweep: usize = self.sweep.iter().map(|a| a.values.len()).product();
        sweep.saturating_mul(self.seeds.len().max(1))
    }

    fn base_seeds(&self) -> Vec<u64> {
        if self.seeds.is_empty() {
            vec![self.model.disorder.as_ref().map(|d| d.seed).unwrap_or(0)]
        } else {
            self.seeds.clone()
        }
    }

    /// Checks paths, the sweep cap and every point's model block.
    pub fn validate(&self) -> Result<Vec<Point>> {
        if self.task.is_none() && self.routes.is_empty() {
            return Err(invalid("task", "either task or routes is required"));
        }
        let n = self.point_count();
        if n > self.max_points {
            return Err(invalid("sweep", format!("{n} points exceed the cap of {}", self.max_points)));
        }
        if self.options.nk < 2 {
            return Err(invalid("options.nk", "must be at least 2"));
        }
        if !(self.options.kappa > 0.0) {
            return Err(invalid("options.kappa", "must be positive"));
        }
        let tree = serde_json::to_value(self).map_err(|e| invalid("", e.to_string()))?;
        for (i, axis) in self.sweep.iter().enumerate() {
            let here = format!("sweep[{i}].path");
            if !(axis.path.starts_with("model.") || axis.path.starts_with("options.")) {
                return Err(invalid(&here, "sweeps may only vary model.* or options.*"));
            }
            if lookup(&tree, &axis.path).is_none() {
                return Err(invalid(&here, format!("'{}' does not exist in the config", axis.path)));
            }
            if axis.values.is_empty() {
                return Err(invalid(&format!("sweep[{i}].values"), "empty value list"));
            }
        }
        let mut points = Vec::with_capacity(n);
        let combos = cartesian(&self.sweep);
        for combo in &combos {
            let mut t = tree.clone();
            let mut parameters = BTreeMap::new();
            for (axis, v) in self.sweep.iter().zip(combo) {
                *lookup_mut(&mut t, &axis.path).expect("checked") = v.clone();
                parameters.insert(axis.path.clone(), v.clone());
            }
            let model: ModelSpec = serde_json::from_value(t["model"].clone()).map_err(|e| invalid("model", e.to_string()))?;
            let options: TaskOptions = serde_json::from_value(t["options"].clone()).map_err(|e| invalid("options", e.to_string()))?;
            model.realize()?;
            for &base in &self.base_seeds() {
                let index = points.len();
                points.push(Point {
                    index,
                    parameters: parameters.clone(),
                    base_seed: base,
                    seed: point_seed(base, index),
                    model: model.clone(),
                    options: options.clone(),
                });
            }
        }
        Ok(points)
    }
}

/// Cartesian product, first axis slowest.
fn cartesian(axes: &[SweepAxis]) -> Vec<Vec<Json>> {
    let mut out = vec![vec![]];
    for axis in axes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push(v.clone());
                    p
                })
            })
            .collect();
    }
    out
}

fn lookup<'a>(tree: &'a Json, path: &str) -> Option<&'a Json> {
    path.split('.').try_fold(tree, |node, key| node.as_object()?.get(key))
}

fn lookup_mut<'a>(tree: &'a mut Json, path: &str) -> Option<&'a mut Json> {
    path.split('.').try_fold(tree, |node, key| node.as_object_mut()?.get_mut(key))
}

/// Dotted key of the TOML line containing byte `offset`, best effort.
fn key_at(text: &str, offset: usize) -> String {
    let mut table = String::new();
    let mut key = String::new();
    let mut pos = 0;
    for line in text.lines() {
        let t = line.trim();
        if t.starts_with('[') {
            table = t.trim_matches(|c| c == '[' || c == ']').trim().to_string();
            key.clear();
        } else if let Some((k, _)) = t.split_once('=') {
            key = k.trim().to_string();
        }
        pos += line.len() + 1;
        if pos > offset {
            break;
        }
    }
    match (table.is_empty(), key.is_empty()) {
        (true, _) => key,
        (false, true) => table,
        (false, false) => format!("{table}.{key}"),
    }
}
