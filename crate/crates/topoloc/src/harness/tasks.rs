use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{Point, Task, TaskOptions};
use crate::bbc::{self, ExpStep, FlowOptions};
use crate::error::{Error, Result};
use crate::kspace::{chern_number, fhs_field_strength, winding_number, winding_number_3d, BlochMap};
use crate::linalg::spectral_gap;
use crate::localizer::{
    local_index_map, localizer_report, semimetal_kernel_count, semimetal_tolerance, LocalizerSpec, Variant,
};
use crate::models::{build_hamiltonian, position_operators, Boundary, LatticeGeometry, TightBindingModel};
use crate::realspace::{
    central_region, chiral_off_diagonal, default_buffer, dirac_data, fermi_projection, index_eae, index_pfp,
    local_chern_marker, z2_nullity_parity, Parity,
};

/// Result value of one route at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Integer(i64),
    Real(f64),
    Map(Vec<Option<i64>>),
}

/// Evidence attached to every value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub route: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub localizer_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tuning_ok: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    /// Unrounded value behind an integer result.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub raw: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorInfo {
    pub code: String,
    pub message: String,
}

impl From<&Error> for ErrorInfo {
    fn from(e: &Error) -> Self {
        ErrorInfo { code: e.code().to_string(), message: e.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteResult {
    pub route: Task,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

impl RouteResult {
    pub fn ok(&self) -> bool {
        self.error.is_none()
    }

    /// Integer comparable across routes; Z2 signs `±1` map to `0/1`.
    pub fn canonical(&self) -> Option<i64> {
        match (&self.value, &self.certificate) {
            (Some(Value::Integer(v)), Some(c)) if c.route == "skew_pfaffian" || c.route == "det_d3" => Some((1 - v) / 2),
            (Some(Value::Integer(v)), _) => Some(*v),
            _ => None,
        }
    }
}

/// Boundary conditions a route needs, applied during cross-validation.
pub fn route_geometry(task: Task, geom: &LatticeGeometry, axis: usize) -> Result<LatticeGeometry> {
    let d = geom.d();
    let boundary: Vec<Boundary> = match task {
        Task::Chern | Task::Winding => return Ok(geom.clone()),
        Task::Index | Task::Z2 => vec![Boundary::Periodic; d],
        Task::Bbc if d > 1 => (0..d).map(|j| if j == axis { Boundary::Open } else { Boundary::Periodic }).collect(),
        _ => vec![Boundary::Open; d],
    };
    LatticeGeometry::new(geom.extent.clone(), geom.orbitals, boundary)
}

pub fn default_axis(opts: &TaskOptions, d: usize) -> usize {
    opts.axis.unwrap_or(d.saturating_sub(1))
}

/// Runs one route at one point.
pub fn evaluate(task: Task, point: &Point, adapt_geometry: bool, timing: bool) -> RouteResult {
    let start = Instant::now();
    let outcome = point.model.realize().and_then(|(model, geom, _)| {
        let geom = if adapt_geometry { route_geometry(task, &geom, default_axis(&point.options, geom.d()))? } else { geom };
        compute(task, &model, &geom, point.seed, &point.options)
    });
    let elapsed_ms = timing.then(|| start.elapsed().as_secs_f64() * 1e3);
    match outcome {
        Ok((value, certificate)) => RouteResult { route: task, value: Some(value), certificate: Some(certificate), error: None, elapsed_ms },
        Err(e) => RouteResult { route: task, value: None, certificate: None, error: Some((&e).into()), elapsed_ms },
    }
}

fn cert(route: &str) -> Certificate {
    Certificate { route: route.to_string(), ..Certificate::default() }
}

fn default_variant(model: &TightBindingModel) -> Result<Variant> {
    let odd_trs = model.symmetries.trs.as_ref().is_some_and(|t| t.sign == -1);
    let chiral = model.symmetries.chiral.is_some();
    Ok(match model.d {
        1 | 3 if chiral => Variant::Odd,
        3 if odd_trs => Variant::DetD3,
        2 if odd_trs => Variant::SkewD2Trs,
        2 => Variant::Even,
        d => return Err(Error::IncompatibleVariant(format!("no localizer variant applies in d={d}"))),
    })
}

fn localizer_spec(model: &TightBindingModel, geom: &LatticeGeometry, opts: &TaskOptions, variant: Option<Variant>) -> Result<LocalizerSpec> {
    let variant = match variant.or(opts.variant) {
        Some(v) => v,
        None => default_variant(model)?,
    };
    let rho = opts.rho.unwrap_or(0.4 * *geom.extent.iter().min().unwrap() as f64);
    Ok(LocalizerSpec::new(variant, opts.kappa, rho)?.with_shape(opts.shape))
}

fn compute(task: Task, model: &TightBindingModel, geom: &LatticeGeometry, seed: u64, opts: &TaskOptions) -> Result<(Value, Certificate)> {
    let d = model.d;
    match task {
        Task::Chern => {
            if d != 2 {
                return Err(Error::UnsupportedDimension(d));
            }
            let bloch = BlochMap::new(model)?;
            let c = chern_number(&bloch, opts.mu, (0, 1), opts.nk)?;
            // chern_number is minus the lattice field-strength sum
            let raw = -fhs_field_strength(&bloch, opts.mu, (0, 1), opts.nk)?;
            Ok((Value::Integer(c), Certificate { raw: Some(raw), ..cert("fhs") }))
        }
        Task::Winding => {
            let bloch = BlochMap::new(model)?;
            let w = match d {
                1 => winding_number(&bloch, 0, opts.nk)?,
                3 => winding_number_3d(&bloch, opts.nk)?,
                _ => return Err(Error::UnsupportedDimension(d)),
            };
            Ok((Value::Integer(w), cert("winding")))
        }
        Task::Index => {
            let h = build_hamiltonian(model, geom, seed)?;
            if d == 2 {
                let p = fermi_projection(&h, opts.mu)?;
                let dd = dirac_data(&position_operators(geom), Parity::Even)?;
                let v = index_pfp(&p, &dd)?;
                Ok((Value::Integer(v), Certificate { gap: Some(p.gap), ..cert("pfp") }))
            } else {
                let (a, x) = chiral_off_diagonal(&h, model, geom)?;
                let dd = dirac_data(&x, Parity::Odd)?;
                let v = index_eae(&a, &dd)?;
                Ok((Value::Integer(v), Certificate { gap: Some(spectral_gap(&h, 0.0)?), ..cert("eae") }))
            }
        }
        Task::Localizer => {
            let h = build_hamiltonian(model, geom, seed)?;
            let x = position_operators(geom);
            let spec = localizer_spec(model, geom, opts, None)?;
            let r = localizer_report(&h, &x, &model.symmetries, &spec, opts.certify)?;
            let route = match r.variant {
                Variant::Even => "even_localizer",
                Variant::Odd => "odd_localizer",
                Variant::SkewD2Trs => "skew_pfaffian",
                Variant::DetD3 => "det_d3",
            };
            let c = Certificate {
                gap: Some(r.tuning.gap),
                localizer_gap: r.localizer_gap,
                tuning_ok: Some(r.tuning.tuning_ok),
                kappa: Some(spec.kappa),
                rho: Some(spec.rho),
                kappa_bound: Some(r.tuning.kappa_bound),
                rho_bound: Some(r.tuning.rho_bound),
                method: r.method.map(|m| format!("{m:?}").to_lowercase()),
                raw: r.det_imag,
                ..cert(route)
            };
            Ok((Value::Integer(r.value), c))
        }
        Task::Z2 => {
            if d != 2 {
                return Err(Error::UnsupportedDimension(d));
            }
            let h = build_hamiltonian(model, geom, seed)?;
            let p = fermi_projection(&h, opts.mu)?;
            let dd = dirac_data(&position_operators(geom), Parity::Even)?;
            let v = z2_nullity_parity(&p, &dd)?;
            Ok((Value::Integer(v as i64), Certificate { gap: Some(p.gap), ..cert("nullity_parity") }))
        }
        Task::Bbc => {
            let axis = default_axis(opts, d);
            let hs = bbc::half_space_restrict_at(model, geom, axis, seed, opts.mu)?;
            if d == 1 {
                let v = bbc::chiral_boundary_index(&hs, opts.zero_tol)?;
                Ok((Value::Integer(v), Certificate { tolerance: Some(opts.zero_tol), ..cert("chiral_boundary") }))
            } else {
                let u = bbc::exp_map_unitary(&hs, ExpStep::default())?;
                let raw = bbc::boundary_winding_value(&u, &hs)?;
                let v = bbc::boundary_winding(&u, &hs)?;
                let c = Certificate { gap: Some(hs.delta.1 - hs.delta.0), raw: Some(raw), tolerance: Some(bbc::INTEGER_TOL), ..cert("boundary_winding") };
                Ok((Value::Integer(v), c))
            }
        }
        Task::FluxFlow => {
            let fo = FlowOptions { steps: opts.steps, seed, ..FlowOptions::default() };
            let t = bbc::flux_spectral_flow_with(model, geom, opts.mu, &fo)?;
            Ok((Value::Integer(t.flow), Certificate { raw: Some(t.reference), ..cert("flux_flow") }))
        }
        Task::LocalMap => {
            let h = build_hamiltonian(model, geom, seed)?;
            let x = position_operators(geom);
            let spec = localizer_spec(model, geom, opts, Some(Variant::Even))?;
            let grid = center_grid(&x, opts.grid_step);
            let map = local_index_map(&h, &x, &spec, &grid)?;
            Ok((Value::Map(map), Certificate { kappa: Some(spec.kappa), rho: Some(spec.rho), ..cert("local_index_map") }))
        }
        Task::Semimetal => {
            let h = build_hamiltonian(model, geom, seed)?;
            let x = position_operators(geom);
            let spec = localizer_spec(model, geom, opts, Some(Variant::Even))?;
            let tol = match opts.tol {
                Some(t) => t,
                None => semimetal_tolerance(&h, &x, spec.kappa)?,
            };
            let n = semimetal_kernel_count(&h, &x, &spec, Some(tol))?;
            Ok((Value::Integer(n as i64), Certificate { tolerance: Some(tol), kappa: Some(spec.kappa), rho: Some(spec.rho), ..cert("kernel_count") }))
        }
        Task::Marker => {
            let h = build_hamiltonian(model, geom, seed)?;
            let p = fermi_projection(&h, opts.mu)?;
            let region = central_region(geom, opts.marker_side);
            let m = local_chern_marker(&p, geom, &region, default_buffer(model))?;
            Ok((Value::Real(m), Certificate { gap: Some(p.gap), tolerance: Some(opts.marker_tol), ..cert("chern_marker") }))
        }
    }
}

/// Lattice of localizer centers with spacing `step` covering the sample.
fn center_grid(x: &crate::models::PositionOperators, step: f64) -> Vec<Vec<f64>> {
    let ranges: Vec<(f64, f64)> = x
        .coords
        .iter()
        .map(|c| (c.iter().copied().fold(f64::INFINITY, f64::min), c.iter().copied().fold(f64::NEG_INFINITY, f64::max)))
        .collect();
    let axis_points: Vec<Vec<f64>> = ranges
        .iter()
        .map(|&(lo, hi)| {
            let n = ((hi - lo) / step).floor() as usize;
            (0..=n).map(|i| lo + i as f64 * step).collect()
        })
        .collect();
    let mut out = vec![vec![]];
    for pts in axis_points.iter().rev() {
        out = pts
            .iter()
            .flat_map(|&p| {
                out.iter().map(move |rest| {
                    let mut v = vec![p];
                    v.extend(rest);
                    v
                })
            })
            .collect();
    }
    out
}
