//! Spectral flow under insertion of a unit flux tube.

use std::f64::consts::PI;

use faer::Mat;
use serde::{Deserialize, Serialize};

use super::{bulk_gap_interval, match_states};
use crate::error::{Error, Result};
use crate::linalg::{eigh_dense, Eigh};
use crate::models::{build_hamiltonian, position_operators, LatticeGeometry, TightBindingModel};
use crate::C64;

/// Flux point; generic so that no bond passes through it.
pub const FLUX_POINT: [f64; 2] = [-0.37, -0.5];
/// Radius around the flux point inside which a crossing counts as flux-bound.
pub const BOUND_RADIUS: f64 = 4.5;
/// Minimal distance from the flux point to the sample edge.
const MIN_CLEARANCE: f64 = 6.0;
const MAX_REFINEMENTS: u32 = 4;
const MATCH_OVERLAP: f64 = 0.5;
/// Crossings whose flux-bound weight falls in this band are treated as hybridized.
const HYBRID_BAND: (f64, f64) = (0.25, 0.75);
/// Levels this close to the reference (in units of the gap) are checked for hybridization too,
/// so that avoided crossings at the reference are caught.
const NEAR_FRACTION: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowOptions {
    pub steps: usize,
    pub seed: u64,
    /// Insert the flux with the opposite orientation.
    pub reversed: bool,
    /// Try shifted reference levels if crossings hybridize with edge states.
    pub shift_reference: bool,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions { steps: 64, seed: 0, reversed: false, shift_reference: true }
    }
}

/// One eigenvalue passing the reference level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub alpha: f64,
    /// `+1` upward, `−1` downward.
    pub direction: i64,
    /// Weight within [`BOUND_RADIUS`] of the flux point.
    pub bound_weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralFlowTrace {
    pub alphas: Vec<f64>,
    /// Eigenvalues within the tracking window at each `alpha`.
    pub levels: Vec<Vec<f64>>,
    pub crossings: Vec<Crossing>,
    /// Reference level actually used.
    pub reference: f64,
    /// Net flow of flux-bound states.
    pub flow: i64,
    /// Net flow of states away from the flux (edge states of the open sample).
    pub edge_flow: i64,
}

/// Spectral flow through `mu` as a unit flux is threaded through a plaquette.
pub fn flux_spectral_flow(model: &TightBindingModel, geom: &LatticeGeometry, mu: f64, steps: usize) -> Result<SpectralFlowTrace> {
    flux_spectral_flow_with(model, geom, mu, &FlowOptions { steps, ..FlowOptions::default() })
}

pub fn flux_spectral_flow_with(
    model: &TightBindingModel,
    geom: &LatticeGeometry,
    mu: f64,
    opts: &FlowOptions,
) -> Result<SpectralFlowTrace> {
    if geom.d() != 2 {
        return Err(Error::GeometryMismatch("flux insertion needs d = 2".into()));
    }
    if geom.boundary.iter().any(|b| b.is_periodic()) {
        return Err(Error::GeometryMismatch("flux insertion needs an open sample".into()));
    }
    for j in 0..2 {
        let lo = geom.origin[j] as f64;
        let hi = lo + geom.extent[j] as f64 - 1.0;
        if (FLUX_POINT[j] - lo).min(hi - FLUX_POINT[j]) < MIN_CLEARANCE {
            return Err(Error::GeometryTooSmall(format!("flux point needs {MIN_CLEARANCE} cells of clearance along axis {j}")));
        }
    }
    let (a, b) = bulk_gap_interval(model, mu)?;
    if a >= b {
        return Err(Error::GapClosed { mu, gap: 0.0 });
    }
    let flux = FluxFamily::new(model, geom, opts)?;
    let g = b - a;
    let mut refs = vec![mu];
    if opts.shift_reference {
        for s in 1..=4 {
            let off = 0.1 * g * s as f64;
            refs.extend([mu + off, mu - off]);
        }
    }
    let refs: Vec<f64> = refs.into_iter().filter(|&r| r > a + 0.1 * g && r < b - 0.1 * g).collect();
    let window = 0.5 * g;
    let mut last = None;
    for r in refs {
        let (trace, near_hybrid) = flux.track(r, window, NEAR_FRACTION * g, opts.steps)?;
        let hybrid = near_hybrid || trace.crossings.iter().any(|c| is_hybrid(c.bound_weight));
        if !hybrid {
            return Ok(trace);
        }
        last = Some(trace);
    }
    match last {
        Some(t) => Err(Error::NonConvergent(format!(
            "flux-bound states hybridize with edge states at every reference level (last tried {:.3})",
            t.reference
        ))),
        None => Err(Error::GapClosed { mu, gap: g }),
    }
}

fn is_hybrid(w: f64) -> bool {
    w > HYBRID_BAND.0 && w < HYBRID_BAND.1
}

struct FluxFamily {
    base: Vec<(usize, usize, C64)>,
    cut: Vec<f64>,
    bound: Vec<f64>,
    n: usize,
}

impl FluxFamily {
    fn new(model: &TightBindingModel, geom: &LatticeGeometry, opts: &FlowOptions) -> Result<Self> {
        let h = build_hamiltonian(model, geom, opts.seed)?;
        let x = position_operators(geom);
        let (x1, x2) = (&x.coords[0], &x.coords[1]);
        let orient = if opts.reversed { -1.0 } else { 1.0 };
        let base: Vec<(usize, usize, C64)> = h.entries().collect();
        let cut = base
            .iter()
            .map(|&(r, c, _)| {
                let (y0, y1) = (x2[c], x2[r]);
                let p = FLUX_POINT;
                if (y0 - p[1]) * (y1 - p[1]) >= 0.0 {
                    return 0.0;
                }
                let t = (p[1] - y0) / (y1 - y0);
                let xi = x1[c] + t * (x1[r] - x1[c]);
                if xi <= p[0] {
                    return 0.0;
                }
                orient * if y0 > p[1] { 1.0 } else { -1.0 }
            })
            .collect();
        let bound = (0..h.dim())
            .map(|i| {
                let d = ((x1[i] - FLUX_POINT[0]).powi(2) + (x2[i] - FLUX_POINT[1]).powi(2)).sqrt();
                if d <= BOUND_RADIUS {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        Ok(FluxFamily { base, cut, bound, n: h.dim() })
    }

    fn hamiltonian(&self, alpha: f64) -> Mat<C64> {
        let mut m = Mat::<C64>::zeros(self.n, self.n);
        for (&(r, c, v), &s) in self.base.iter().zip(&self.cut) {
            m[(r, c)] += if s == 0.0 { v } else { v * C64::from_polar(1.0, 2.0 * PI * alpha * s) };
        }
        m
    }

    fn eigen(&self, alpha: f64) -> Result<Eigh> {
        eigh_dense(&self.hamiltonian(alpha))
    }

    fn bound_weight(&self, e: &Eigh, col: usize) -> f64 {
        (0..self.n).map(|r| self.bound[r] * e.vectors[(r, col)].norm_sqr()).sum()
    }

    /// The trace and whether a hybridized level came within `near` of `mu`.
    fn track(&self, mu: f64, window: f64, near: f64, steps: usize) -> Result<(SpectralFlowTrace, bool)> {
        let steps = steps.max(1);
        let in_window = |e: &Eigh, w: f64| -> Vec<usize> { (0..e.values.len()).filter(|&i| (e.values[i] - mu).abs() < w).collect() };
        let mut alphas = vec![0.0];
        let mut prev = self.eigen(0.0)?;
        let mut levels = vec![in_window(&prev, window).iter().map(|&i| prev.values[i]).collect::<Vec<_>>()];
        let mut crossings = Vec::new();
        let near_hybrid = |e: &Eigh| in_window(e, near).into_iter().any(|i| is_hybrid(self.bound_weight(e, i)));
        let mut hybrid = near_hybrid(&prev);
        for s in 1..=steps {
            let target = s as f64 / steps as f64;
            let (next, found) = self.advance(&prev, *alphas.last().unwrap(), target, mu, window, 0)?;
            crossings.extend(found);
            hybrid |= near_hybrid(&next);
            levels.push(in_window(&next, window).iter().map(|&i| next.values[i]).collect());
            alphas.push(target);
            prev = next;
        }
        let flow = crossings.iter().filter(|c| c.bound_weight >= 0.5).map(|c| c.direction).sum();
        let edge_flow = crossings.iter().filter(|c| c.bound_weight < 0.5).map(|c| c.direction).sum();
        Ok((SpectralFlowTrace { alphas, levels, crossings, reference: mu, flow, edge_flow }, hybrid))
    }

    /// Crossings between `a0` and `a1`, bisecting while the matching is ambiguous.
    fn advance(&self, prev: &Eigh, a0: f64, a1: f64, mu: f64, window: f64, depth: u32) -> Result<(Eigh, Vec<Crossing>)> {
        let next = self.eigen(a1)?;
        let from: Vec<usize> = (0..prev.values.len()).filter(|&i| (prev.values[i] - mu).abs() < window).collect();
        let to: Vec<usize> = (0..next.values.len()).filter(|&i| (next.values[i] - mu).abs() < 2.0 * window).collect();
        let pairs = match_states(&prev.vectors, &from, &next.vectors, &to);
        let mut found = Vec::new();
        let mut ambiguous = false;
        for (i, j) in pairs {
            let (ea, eb) = (prev.values[i], next.values[j]);
            if (ea < mu) == (eb < mu) {
                continue;
            }
            let ov: C64 = (0..self.n).map(|r| prev.vectors[(r, i)].conj() * next.vectors[(r, j)]).sum();
            if ov.norm_sqr() < MATCH_OVERLAP {
                ambiguous = true;
                break;
            }
            let bound_weight = 0.5 * (self.bound_weight(prev, i) + self.bound_weight(&next, j));
            found.push(Crossing { alpha: 0.5 * (a0 + a1), direction: if eb > ea { 1 } else { -1 }, bound_weight });
        }
        if !ambiguous {
            return Ok((next, found));
        }
        if depth >= MAX_REFINEMENTS {
            return Err(Error::StepTooCoarse);
        }
        let mid = 0.5 * (a0 + a1);
        let (m, mut first) = self.advance(prev, a0, mid, mu, window, depth + 1)?;
        let (n, second) = self.advance(&m, mid, a1, mu, window, depth + 1)?;
        first.extend(second);
        Ok((n, first))
    }
}

#[cfg(test)]
pub(super) fn spectrum_at(model: &TightBindingModel, geom: &LatticeGeometry, alpha: f64) -> Vec<f64> {
    FluxFamily::new(model, geom, &FlowOptions::default()).unwrap().eigen(alpha).unwrap().values
}
