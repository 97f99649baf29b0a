//! Boundary probes of bulk invariants.
//!
//! Strips are periodic along one axis and open along the other; "lower" always
//! refers to the half of the strip with negative coordinate along the open
//! axis.

mod flux;

use std::f64::consts::PI;
use std::sync::OnceLock;

use faer::Mat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use flux::{flux_spectral_flow, flux_spectral_flow_with, Crossing, FlowOptions, SpectralFlowTrace};

use crate::error::{Error, Result};
use crate::kspace::grading_frames;
use crate::linalg::{apply_complex_function, apply_function, eigh_dense, Eigh, MatrixKind, OperatorMatrix};
use crate::models::small::{self, CMat};
use crate::models::{bloch_hamiltonian, build_hamiltonian, position_operators, LatticeGeometry, TightBindingModel};
use crate::C64;

/// Grid used to locate the bulk gap around the reference energy.
const BULK_GRID: usize = 48;

/// Gap interval `(a, b)` of the periodic bulk spectrum around `mu`.
///
/// Returns `a ≥ b` if a band crosses `mu` on the grid.
pub fn bulk_gap_interval(model: &TightBindingModel, mu: f64) -> Result<(f64, f64)> {
    let d = model.d;
    let q = model.flux.denominator()?;
    let nk = BULK_GRID;
    let total = nk.pow(d as u32);
    let (lo, hi) = (0..total)
        .into_par_iter()
        .map(|idx| {
            let mut rem = idx;
            let k: Vec<f64> = (0..d)
                .map(|j| {
                    let m = rem % nk;
                    rem /= nk;
                    let scale = if j == 0 { 1.0 / q as f64 } else { 1.0 };
                    2.0 * PI * (m as f64 + 0.5) / nk as f64 * scale
                })
                .collect();
            let ev = eigh_dense(&bloch_hamiltonian(model, &k)?)?.values;
            let below = ev.iter().copied().filter(|&e| e <= mu).fold(f64::NEG_INFINITY, f64::max);
            let above = ev.iter().copied().filter(|&e| e > mu).fold(f64::INFINITY, f64::min);
            Ok((below, above))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold((f64::NEG_INFINITY, f64::INFINITY), |(a, b), (x, y)| (a.max(x), b.min(y)));
    Ok((lo, hi))
}

/// Dirichlet restriction of a model to a strip or half-line sample.
#[derive(Debug)]
pub struct HalfSpaceHamiltonian {
    pub h: OperatorMatrix,
    pub model: TightBindingModel,
    pub geom: LatticeGeometry,
    /// Open axis carrying the boundary.
    pub axis: usize,
    /// Bulk gap interval `Δ = (a, b)`.
    pub delta: (f64, f64),
    eigen: OnceLock<Eigh>,
}

impl HalfSpaceHamiltonian {
    pub fn eigen(&self) -> Result<&Eigh> {
        if let Some(e) = self.eigen.get() {
            return Ok(e);
        }
        let e = eigh_dense(&self.h.to_dense())?;
        Ok(self.eigen.get_or_init(|| e))
    }

    pub fn gap_is_open(&self) -> bool {
        self.delta.0 < self.delta.1
    }

    /// Axis along the boundary (the first periodic one), if any.
    pub fn parallel_axis(&self) -> Option<usize> {
        (0..self.geom.d()).find(|&j| j != self.axis)
    }

    /// Hilbert indices in the lower half along the open axis.
    pub fn lower_mask(&self) -> Vec<bool> {
        position_operators(&self.geom).coords[self.axis].iter().map(|&x| x < 0.0).collect()
    }

    /// Cells along the boundary.
    pub fn boundary_length(&self) -> usize {
        self.parallel_axis().map(|j| self.geom.extent[j]).unwrap_or(1)
    }
}

/// Strip Hamiltonian open along `axis`, periodic along the others; the bulk gap is taken around zero.
pub fn half_space_restrict(model: &TightBindingModel, geom: &LatticeGeometry, axis: usize, seed: u64) -> Result<HalfSpaceHamiltonian> {
    half_space_restrict_at(model, geom, axis, seed, 0.0)
}

pub fn half_space_restrict_at(
    model: &TightBindingModel,
    geom: &LatticeGeometry,
    axis: usize,
    seed: u64,
    mu: f64,
) -> Result<HalfSpaceHamiltonian> {
    if axis >= geom.d() || geom.boundary[axis].is_periodic() {
        return Err(Error::GeometryMismatch(format!("axis {axis} must be open")));
    }
    if (0..geom.d()).any(|j| j != axis && !geom.boundary[j].is_periodic()) {
        return Err(Error::GeometryMismatch("axes along the boundary must be periodic".into()));
    }
    let h = build_hamiltonian(model, geom, seed)?;
    let delta = bulk_gap_interval(model, mu)?;
    Ok(HalfSpaceHamiltonian { h, model: model.clone(), geom: geom.clone(), axis, delta, eigen: OnceLock::new() })
}

/// Bloch Hamiltonian of a clean ribbon `width` cells wide along `open_axis`,
/// at momentum `k` along the other axis of a `d = 2` model.
pub fn ribbon_hamiltonian(model: &TightBindingModel, width: usize, open_axis: usize, k: f64) -> Result<CMat> {
    ribbon_terms(model, width, open_axis, k, false)
}

/// `∂H(k)/∂k` of the ribbon.
pub fn ribbon_derivative(model: &TightBindingModel, width: usize, open_axis: usize, k: f64) -> Result<CMat> {
    ribbon_terms(model, width, open_axis, k, true)
}

fn ribbon_terms(model: &TightBindingModel, width: usize, open_axis: usize, k: f64, derivative: bool) -> Result<CMat> {
    if model.d != 2 || open_axis > 1 {
        return Err(Error::GeometryMismatch("ribbons need a d = 2 model".into()));
    }
    if !model.flux.is_zero() {
        return Err(Error::GeometryMismatch("ribbon Bloch form requires zero flux".into()));
    }
    let par = 1 - open_axis;
    let l = model.orbitals;
    let mut h = Mat::<C64>::zeros(width * l, width * l);
    let mut add = |r: usize, c: usize, m: &CMat, phase: C64| {
        for i in 0..l {
            for j in 0..l {
                h[(r * l + i, c * l + j)] += m[(i, j)] * phase;
            }
        }
    };
    for j in 0..width {
        if !derivative {
            add(j, j, &model.onsite, C64::new(1.0, 0.0));
        }
        for hop in &model.hoppings {
            let a = &hop.displacement;
            for (sign, m) in [(1i64, hop.matrix.clone()), (-1, small::adjoint(&hop.matrix))] {
                let (ao, ap) = (sign * a[open_axis], sign * a[par]);
                let t = j as i64 + ao;
                if !(0..width as i64).contains(&t) {
                    continue;
                }
                let mut phase = C64::from_polar(1.0, k * ap as f64);
                if derivative {
                    phase *= C64::new(0.0, ap as f64);
                }
                add(j, t as usize, &m, phase);
            }
        }
    }
    Ok(h)
}

/// Edge-resolved spectrum of a clean ribbon.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeSpectrum {
    pub ks: Vec<f64>,
    pub energies: Vec<Vec<f64>>,
    /// Weight of each eigenvector on the lower half.
    pub lower_weight: Vec<Vec<f64>>,
    /// Reference level the crossings are counted through.
    pub reference: f64,
    /// Signed crossings on the lower and upper edge; a branch moving down through the reference counts `+1`.
    pub crossings_lower: i64,
    pub crossings_upper: i64,
    /// Unsigned crossing counts per edge.
    pub total_lower: usize,
    pub total_upper: usize,
}

impl EdgeSpectrum {
    /// Kramers pairs crossing the lower edge (half the unsigned count).
    pub fn kramers_pairs_lower(&self) -> usize {
        self.total_lower / 2
    }

    pub fn kramers_pairs_upper(&self) -> usize {
        self.total_upper / 2
    }
}

/// Ribbon bands on `nk` momenta with chiral crossings through the gap center.
///
/// Consecutive momenta are matched by eigenvector overlap so that branches on
/// opposite edges crossing each other are told apart.
pub fn edge_spectrum(hs: &HalfSpaceHamiltonian, nk: usize) -> Result<EdgeSpectrum> {
    if !hs.gap_is_open() {
        return Err(Error::GapClosed { mu: 0.0, gap: 0.0 });
    }
    let width = hs.geom.extent[hs.axis];
    let (a, b) = hs.delta;
    // slightly off center so symmetric edge Dirac points do not sit on the level
    let reference = a + 0.55 * (b - a);
    let ks: Vec<f64> = (0..=nk).map(|i| -PI + 2.0 * PI * i as f64 / nk as f64).collect();
    let l = hs.model.orbitals;
    let lower: Vec<bool> = (0..width * l).map(|i| ((i / l) as i64) < (width as i64) / 2).collect();
    let eig: Vec<Eigh> =
        ks.par_iter().map(|&k| eigh_dense(&ribbon_hamiltonian(&hs.model, width, hs.axis, k)?)).collect::<Result<_>>()?;
    let weights: Vec<Vec<f64>> = eig
        .iter()
        .map(|e| {
            (0..e.values.len())
                .map(|c| (0..e.vectors.nrows()).filter(|&r| lower[r]).map(|r| e.vectors[(r, c)].norm_sqr()).sum())
                .collect()
        })
        .collect();
    let window = 0.45 * (b - a);
    let (mut cl, mut cu, mut tl, mut tu) = (0i64, 0i64, 0usize, 0usize);
    for s in 0..nk {
        let (e0, e1) = (&eig[s], &eig[s + 1]);
        let near0: Vec<usize> = (0..e0.values.len()).filter(|&i| (e0.values[i] - reference).abs() < window).collect();
        let near1: Vec<usize> = (0..e1.values.len()).filter(|&i| (e1.values[i] - reference).abs() < 2.0 * window).collect();
        let matches = match_states(&e0.vectors, &near0, &e1.vectors, &near1);
        for (i, j) in matches {
            let (ea, eb) = (e0.values[i], e1.values[j]);
            if (ea < reference) == (eb < reference) {
                continue;
            }
            let dir = if eb < reference { 1 } else { -1 };
            if 0.5 * (weights[s][i] + weights[s + 1][j]) > 0.5 {
                cl += dir;
                tl += 1;
            } else {
                cu += dir;
                tu += 1;
            }
        }
    }
    Ok(EdgeSpectrum {
        energies: eig.iter().map(|e| e.values.clone()).collect(),
        ks,
        lower_weight: weights,
        reference,
        crossings_lower: cl,
        crossings_upper: cu,
        total_lower: tl,
        total_upper: tu,
    })
}

/// Greedy maximal-overlap matching of `from` columns onto `to` columns.
pub(crate) fn match_states(va: &Mat<C64>, from: &[usize], vb: &Mat<C64>, to: &[usize]) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    let mut ov = Vec::new();
    for &i in from {
        for &j in to {
            let mut s = C64::new(0.0, 0.0);
            for r in 0..va.nrows() {
                s += va[(r, i)].conj() * vb[(r, j)];
            }
            ov.push((s.norm_sqr(), i, j));
        }
    }
    ov.sort_by(|x, y| y.0.total_cmp(&x.0));
    let (mut used_i, mut used_j) = (vec![], vec![]);
    for (_, i, j) in ov {
        if !used_i.contains(&i) && !used_j.contains(&j) {
            used_i.push(i);
            used_j.push(j);
            pairs.push((i, j));
        }
    }
    pairs
}

/// Admissible smoothed step for the exponential map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepShape {
    /// `ψ(t)/(ψ(t) + ψ(1−t))` with `ψ(t) = e^{−1/t}`, smooth to all orders.
    Smooth,
    /// `6t⁵ − 15t⁴ + 10t³`.
    Quintic,
}

/// Non-decreasing step from 0 to 1 across the central `fraction` of the gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpStep {
    pub shape: StepShape,
    pub fraction: f64,
}

impl Default for ExpStep {
    fn default() -> Self {
        ExpStep { shape: StepShape::Smooth, fraction: 0.8 }
    }
}

impl ExpStep {
    pub fn eval(&self, e: f64, delta: (f64, f64)) -> f64 {
        let (a, b) = delta;
        let margin = 0.5 * (1.0 - self.fraction) * (b - a);
        let (lo, hi) = (a + margin, b - margin);
        let t = ((e - lo) / (hi - lo)).clamp(0.0, 1.0);
        match self.shape {
            StepShape::Quintic => t * t * t * (10.0 - 15.0 * t + 6.0 * t * t),
            StepShape::Smooth => {
                let psi = |s: f64| if s <= 0.0 { 0.0 } else { (-1.0 / s).exp() };
                let (p, q) = (psi(t), psi(1.0 - t));
                p / (p + q)
            }
        }
    }
}

/// `U = exp(−2πi f(Ĥ))`.
pub fn exp_map_unitary(hs: &HalfSpaceHamiltonian, step: ExpStep) -> Result<OperatorMatrix> {
    if !hs.gap_is_open() {
        return Err(Error::GapClosed { mu: 0.5 * (hs.delta.0 + hs.delta.1), gap: 0.0 });
    }
    let e = hs.eigen()?;
    let u = apply_complex_function(e, |x| C64::from_polar(1.0, -2.0 * PI * step.eval(x, hs.delta)));
    OperatorMatrix::from_dense(u, MatrixKind::General)
}

/// Tolerance for the near-integer outputs of boundary pairings.
pub const INTEGER_TOL: f64 = 0.05;

/// Boundary-parallel coordinate differences, folded to the minimal image.
fn parallel_displacement(hs: &HalfSpaceHamiltonian) -> Result<(Vec<f64>, f64)> {
    let par = hs.parallel_axis().ok_or_else(|| Error::GeometryMismatch("strip needs a boundary-parallel axis".into()))?;
    let x = position_operators(&hs.geom).coords[par].clone();
    Ok((x, hs.geom.extent[par] as f64))
}

fn fold(d: f64, n: f64) -> f64 {
    (d + n / 2.0).rem_euclid(n) - n / 2.0
}

/// `−(1/N₁) Re Tr_lower(U†[X₁, U])`, unrounded.
pub fn boundary_winding_value(u: &OperatorMatrix, hs: &HalfSpaceHamiltonian) -> Result<f64> {
    let (x, n1) = parallel_displacement(hs)?;
    let ud = u.to_dense();
    let n = ud.nrows();
    let comm = Mat::from_fn(n, n, |i, j| ud[(i, j)] * fold(x[i] - x[j], n1));
    let lower = hs.lower_mask();
    let mut tr = C64::new(0.0, 0.0);
    for i in (0..n).filter(|&i| lower[i]) {
        for k in 0..n {
            tr += ud[(k, i)].conj() * comm[(k, i)];
        }
    }
    Ok(-tr.re / n1)
}

/// Boundary winding of the exponential-map unitary, rounded.
pub fn boundary_winding(u: &OperatorMatrix, hs: &HalfSpaceHamiltonian) -> Result<i64> {
    let v = boundary_winding_value(u, hs)?;
    round_checked(v, "boundary winding")
}

fn round_checked(v: f64, what: &str) -> Result<i64> {
    let r = v.round();
    if (v - r).abs() > INTEGER_TOL {
        return Err(Error::NonConvergent(format!("{what} {v:.4} is not within {INTEGER_TOL} of an integer")));
    }
    Ok(r as i64)
}

/// Non-negative bump of unit integral: `(1 − cos 2πt)/(hi − lo)` on `(lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub lo: f64,
    pub hi: f64,
}

impl Bump {
    pub fn new(lo: f64, hi: f64) -> Self {
        Bump { lo, hi }
    }

    /// Bump on the middle third of `delta`.
    pub fn middle_third(delta: (f64, f64)) -> Self {
        let w = (delta.1 - delta.0) / 3.0;
        Bump { lo: delta.0 + w, hi: delta.1 - w }
    }

    pub fn eval(&self, e: f64) -> f64 {
        let t = (e - self.lo) / (self.hi - self.lo);
        if t <= 0.0 || t >= 1.0 {
            0.0
        } else {
            (1.0 - (2.0 * PI * t).cos()) / (self.hi - self.lo)
        }
    }

    fn check_support(&self, delta: (f64, f64)) -> Result<()> {
        if self.lo < delta.0 || self.hi > delta.1 || self.lo >= self.hi {
            return Err(Error::SupportOutsideGap);
        }
        Ok(())
    }
}

/// `2π (1/N₁) Re Tr_lower(g(Ĥ) i[X₁, Ĥ])` on the strip itself.
pub fn edge_current(hs: &HalfSpaceHamiltonian, g: Bump) -> Result<f64> {
    g.check_support(hs.delta)?;
    let (x, n1) = parallel_displacement(hs)?;
    let gh = apply_function(hs.eigen()?, |e| g.eval(e));
    let n = gh.nrows();
    let mut j = Mat::<C64>::zeros(n, n);
    for (r, c, v) in hs.h.entries() {
        j[(r, c)] = C64::new(0.0, fold(x[r] - x[c], n1)) * v;
    }
    let lower = hs.lower_mask();
    let mut tr = C64::new(0.0, 0.0);
    for i in (0..n).filter(|&i| lower[i]) {
        for k in 0..n {
            tr += gh[(i, k)] * j[(k, i)];
        }
    }
    Ok(2.0 * PI * tr.re / n1)
}

/// Edge current of a clean ribbon with the boundary trace done in momentum space on `nk` points.
///
/// `i[X₁, Ĥ]` becomes `−∂ₖĤ(k)`, so this equals [`edge_current`] for a strip of length `nk`.
pub fn edge_current_k(hs: &HalfSpaceHamiltonian, g: Bump, nk: usize) -> Result<f64> {
    g.check_support(hs.delta)?;
    let width = hs.geom.extent[hs.axis];
    let l = hs.model.orbitals;
    let lower: Vec<bool> = (0..width * l).map(|i| ((i / l) as i64) < (width as i64) / 2).collect();
    let total: f64 = (0..nk)
        .into_par_iter()
        .map(|i| {
            let k = 2.0 * PI * i as f64 / nk as f64;
            let e = eigh_dense(&ribbon_hamiltonian(&hs.model, width, hs.axis, k)?)?;
            let gh = apply_function(&e, |x| g.eval(x));
            let dh = ribbon_derivative(&hs.model, width, hs.axis, k)?;
            let prod = &gh * &dh;
            Ok((0..prod.nrows()).filter(|&r| lower[r]).map(|r| -prod[(r, r)].re).sum::<f64>())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .sum();
    Ok(2.0 * PI * total / nk as f64)
}

/// Signed count of zero modes on the lower boundary, weighted by chirality.
pub fn chiral_boundary_index(hs: &HalfSpaceHamiltonian, zero_tol: f64) -> Result<i64> {
    let j = hs.model.symmetries.chiral.as_ref().ok_or(Error::NotChiral)?;
    grading_frames(j)?;
    let e = hs.eigen()?;
    let zero: Vec<usize> = (0..e.values.len()).filter(|&i| e.values[i].abs() < zero_tol).collect();
    if zero.is_empty() {
        return Ok(0);
    }
    let n = e.vectors.nrows();
    let z = Mat::from_fn(n, zero.len(), |r, c| e.vectors[(r, zero[c])]);
    let l = j.nrows();
    let jz = Mat::from_fn(n, zero.len(), |r, c| {
        let (cell, a) = (r / l, r % l);
        (0..l).map(|b| j[(a, b)] * z[(cell * l + b, c)]).sum::<C64>()
    });
    // diagonalize J inside the zero-energy subspace
    let inner = z.adjoint() * &jz;
    let ce = eigh_dense(&inner)?;
    let modes = &z * &ce.vectors;
    let lower = hs.lower_mask();
    let mut count = 0;
    for (c, &chi) in ce.values.iter().enumerate() {
        if chi.abs() < 0.9 {
            return Err(Error::AmbiguousChirality(chi));
        }
        let w: f64 = (0..n).filter(|&r| lower[r]).map(|r| modes[(r, c)].norm_sqr()).sum();
        if w > 0.5 {
            count += chi.signum() as i64;
        }
    }
    Ok(count)
}
