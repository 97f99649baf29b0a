//! Momentum-space invariants of periodic models.

mod classification;

pub use classification::{classification_lookup, GroupTag, SymmetryClass, TABLE};

use std::f64::consts::PI;

use faer::linalg::solvers::DenseSolveCore;
use faer::Mat;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{eigh_dense, log_det};
use crate::models::small::{self, CMat};
use crate::models::{bloch_hamiltonian, TightBindingModel};
use crate::C64;

/// The map `k ↦ H_k` of a clean periodic model on its magnetic unit cell.
#[derive(Debug, Clone)]
pub struct BlochMap {
    model: TightBindingModel,
    q: usize,
}

impl BlochMap {
    pub fn new(model: &TightBindingModel) -> Result<Self> {
        model.validate()?;
        let q = model.flux.denominator()?;
        Ok(BlochMap { model: model.clone(), q })
    }

    pub fn d(&self) -> usize {
        self.model.d
    }

    /// Matrix size `L′ = L·q`.
    pub fn size(&self) -> usize {
        self.model.orbitals * self.q
    }

    pub fn flux_denominator(&self) -> usize {
        self.q
    }

    pub fn model(&self) -> &TightBindingModel {
        &self.model
    }

    pub fn eval(&self, k: &[f64]) -> CMat {
        bloch_hamiltonian(&self.model, k).expect("validated on construction")
    }

    /// Chiral grading on the magnetic cell, if declared.
    fn chiral(&self) -> Option<CMat> {
        self.model.symmetries.chiral.as_ref().map(|j| small::kron(&small::eye(self.q), j))
    }

    /// Same map composed with a fixed unitary `W`: `k ↦ W H_k W*`.
    pub fn conjugate_by(&self, w: &CMat) -> Result<Self> {
        let mut m = self.model.clone();
        if self.q != 1 {
            return Err(Error::DimensionMismatch("conjugation needs a zero-flux model".into()));
        }
        let wa = small::adjoint(w);
        m.onsite = w * &m.onsite * &wa;
        for h in &mut m.hoppings {
            h.matrix = w * &h.matrix * &wa;
        }
        m.symmetries = Default::default();
        BlochMap::new(&m)
    }
}

fn grid(nk: usize) -> Vec<f64> {
    (0..nk).map(|i| 2.0 * PI * i as f64 / nk as f64).collect()
}

/// Point in the zone with momenta `(ka, kb)` on `axes` and zero elsewhere.
fn point(d: usize, axes: (usize, usize), ka: f64, kb: f64) -> Vec<f64> {
    let mut k = vec![0.0; d];
    k[axes.0] = ka;
    k[axes.1] = kb;
    k
}

/// Lattice field-strength sum `(1/2π) Σ arg(U₁U₂U₃U₄)` over an `nk × nk` plaquette grid.
pub fn fhs_field_strength(bloch: &BlochMap, mu: f64, axes: (usize, usize), nk: usize) -> Result<f64> {
    let ks = grid(nk);
    let d = bloch.d();
    let frames: Vec<Result<(Mat<C64>, f64)>> = (0..nk * nk)
        .into_par_iter()
        .map(|idx| {
            let (a, b) = (idx / nk, idx % nk);
            let e = eigh_dense(&bloch.eval(&point(d, axes, ks[a], ks[b])))?;
            let gap = e.values.iter().fold(f64::INFINITY, |g, &x| g.min((x - mu).abs()));
            let occ: Vec<usize> = (0..e.values.len()).filter(|&i| e.values[i] <= mu).collect();
            Ok((Mat::from_fn(e.values.len(), occ.len(), |i, j| e.vectors[(i, occ[j])]), gap))
        })
        .collect();
    let mut vs = Vec::with_capacity(nk * nk);
    let mut min_gap = f64::INFINITY;
    for f in frames {
        let (v, g) = f?;
        min_gap = min_gap.min(g);
        vs.push(v);
    }
    if !(min_gap > 1e-8) {
        return Err(Error::GapClosedOnGrid { min_gap });
    }
    let n_occ = vs[0].ncols();
    if vs.iter().any(|v| v.ncols() != n_occ) {
        return Err(Error::GapClosedOnGrid { min_gap: 0.0 });
    }
    if n_occ == 0 {
        return Ok(0.0);
    }
    let link = |p: usize, q: usize| -> C64 {
        let m = vs[p].adjoint() * &vs[q];
        let ld = log_det(&m);
        ld.phase
    };
    let at = |a: usize, b: usize| (a % nk) * nk + (b % nk);
    let rows: Vec<f64> = (0..nk)
        .into_par_iter()
        .map(|a| {
            let mut s = 0.0;
            for b in 0..nk {
                let u1 = link(at(a, b), at(a + 1, b));
                let u2 = link(at(a + 1, b), at(a + 1, b + 1));
                let u3 = link(at(a + 1, b + 1), at(a, b + 1));
                let u4 = link(at(a, b + 1), at(a, b));
                s += (u1 * u2 * u3 * u4).arg();
            }
            s
        })
        .collect();
    Ok(rows.iter().sum::<f64>() / (2.0 * PI))
}

fn round_checked(x: f64, what: &str) -> Result<i64> {
    let r = x.round();
    if (x - r).abs() > 1e-6 {
        return Err(Error::NonConvergent(format!("{what} = {x} is not an integer")));
    }
    Ok(r as i64)
}

/// Chern number of the Fermi projection below `mu` in the plane of `axes`.
///
/// Orientation: the value equals the flux-insertion spectral flow and the
/// localizer half-signature of this crate, which is minus the plain
/// plaquette sum for `H_k = Σ T_a e^{ik·a}`. Swapping `axes` flips the sign.
/// The grid is doubled once and both results must agree.
pub fn chern_number(bloch: &BlochMap, mu: f64, axes: (usize, usize), nk: usize) -> Result<i64> {
    if axes.0 == axes.1 || axes.0 >= bloch.d() || axes.1 >= bloch.d() {
        return Err(Error::UnsupportedDimension(bloch.d()));
    }
    let c1 = round_checked(-fhs_field_strength(bloch, mu, axes, nk)?, "chern")?;
    let c2 = round_checked(-fhs_field_strength(bloch, mu, axes, 2 * nk)?, "chern")?;
    if c1 != c2 {
        return Err(Error::NonConvergent(format!("chern changed {c1} -> {c2} under grid doubling")));
    }
    Ok(c1)
}

/// Orthonormal bases of the `±1` eigenspaces of a grading.
pub(crate) fn grading_frames(j: &CMat) -> Result<(Mat<C64>, Mat<C64>)> {
    let e = eigh_dense(j)?;
    let n = e.values.len();
    let plus: Vec<usize> = (0..n).filter(|&i| e.values[i] > 0.0).collect();
    let minus: Vec<usize> = (0..n).filter(|&i| e.values[i] < 0.0).collect();
    if plus.len() != minus.len() {
        return Err(Error::NotChiral);
    }
    Ok((
        Mat::from_fn(n, plus.len(), |i, c| e.vectors[(i, plus[c])]),
        Mat::from_fn(n, minus.len(), |i, c| e.vectors[(i, minus[c])]),
    ))
}

/// Off-diagonal block `A(k) = ⟨−|H_k|+⟩` of a chiral Bloch map.
pub fn chiral_block(bloch: &BlochMap, k: &[f64]) -> Result<CMat> {
    let j = bloch.chiral().ok_or(Error::NotChiral)?;
    let (vp, vm) = grading_frames(&j)?;
    let hk = bloch.eval(k);
    let defect = small::max_abs(&(&j * &hk * &j + &hk));
    if defect > 1e-10 * small::max_abs(&hk).max(1.0) {
        return Err(Error::NotChiral);
    }
    Ok(vm.adjoint() * &hk * &vp)
}

fn min_singular(a: &CMat) -> f64 {
    a.singular_values().map(|s| s.last().copied().unwrap_or(0.0)).unwrap_or(0.0)
}

/// Winding of `det A(k)` along `axis`, by phase accumulation.
fn winding_sum(bloch: &BlochMap, axis: usize, nk: usize) -> Result<f64> {
    let d = bloch.d();
    let mut phases = Vec::with_capacity(nk);
    for &ka in &grid(nk) {
        let mut k = vec![0.0; d];
        k[axis] = ka;
        let a = chiral_block(bloch, &k)?;
        let s = min_singular(&a);
        if !(s > 1e-8) {
            return Err(Error::SingularOffDiagonal(s));
        }
        phases.push(log_det(&a).phase);
    }
    let mut total = 0.0;
    for i in 0..nk {
        total += (phases[(i + 1) % nk] / phases[i]).arg();
    }
    Ok(total / (2.0 * PI))
}

/// Odd Chern number with `|I| = 1`: `(1/2πi)∮ tr(A⁻¹∂A) dk` along `axis`.
pub fn winding_number(bloch: &BlochMap, axis: usize, nk: usize) -> Result<i64> {
    if axis >= bloch.d() {
        return Err(Error::UnsupportedDimension(bloch.d()));
    }
    let w1 = round_checked(winding_sum(bloch, axis, nk)?, "winding")?;
    let w2 = round_checked(winding_sum(bloch, axis, 2 * nk)?, "winding")?;
    if w1 != w2 {
        return Err(Error::NonConvergent(format!("winding changed {w1} -> {w2} under grid doubling")));
    }
    Ok(w1)
}

/// Exact derivative `∂H_k/∂k_j` of the Fourier sum.
fn bloch_derivative(model: &TightBindingModel, k: &[f64], j: usize) -> CMat {
    let l = model.orbitals;
    let mut out = small::zeros(l);
    for h in &model.hoppings {
        let arg: f64 = k.iter().zip(&h.displacement).map(|(kk, &a)| kk * a as f64).sum();
        let f = C64::new(0.0, h.displacement[j] as f64) * C64::from_polar(1.0, arg);
        for r in 0..l {
            for c in 0..l {
                out[(r, c)] += h.matrix[(r, c)] * f;
                out[(c, r)] += (h.matrix[(r, c)] * f).conj();
            }
        }
    }
    out
}

/// Riemann sum of the three-dimensional winding density on an `nk³` grid.
fn winding_3d_sum(bloch: &BlochMap, nk: usize) -> Result<f64> {
    let j = bloch.chiral().ok_or(Error::NotChiral)?;
    if bloch.d() != 3 || bloch.flux_denominator() != 1 {
        return Err(Error::UnsupportedDimension(bloch.d()));
    }
    let (vp, vm) = grading_frames(&j)?;
    let ks = grid(nk);
    let model = bloch.model();
    let slabs: Vec<Result<f64>> = (0..nk)
        .into_par_iter()
        .map(|a| {
            let mut s = 0.0;
            for &kb in &ks {
                for &kc in &ks {
                    let k = [ks[a], kb, kc];
                    let block = |m: &CMat| vm.adjoint() * m * &vp;
                    let amat = block(&bloch.eval(&k));
                    let sv = min_singular(&amat);
                    if !(sv > 1e-8) {
                        return Err(Error::SingularOffDiagonal(sv));
                    }
                    let inv = amat.partial_piv_lu().inverse();
                    let g: Vec<CMat> = (0..3).map(|i| &inv * block(&bloch_derivative(model, &k, i))).collect();
                    let mut acc = C64::new(0.0, 0.0);
                    for (p, q, r, sign) in [(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0), (0, 2, 1, -1.0), (2, 1, 0, -1.0), (1, 0, 2, -1.0)] {
                        let t = &g[p] * &g[q] * &g[r];
                        let tr: C64 = (0..t.nrows()).map(|i| t[(i, i)]).sum();
                        acc += tr * sign;
                    }
                    s += acc.re;
                }
            }
            Ok(s)
        })
        .collect();
    let mut total = 0.0;
    for s in slabs {
        total += s?;
    }
    // (1/24π²) ∫ ε tr[(A⁻¹∂A)³] d³k
    let dk3 = (2.0 * PI / nk as f64).powi(3);
    Ok(total * dk3 / (24.0 * PI * PI))
}

/// Strong odd Chern number in `d = 3` (three-dimensional winding number).
pub fn winding_number_3d(bloch: &BlochMap, nk: usize) -> Result<i64> {
    let w1 = winding_3d_sum(bloch, nk)?;
    let w2 = winding_3d_sum(bloch, 2 * nk)?;
    let (r1, r2) = (w1.round(), w2.round());
    if (w1 - r1).abs() > 0.05 || (w2 - r2).abs() > 0.05 || r1 != r2 {
        return Err(Error::NonConvergent(format!("3d winding {w1:.4} / {w2:.4}")));
    }
    Ok(r2 as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{self, haldane_benchmark, small::pauli, TightBindingModel};

    fn flat_sigma3() -> BlochMap {
        BlochMap::new(&TightBindingModel::new("flat", 2, pauli(3))).unwrap()
    }

    #[test]
    fn flat_band_is_trivial() {
        assert_eq!(chern_number(&flat_sigma3(), 0.0, (0, 1), 8).unwrap(), 0);
    }

    #[test]
    fn haldane_phases() {
        let top = BlochMap::new(&haldane_benchmark(0.0)).unwrap();
        assert_eq!(chern_number(&top, 0.0, (0, 1), 24).unwrap(), -1);
        assert_eq!(chern_number(&top, 0.0, (1, 0), 24).unwrap(), 1);
        let triv = BlochMap::new(&haldane_benchmark(2.0)).unwrap();
        assert_eq!(chern_number(&triv, 0.0, (0, 1), 24).unwrap(), 0);
        let conj = BlochMap::new(&haldane_benchmark(0.0).conjugated()).unwrap();
        assert_eq!(chern_number(&conj, 0.0, (0, 1), 24).unwrap(), 1);
    }

    #[test]
    fn all_bands_sum_to_zero() {
        let top = BlochMap::new(&haldane_benchmark(0.0)).unwrap();
        assert_eq!(chern_number(&top, 10.0, (0, 1), 12).unwrap(), 0);
    }

    #[test]
    fn harper_lowest_gap() {
        let b = BlochMap::new(&models::harper(1.0 / 3.0, 1.0)).unwrap();
        assert_eq!(b.size(), 3);
        let ch = chern_number(&b, -1.5, (0, 1), 30).unwrap();
        assert_eq!(ch.abs(), 1);
    }

    #[test]
    fn gap_closing_is_refused() {
        let crit = BlochMap::new(&models::haldane(1.0, 0.0, 0.0, 0.0)).unwrap();
        // graphene Dirac points sit on grids with nk divisible by 3
        assert!(matches!(chern_number(&crit, 0.0, (0, 1), 12), Err(Error::GapClosedOnGrid { .. })));
    }

    #[test]
    fn invariant_under_fixed_unitary() {
        let top = BlochMap::new(&haldane_benchmark(0.3)).unwrap();
        let w = crate::models::small::from_rows(&[
            &[C64::new(0.6, 0.0), C64::new(0.0, 0.8)],
            &[C64::new(0.0, 0.8), C64::new(0.6, 0.0)],
        ]);
        let rotated = top.conjugate_by(&w).unwrap();
        assert_eq!(chern_number(&rotated, 0.0, (0, 1), 18).unwrap(), chern_number(&top, 0.0, (0, 1), 18).unwrap());
    }

    #[test]
    fn ssh_windings() {
        let b = |v, w| BlochMap::new(&models::ssh(v, w, 0.0)).unwrap();
        assert_eq!(winding_number(&b(2.0, 1.0), 0, 16).unwrap(), 0);
        assert_eq!(winding_number(&b(1.0, 2.0), 0, 16).unwrap(), 1);
        let two = BlochMap::new(&models::ssh(0.2, 0.3, 1.0)).unwrap();
        assert_eq!(winding_number(&two, 0, 32).unwrap(), 2);
        assert!(matches!(winding_number(&b(1.0, 1.0), 0, 16), Err(Error::SingularOffDiagonal(_))));
        assert!(matches!(winding_number(&flat_sigma3(), 0, 8), Err(Error::NotChiral)));
    }

    #[test]
    fn reversed_parametrization_flips_winding() {
        let m = models::ssh(1.0, 2.0, 0.0);
        let mut rev = m.clone();
        for h in &mut rev.hoppings {
            h.displacement = h.displacement.iter().map(|x| -x).collect();
        }
        let w = winding_number(&BlochMap::new(&m).unwrap(), 0, 16).unwrap();
        let wr = winding_number(&BlochMap::new(&rev).unwrap(), 0, 16).unwrap();
        assert_eq!(w, -wr);
    }

    #[test]
    fn winding_3d_examples() {
        let triv = BlochMap::new(&models::chiral_3d(5.0)).unwrap();
        assert_eq!(winding_number_3d(&triv, 8).unwrap(), 0);
        let top = BlochMap::new(&models::chiral_3d(2.0)).unwrap();
        let w = winding_number_3d(&top, 12).unwrap();
        assert_eq!(w.abs(), 1);
        let conj = BlochMap::new(&models::chiral_3d(2.0).conjugated()).unwrap();
        assert_eq!(winding_number_3d(&conj, 12).unwrap(), -w);
    }
}
