//! The spectral localizer and its signature, Pfaffian and determinant invariants.
//!
//! All localizers are assembled with the Clifford (spinor) index outermost and
//! `lattice ⊗ internal` inside, so truncation acts on whole cells. Callers are
//! expected to pass Hamiltonians of open samples; hoppings across a periodic
//! seam would be weighted by the full sample width.

use std::collections::HashMap;

use faer::Mat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    default_pfaffian_tol, default_zero_tol, eigh_dense, gap_of, hermitian_eigvals, ldl_inertia, log_det, norm_2_dense,
    pfaffian_sign, Inertia, MatrixKind, OperatorMatrix,
};
use crate::models::small::{self, CMat};
use crate::models::{PositionOperators, Symmetries};
use crate::C64;

/// Constant in the tuning bound `κ ≤ g³ / (12 ‖H‖ ‖[D, H]‖)`.
pub const TUNING_CONSTANT: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Even,
    Odd,
    SkewD2Trs,
    DetD3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Ball,
    #[default]
    Square,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizerSpec {
    pub variant: Variant,
    pub kappa: f64,
    pub rho: f64,
    #[serde(default)]
    pub shape: Shape,
    /// Localizer center; empty means the origin.
    #[serde(default)]
    pub center: Vec<f64>,
}

impl LocalizerSpec {
    pub fn new(variant: Variant, kappa: f64, rho: f64) -> Result<Self> {
        if !(kappa > 0.0 && rho > 0.0) {
            return Err(Error::IncompatibleVariant(format!("kappa {kappa} and rho {rho} must be positive")));
        }
        Ok(LocalizerSpec { variant, kappa, rho, shape: Shape::Square, center: vec![] })
    }

    pub fn with_shape(mut self, shape: Shape) -> Self {
        self.shape = shape;
        self
    }

    pub fn with_center(mut self, center: Vec<f64>) -> Self {
        self.center = center;
        self
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn with_rho(mut self, rho: f64) -> Self {
        self.rho = rho;
        self
    }

    fn center_of(&self, d: usize) -> Vec<f64> {
        if self.center.is_empty() {
            vec![0.0; d]
        } else {
            self.center.clone()
        }
    }

    /// Checks that the variant fits the dimension and declared symmetries.
    pub fn check_compatible(&self, d: usize, sym: &Symmetries) -> Result<()> {
        if !(self.kappa > 0.0 && self.rho > 0.0) {
            return Err(Error::IncompatibleVariant("kappa and rho must be positive".into()));
        }
        if !self.center.is_empty() && self.center.len() != d {
            return Err(Error::IncompatibleVariant(format!("center has {} components for d={d}", self.center.len())));
        }
        let odd_trs = sym.trs.as_ref().is_some_and(|t| t.sign == -1);
        let ok = match self.variant {
            Variant::Even => d == 2,
            Variant::Odd => d % 2 == 1 && sym.chiral.is_some(),
            Variant::SkewD2Trs => d == 2 && odd_trs,
            Variant::DetD3 => d == 3 && odd_trs,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::IncompatibleVariant(format!("{:?} in d={d}", self.variant)))
        }
    }
}

/// Result of the tuning check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tuning {
    pub tuning_ok: bool,
    pub kappa_bound: f64,
    pub rho_bound: f64,
    /// Spectral gap of `H` at zero.
    pub gap: f64,
    pub h_norm: f64,
    pub commutator_norm: f64,
}

impl Tuning {
    /// Certificate of a Hamiltonian without a gap at zero; never tuned.
    pub fn ungapped() -> Self {
        Tuning {
            tuning_ok: false,
            kappa_bound: 0.0,
            rho_bound: f64::INFINITY,
            gap: 0.0,
            h_norm: 0.0,
            commutator_norm: 0.0,
        }
    }
}

/// Coordinate differences folded to the minimal image of the sample span.
///
/// On an open sample every hopping is far shorter than half the span, so this
/// only changes entries that cross a periodic seam.
fn displacement(x: &[f64], i: usize, j: usize, span: f64) -> f64 {
    let d = x[i] - x[j];
    if d > span / 2.0 {
        d - span
    } else if d < -span / 2.0 {
        d + span
    } else {
        d
    }
}

fn span(x: &[f64]) -> f64 {
    let (lo, hi) = x.iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
    hi - lo + 1.0
}

/// `‖[X_a, H]‖`, from the spectrum of the hermitian `i[X_a, H]`.
pub fn axis_commutator_norm(h: &OperatorMatrix, x: &PositionOperators, axis: usize) -> Result<f64> {
    let c = &x.coords[axis];
    let sp = span(c);
    let trip = h.entries().map(|(i, j, v)| (i, j, v * C64::new(0.0, displacement(c, i, j, sp)))).collect();
    let m = OperatorMatrix::from_triplets(h.dim(), MatrixKind::Hermitian, trip)?;
    Ok(hermitian_eigvals(&m)?.iter().fold(0.0, |a, v| a.max(v.abs())))
}

/// `‖[X1 + iX2, H]‖` for `d = 2`, otherwise `max_j ‖[X_j, H]‖`.
pub fn position_commutator_norm(h: &OperatorMatrix, x: &PositionOperators) -> Result<f64> {
    if x.d() != 2 {
        return (0..x.d()).map(|a| axis_commutator_norm(h, x, a)).try_fold(0.0f64, |m, v| v.map(|v| m.max(v)));
    }
    let n = h.dim();
    let (s0, s1) = (span(&x.coords[0]), span(&x.coords[1]));
    let mut m = Mat::<C64>::zeros(n, n);
    for (i, j, v) in h.entries() {
        m[(i, j)] = v * C64::new(displacement(&x.coords[0], i, j, s0), displacement(&x.coords[1], i, j, s1));
    }
    Ok(norm_2_dense(&m))
}

/// Tuning certificate for `(κ, ρ)`.
pub fn check_tuning(h: &OperatorMatrix, x: &PositionOperators, kappa: f64, rho: f64) -> Result<Tuning> {
    let ev = hermitian_eigvals(h)?;
    let gap = gap_of(&ev, 0.0);
    let h_norm = ev.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if gap <= 1e-12 * h_norm.max(1.0) {
        return Err(Error::NoGap);
    }
    let commutator_norm = position_commutator_norm(h, x)?;
    Ok(tuning_from_norms(gap, h_norm, commutator_norm, kappa, rho))
}

/// The tuning inequalities from precomputed norms.
pub fn tuning_from_norms(gap: f64, h_norm: f64, commutator_norm: f64, kappa: f64, rho: f64) -> Tuning {
    let kappa_bound = if commutator_norm == 0.0 {
        f64::INFINITY
    } else {
        gap.powi(3) / (TUNING_CONSTANT * h_norm * commutator_norm)
    };
    let rho_bound = 2.0 * gap / kappa;
    Tuning { tuning_ok: kappa <= kappa_bound && rho >= rho_bound, kappa_bound, rho_bound, gap, h_norm, commutator_norm }
}

/// Hilbert indices inside the truncation, with positions relative to the center.
pub fn truncation(x: &PositionOperators, spec: &LocalizerSpec) -> Result<(Vec<usize>, PositionOperators)> {
    let c = spec.center_of(x.d());
    let rel = x.shifted(&c.iter().map(|v| -v).collect::<Vec<_>>());
    let keep: Vec<usize> = (0..x.dim())
        .filter(|&i| match spec.shape {
            Shape::Ball => rel.coords.iter().map(|a| a[i] * a[i]).sum::<f64>() <= spec.rho * spec.rho,
            Shape::Square => rel.coords.iter().all(|a| a[i].abs() <= spec.rho),
        })
        .collect();
    if keep.is_empty() {
        return Err(Error::EmptyTruncation);
    }
    let rel = rel.restrict(&keep);
    Ok((keep, rel))
}

/// Assembles `Σ_s σ ⊗ block` from per-spinor-block triplets.
fn spinor_blocks(n: usize, m: usize, blocks: &[((usize, usize), Vec<(usize, usize, C64)>)], kind: MatrixKind) -> Result<OperatorMatrix> {
    let mut trip = Vec::new();
    for ((a, b), t) in blocks {
        trip.extend(t.iter().map(|&(i, j, v)| (a * n + i, b * n + j, v)));
    }
    OperatorMatrix::from_triplets(m * n, kind, trip)
}

fn scaled(t: &[(usize, usize, C64)], s: C64) -> Vec<(usize, usize, C64)> {
    t.iter().map(|&(i, j, v)| (i, j, v * s)).collect()
}

fn diag_trip(x: &[f64], s: f64) -> Vec<(usize, usize, C64)> {
    x.iter().enumerate().filter(|(_, &v)| v != 0.0).map(|(i, &v)| (i, i, C64::new(s * v, 0.0))).collect()
}

/// Even localizer `κ(X1−x1)⊗σ1 + κ(X2−x2)⊗σ2 − H⊗σ3` on the truncation.
pub fn even_localizer(h: &OperatorMatrix, x: &PositionOperators, spec: &LocalizerSpec) -> Result<OperatorMatrix> {
    if x.d() != 2 {
        return Err(Error::UnsupportedDimension(x.d()));
    }
    let (keep, rel) = truncation(x, spec)?;
    let ht: Vec<_> = h.restrict(&keep)?.entries().collect();
    let n = keep.len();
    let k = spec.kappa;
    let x1 = diag_trip(&rel.coords[0], k);
    let x2 = diag_trip(&rel.coords[1], k);
    // κX1σ1 + κX2σ2 = [[0, κ(X1 − iX2)], [κ(X1 + iX2), 0]]
    let mut upper = x1.clone();
    upper.extend(scaled(&x2, C64::new(0.0, -1.0)));
    let mut lower = x1;
    lower.extend(scaled(&x2, C64::new(0.0, 1.0)));
    let blocks = vec![
        ((0, 0), scaled(&ht, C64::new(-1.0, 0.0))),
        ((1, 1), ht),
        ((0, 1), upper),
        ((1, 0), lower),
    ];
    spinor_blocks(n, 2, &blocks, MatrixKind::Hermitian)
}

/// Lifts a per-cell matrix to the block-diagonal operator on `keep`.
fn cell_operator(local: &CMat, keep: &[usize]) -> Vec<(usize, usize, C64)> {
    let l = local.nrows();
    let mut trip = Vec::new();
    let mut pos: HashMap<usize, usize> = HashMap::new();
    for (r, &i) in keep.iter().enumerate() {
        pos.insert(i, r);
    }
    for (r, &i) in keep.iter().enumerate() {
        let (cell, a) = (i / l, i % l);
        for b in 0..l {
            let v = local[(a, b)];
            if v != C64::new(0.0, 0.0) {
                let c = *pos.get(&(cell * l + b)).expect("truncation keeps whole cells");
                trip.push((r, c, v));
            }
        }
    }
    trip
}

/// Odd localizer `κ Σ_j (X_j − x_j)γ_j ⊗ J + H` on the truncation.
///
/// For `d = 1` the Clifford factor is trivial and the result lives on `lattice ⊗ internal`.
pub fn odd_localizer(h: &OperatorMatrix, chiral: &CMat, x: &PositionOperators, spec: &LocalizerSpec) -> Result<OperatorMatrix> {
    let d = x.d();
    if d % 2 == 0 {
        return Err(Error::UnsupportedDimension(d));
    }
    let (keep, rel) = truncation(x, spec)?;
    let hr = h.restrict(&keep)?;
    let jt = cell_operator(chiral, &keep);
    let jd = OperatorMatrix::from_triplets(keep.len(), MatrixKind::Hermitian, jt.clone())?;
    let defect = chiral_defect(&hr, &jd);
    if defect > 1e-10 * hr.max_abs_entry().max(1.0) {
        return Err(Error::NotChiral);
    }
    let n = keep.len();
    let k = spec.kappa;
    let xj = |a: usize| -> Vec<(usize, usize, C64)> { jt.iter().map(|&(i, j, v)| (i, j, v * k * rel.coords[a][i])).collect() };
    let ht: Vec<_> = hr.entries().collect();
    if d == 1 {
        let mut t = xj(0);
        t.extend(ht);
        return OperatorMatrix::from_triplets(n, MatrixKind::Hermitian, t);
    }
    let (x1, x2, x3) = (xj(0), xj(1), xj(2));
    let mut b00 = x3.clone();
    b00.extend(ht.iter().copied());
    let mut b11 = scaled(&x3, C64::new(-1.0, 0.0));
    b11.extend(ht.iter().copied());
    let mut b01 = x1.clone();
    b01.extend(scaled(&x2, C64::new(0.0, -1.0)));
    let mut b10 = x1;
    b10.extend(scaled(&x2, C64::new(0.0, 1.0)));
    spinor_blocks(n, 2, &[((0, 0), b00), ((1, 1), b11), ((0, 1), b01), ((1, 0), b10)], MatrixKind::Hermitian)
}

fn chiral_defect(h: &OperatorMatrix, j: &OperatorMatrix) -> f64 {
    let (hd, jd) = (h.to_dense(), j.to_dense());
    let m = &jd * &hd * &jd + &hd;
    let mut worst: f64 = 0.0;
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            worst = worst.max(m[(r, c)].norm());
        }
    }
    worst
}

/// Sign relating the odd half-signature to the winding number.
///
/// In `d = 1` the half-signature of `κXJ + H` counts the winding with the
/// opposite orientation; in `d = 3` with `γ = (σ1, σ2, σ3)` they agree.
pub fn odd_orientation(d: usize) -> i64 {
    if d == 1 {
        -1
    } else {
        1
    }
}

/// How a signature was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignatureMethod {
    Ldl,
    /// Dense eigendecomposition after a pivot-growth breakdown.
    EighFallback,
}

/// Inertia by `LDLᵀ`, falling back to dense eigenvalues on pivot breakdown.
pub fn localizer_inertia(l: &OperatorMatrix, zero_tol: f64) -> Result<(Inertia, SignatureMethod)> {
    match ldl_inertia(l, zero_tol) {
        Ok(i) => Ok((i, SignatureMethod::Ldl)),
        Err(Error::IndefinitePivotBreakdown { .. }) => {
            let ev = hermitian_eigvals(l)?;
            Ok((Inertia::from_eigenvalues(&ev, zero_tol), SignatureMethod::EighFallback))
        }
        Err(e) => Err(e),
    }
}

/// `(n₊ − n₋)/2` of a nonsingular hermitian matrix.
pub fn half_signature(l: &OperatorMatrix, zero_tol: f64) -> Result<i64> {
    half_signature_with_method(l, zero_tol).map(|(s, _)| s)
}

pub fn half_signature_with_method(l: &OperatorMatrix, zero_tol: f64) -> Result<(i64, SignatureMethod)> {
    let (inertia, method) = localizer_inertia(l, zero_tol)?;
    if inertia.n_zero > 0 {
        return Err(Error::SingularLocalizer { n_zero: inertia.n_zero });
    }
    let sig = inertia.signature();
    if sig % 2 != 0 {
        return Err(Error::OddSignature(sig));
    }
    Ok((sig / 2, method))
}

/// Nonzero `l × l` cell blocks of an operator.
fn cell_blocks(h: &OperatorMatrix, l: usize) -> HashMap<(usize, usize), CMat> {
    let mut blocks: HashMap<(usize, usize), CMat> = HashMap::new();
    for (i, k, v) in h.entries() {
        blocks.entry((i / l, k / l)).or_insert_with(|| small::zeros(l))[(i % l, k % l)] = v;
    }
    blocks
}

/// Checks `I` real orthogonal with `I² = −1` and `IᵀH̄I = H` blockwise.
fn check_odd_trs(h: &OperatorMatrix, trs: &CMat) -> Result<()> {
    let l = trs.nrows();
    if !small::is_real(trs) {
        return Err(Error::SymmetryViolation("time reversal matrix is not real".into()));
    }
    let sq = trs * trs + small::eye(l);
    let orth = small::adjoint(trs) * trs - small::eye(l);
    if small::max_abs(&sq) > 1e-12 || small::max_abs(&orth) > 1e-12 {
        return Err(Error::SymmetryViolation("time reversal matrix must be orthogonal with square −1".into()));
    }
    let tol = 1e-10 * h.max_abs_entry().max(1.0);
    for blk in cell_blocks(h, l).values() {
        let t = small::adjoint(trs) * small::conj(blk) * trs;
        if small::max_abs(&(&t - blk)) > tol {
            return Err(Error::SymmetryViolation("Hamiltonian breaks the odd time reversal".into()));
        }
    }
    Ok(())
}

/// Real skew localizer for `d = 2` with odd time reversal `I`.
///
/// `[[Im H + κX1 I, Re H + κX2 I], [−Re H + κX2 I, Im H − κX1 I]]`, returned
/// together with the size of its `lattice ⊗ internal` factor.
pub fn skew_localizer(h: &OperatorMatrix, trs: &CMat, x: &PositionOperators, spec: &LocalizerSpec) -> Result<(OperatorMatrix, usize)> {
    if x.d() != 2 {
        return Err(Error::UnsupportedDimension(x.d()));
    }
    check_odd_trs(h, trs)?;
    let (keep, rel) = truncation(x, spec)?;
    let hr = h.restrict(&keep)?;
    let n = keep.len();
    let it = cell_operator(trs, &keep);
    let k = spec.kappa;
    let xi = |a: usize, s: f64| -> Vec<(usize, usize, C64)> {
        it.iter().map(|&(i, j, v)| (i, j, C64::new(s * k * rel.coords[a][i] * v.re, 0.0))).collect()
    };
    let im: Vec<_> = hr.entries().map(|(i, j, v)| (i, j, C64::new(v.im, 0.0))).collect();
    let re: Vec<_> = hr.entries().map(|(i, j, v)| (i, j, C64::new(v.re, 0.0))).collect();
    let cat = |mut a: Vec<(usize, usize, C64)>, b: Vec<(usize, usize, C64)>| {
        a.extend(b);
        a
    };
    let blocks = vec![
        ((0, 0), cat(im.clone(), xi(0, 1.0))),
        ((0, 1), cat(re.clone(), xi(1, 1.0))),
        ((1, 0), cat(scaled(&re, C64::new(-1.0, 0.0)), xi(1, 1.0))),
        ((1, 1), cat(im, xi(0, -1.0))),
    ];
    Ok((spinor_blocks(n, 2, &blocks, MatrixKind::RealSkew)?, n))
}

/// `sgn Pf` of the skew localizer, normalized by `(−1)^{n/2}` so the atomic limit gives `+1`.
pub fn skew_localizer_z2_d2(h: &OperatorMatrix, trs: &CMat, x: &PositionOperators, spec: &LocalizerSpec) -> Result<i8> {
    let (s, n) = skew_localizer(h, trs, x, spec)?;
    let pf = pfaffian_sign(&s, default_pfaffian_tol(&s))?;
    let norm = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
    Ok((pf * norm) as i8)
}

/// `ıκD + H ⊗ 1₂` with `D = Σ (X_j − x_j) σ_j`, lattice index slow.
pub fn det_localizer(h: &OperatorMatrix, x: &PositionOperators, spec: &LocalizerSpec) -> Result<Mat<C64>> {
    if x.d() != 3 {
        return Err(Error::UnsupportedDimension(x.d()));
    }
    let (keep, rel) = truncation(x, spec)?;
    let hr = h.restrict(&keep)?;
    let n = keep.len();
    let mut m = Mat::<C64>::zeros(2 * n, 2 * n);
    for (i, j, v) in hr.entries() {
        m[(2 * i, 2 * j)] += v;
        m[(2 * i + 1, 2 * j + 1)] += v;
    }
    let sig = [small::pauli(1), small::pauli(2), small::pauli(3)];
    let ik = C64::new(0.0, spec.kappa);
    for s in 0..n {
        for (a, g) in sig.iter().enumerate() {
            let xv = rel.coords[a][s];
            for p in 0..2 {
                for q in 0..2 {
                    m[(2 * s + p, 2 * s + q)] += ik * xv * g[(p, q)];
                }
            }
        }
    }
    Ok(m)
}

/// Relative tolerance on `|Im det| / |det|`.
pub const DET_REALNESS_TOL: f64 = 1e-6;

/// Sign of the real determinant `det(ıκD + H)` in `d = 3`, with its relative imaginary part.
pub fn z2_det_d3(h: &OperatorMatrix, trs: &CMat, x: &PositionOperators, spec: &LocalizerSpec) -> Result<(i8, f64)> {
    check_odd_trs(h, trs)?;
    let m = det_localizer(h, x, spec)?;
    let ld = log_det(&m);
    if ld.is_singular() {
        return Err(Error::SingularLocalizer { n_zero: 1 });
    }
    let rel = ld.relative_imag();
    if rel > DET_REALNESS_TOL {
        return Err(Error::DeterminantNotReal(rel));
    }
    Ok((ld.real_sign() as i8, rel))
}

/// Outcome of a localizer evaluation with its tuning certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizerReport {
    pub variant: Variant,
    /// Half-signature, or the `±1` sign for the Pfaffian and determinant variants.
    pub value: i64,
    /// Smallest `|eigenvalue|` of the localizer, when certified.
    pub localizer_gap: Option<f64>,
    pub tuning: Tuning,
    pub method: Option<SignatureMethod>,
    /// Relative imaginary part of the determinant (`det_d3` only).
    pub det_imag: Option<f64>,
}

impl LocalizerReport {
    pub fn tuning_ok(&self) -> bool {
        self.tuning.tuning_ok
    }
}

/// Evaluates the localizer of `spec.variant`.
///
/// With `certify` the localizer spectrum is computed as well and, whenever the
/// tuning inequalities hold, `g_L ≥ g/2` is enforced.
pub fn localizer_report(
    h: &OperatorMatrix,
    x: &PositionOperators,
    sym: &Symmetries,
    spec: &LocalizerSpec,
    certify: bool,
) -> Result<LocalizerReport> {
    spec.check_compatible(x.d(), sym)?;
    // boundary zero modes of open samples leave no gap; the invariant is still defined
    let tuning = match check_tuning(h, x, spec.kappa, spec.rho) {
        Err(Error::NoGap) => Tuning::ungapped(),
        other => other?,
    };
    let mut report = LocalizerReport { variant: spec.variant, value: 0, localizer_gap: None, tuning, method: None, det_imag: None };
    match spec.variant {
        Variant::Even | Variant::Odd => {
            let l = match spec.variant {
                Variant::Even => even_localizer(h, x, spec)?,
                _ => odd_localizer(h, sym.chiral.as_ref().ok_or(Error::NotChiral)?, x, spec)?,
            };
            let (s, method) = half_signature_with_method(&l, default_zero_tol(&l))?;
            report.value = if spec.variant == Variant::Odd { odd_orientation(x.d()) * s } else { s };
            report.method = Some(method);
            if certify {
                let ev = hermitian_eigvals(&l)?;
                report.localizer_gap = Some(gap_of(&ev, 0.0));
            }
        }
        Variant::SkewD2Trs => {
            let trs = &sym.trs.as_ref().expect("checked").matrix;
            report.value = skew_localizer_z2_d2(h, trs, x, spec)? as i64;
            if certify {
                let (s, _) = skew_localizer(h, trs, x, spec)?;
                // iS is hermitian with the singular values of S
                let ev = eigh_dense(&small::scale(&s.to_dense(), C64::new(0.0, 1.0)))?;
                report.localizer_gap = Some(gap_of(&ev.values, 0.0));
            }
        }
        Variant::DetD3 => {
            let trs = &sym.trs.as_ref().expect("checked").matrix;
            let (s, rel) = z2_det_d3(h, trs, x, spec)?;
            report.value = s as i64;
            report.det_imag = Some(rel);
            if certify {
                let m = det_localizer(h, x, spec)?;
                let sv = m.singular_values().map_err(|_| Error::EigenFailure)?;
                report.localizer_gap = sv.last().copied();
            }
        }
    }
    if let Some(gl) = report.localizer_gap {
        let bound = tuning.gap / 2.0;
        if tuning.tuning_ok && gl < bound - 1e-10 {
            return Err(Error::CertificateViolated { gap_l: gl, bound });
        }
    }
    Ok(report)
}

/// Even-localizer half-signature re-centered at every grid point.
///
/// Singular points are reported as `None`.
pub fn local_index_map(h: &OperatorMatrix, x: &PositionOperators, spec: &LocalizerSpec, grid: &[Vec<f64>]) -> Result<Vec<Option<i64>>> {
    if spec.variant != Variant::Even {
        return Err(Error::IncompatibleVariant("local index maps use the even localizer".into()));
    }
    grid.par_iter()
        .map(|c| {
            let s = spec.clone().with_center(c.clone());
            let l = even_localizer(h, x, &s)?;
            match half_signature(&l, default_zero_tol(&l)) {
                Ok(v) => Ok(Some(v)),
                Err(Error::SingularLocalizer { .. }) | Err(Error::OddSignature(_)) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect()
}

/// Default approximate-kernel window `½·√(κ v)`, `v = max_j ‖[X_j, H]‖`.
pub fn semimetal_tolerance(h: &OperatorMatrix, x: &PositionOperators, kappa: f64) -> Result<f64> {
    let v = (0..x.d()).map(|a| axis_commutator_norm(h, x, a)).try_fold(0.0f64, |m, v| v.map(|v| m.max(v)))?;
    Ok(0.5 * (kappa * v).sqrt())
}

/// Number of even-localizer eigenvalues in `(−tol, tol)`.
pub fn semimetal_kernel_count(h: &OperatorMatrix, x: &PositionOperators, spec: &LocalizerSpec, tol: Option<f64>) -> Result<usize> {
    let l = even_localizer(h, x, spec)?;
    let tol = match tol {
        Some(t) => t,
        None => semimetal_tolerance(h, x, spec.kappa)?,
    };
    let below = |shift: f64| -> Result<usize> {
        let (i, _) = localizer_inertia(&l.shifted(shift), 0.0)?;
        Ok(i.n_minus + i.n_zero)
    };
    Ok(below(-tol)? - below(tol)?)
}
