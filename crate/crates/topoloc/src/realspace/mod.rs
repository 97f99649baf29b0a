//! Real-space invariants on finite samples.
//!
//! Index pairings are evaluated by counting near-zero singular values. On a
//! finite sample the square matrices `PFP` and `EAE` have index zero: each
//! topological zero mode localized at the Dirac center is partnered by one
//! localized at the sample edge (or seam). The index is therefore read off
//! from where the near-kernel vectors live, weighting right singular vectors
//! positively and left ones negatively inside a bulk disc around the center.

use faer::Mat;

use crate::error::{Error, Result};
use crate::kspace::grading_frames;
use crate::linalg::{eigh_dense, gap_of, MatrixKind, OperatorMatrix};
use crate::models::small::{self, CMat};
use crate::models::{position_operators, LatticeGeometry, PositionOperators, TightBindingModel};
use crate::C64;

/// Required ratio between the bulk and the near-kernel singular values.
pub const CLUSTER_RATIO: f64 = 10.0;

/// Singular values above this are never counted as near-kernel.
const CLUSTER_CEILING: f64 = 0.5;
/// Smallest singular value above which an unseparated spectrum counts as an empty kernel.
const CLUSTER_FLOOR: f64 = 0.05;

/// Spectral projection onto energies at or below `mu`.
#[derive(Debug, Clone)]
pub struct FermiProjection {
    pub projection: OperatorMatrix,
    /// Orthonormal basis of the range, one column per occupied state.
    pub range: Mat<C64>,
    pub mu: f64,
    pub gap: f64,
}

impl FermiProjection {
    pub fn rank(&self) -> usize {
        self.range.ncols()
    }

    pub fn dim(&self) -> usize {
        self.range.nrows()
    }
}

pub fn fermi_projection(h: &OperatorMatrix, mu: f64) -> Result<FermiProjection> {
    let e = eigh_dense(&h.to_dense())?;
    let gap = gap_of(&e.values, mu);
    let tol = 1e-10 * e.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if gap <= tol {
        return Err(Error::GapClosed { mu, gap });
    }
    let occ: Vec<usize> = (0..e.values.len()).filter(|&i| e.values[i] <= mu).collect();
    let n = h.dim();
    let range = Mat::from_fn(n, occ.len(), |i, c| e.vectors[(i, occ[c])]);
    let p = &range * range.adjoint();
    let projection = OperatorMatrix::from_dense(p, MatrixKind::Hermitian)?;
    Ok(FermiProjection { projection, range, mu, gap })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Dirac operator `D = Σ X_i γ_i` with its phase and Hardy projection.
///
/// Positions are offset by `½` on every axis so that no site sits at the
/// Dirac center. Where `D₀` still vanishes the phase is set to one.
#[derive(Debug, Clone)]
pub struct DiracData {
    pub parity: Parity,
    pub positions: PositionOperators,
    pub gamma: Vec<CMat>,
    pub gamma0: Option<CMat>,
    pub dirac: OperatorMatrix,
    /// Diagonal of `F = D₀|D₀|⁻¹` (even parity).
    pub phase: Option<Vec<C64>>,
    /// `E = ½(D|D|⁻¹ + 1)` (odd parity).
    pub hardy: Option<OperatorMatrix>,
}

impl DiracData {
    pub fn d(&self) -> usize {
        self.positions.d()
    }

    /// Distance of every lattice index from the Dirac center.
    pub fn radius(&self) -> Vec<f64> {
        (0..self.positions.dim())
            .map(|i| self.positions.coords.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt())
            .collect()
    }
}

fn clifford(d: usize) -> Result<Vec<CMat>> {
    match d {
        1 => Ok(vec![small::eye(1)]),
        2 => Ok(vec![small::pauli(1), small::pauli(2)]),
        3 => Ok(vec![small::pauli(1), small::pauli(2), small::pauli(3)]),
        _ => Err(Error::UnsupportedDimension(d)),
    }
}

/// `Σ_i X_i ⊗ γ_i` with the lattice index slow and the Clifford index fast.
fn dirac_operator(x: &PositionOperators, gamma: &[CMat]) -> Result<OperatorMatrix> {
    let m = gamma[0].nrows();
    let n = x.dim();
    let mut trip = Vec::new();
    for s in 0..n {
        for a in 0..m {
            for b in 0..m {
                let v: C64 = gamma.iter().zip(&x.coords).map(|(g, c)| g[(a, b)] * c[s]).sum();
                if v != C64::new(0.0, 0.0) {
                    trip.push((s * m + a, s * m + b, v));
                }
            }
        }
    }
    OperatorMatrix::from_triplets(n * m, MatrixKind::Hermitian, trip)
}

/// Dirac data for the given positions; `d = 2` for even parity, `d ∈ {1, 3}` for odd.
pub fn dirac_data(x: &PositionOperators, parity: Parity) -> Result<DiracData> {
    let d = x.d();
    if (parity == Parity::Even && d != 2) || (parity == Parity::Odd && d == 2) {
        return Err(Error::UnsupportedDimension(d));
    }
    let gamma = clifford(d)?;
    let positions = x.shifted(&vec![0.5; d]);
    let dirac = dirac_operator(&positions, &gamma)?;
    let (gamma0, phase, hardy) = match parity {
        Parity::Even => {
            let f = (0..positions.dim())
                .map(|i| {
                    let z = C64::new(positions.coords[0][i], positions.coords[1][i]);
                    if z.norm() == 0.0 {
                        C64::new(1.0, 0.0)
                    } else {
                        z / z.norm()
                    }
                })
                .collect();
            (Some(small::pauli(3)), Some(f), None)
        }
        Parity::Odd => (None, None, Some(hardy_projection(&positions, &gamma)?)),
    };
    Ok(DiracData { parity, positions, gamma, gamma0, dirac, phase, hardy })
}

/// Site-local `½(D|D|⁻¹ + 1)`; the kernel of `D` is sent to the positive side.
fn hardy_projection(x: &PositionOperators, gamma: &[CMat]) -> Result<OperatorMatrix> {
    let m = gamma[0].nrows();
    let mut trip = Vec::new();
    for s in 0..x.dim() {
        let mut block = small::zeros(m);
        for (g, c) in gamma.iter().zip(&x.coords) {
            block += small::scale(g, C64::new(c[s], 0.0));
        }
        let e = eigh_dense(&block)?;
        for (k, &lam) in e.values.iter().enumerate() {
            if lam >= 0.0 {
                for a in 0..m {
                    for b in 0..m {
                        let v = e.vectors[(a, k)] * e.vectors[(b, k)].conj();
                        if v.norm() > 1e-15 {
                            trip.push((s * m + a, s * m + b, v));
                        }
                    }
                }
            }
        }
    }
    OperatorMatrix::from_triplets(x.dim() * m, MatrixKind::Hermitian, trip)
}

/// Near-kernel singular triplets of a square matrix.
#[derive(Debug, Clone)]
pub struct NearKernel {
    /// All singular values, ascending.
    pub singular_values: Vec<f64>,
    /// Number of values in the near-zero cluster.
    pub cluster: usize,
    /// Ratio across the cluster split (infinite when the cluster is empty).
    pub ratio: f64,
    /// Right singular vectors of the cluster, as columns.
    pub right: Mat<C64>,
    /// Left singular vectors of the cluster, as columns.
    pub left: Mat<C64>,
}

/// Splits ascending singular values at the largest ratio gap below the ceiling.
///
/// Returns the cluster size and the ratio across the split.
pub fn cluster_split(sv: &[f64]) -> Result<(usize, f64)> {
    if sv.is_empty() || sv[0] > CLUSTER_CEILING {
        return Ok((0, f64::INFINITY));
    }
    if sv.len() == 1 {
        return Err(Error::NoClusterGap { ratio: 1.0 });
    }
    let mut best = (0, 0.0);
    for i in 0..sv.len() - 1 {
        if sv[i] > CLUSTER_CEILING {
            break;
        }
        let r = sv[i + 1] / sv[i].max(f64::MIN_POSITIVE);
        if r > best.1 {
            best = (i + 1, r);
        }
    }
    if best.1 < CLUSTER_RATIO {
        // no separated cluster and nothing small: the kernel is empty
        if sv[0] > CLUSTER_FLOOR {
            return Ok((0, f64::INFINITY));
        }
        return Err(Error::NoClusterGap { ratio: best.1 });
    }
    Ok(best)
}

pub fn near_kernel(t: &Mat<C64>) -> Result<NearKernel> {
    let n = t.nrows();
    if n == 0 {
        return Ok(NearKernel {
            singular_values: vec![],
            cluster: 0,
            ratio: f64::INFINITY,
            right: Mat::zeros(0, 0),
            left: Mat::zeros(0, 0),
        });
    }
    let svd = t.svd().map_err(|_| Error::EigenFailure)?;
    let s = svd.S().column_vector();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[a].re.total_cmp(&s[b].re));
    let singular_values: Vec<f64> = order.iter().map(|&i| s[i].re).collect();
    let (cluster, ratio) = cluster_split(&singular_values)?;
    let (u, v) = (svd.U(), svd.V());
    Ok(NearKernel {
        right: Mat::from_fn(n, cluster, |i, c| v[(i, order[c])]),
        left: Mat::from_fn(n, cluster, |i, c| u[(i, order[c])]),
        singular_values,
        cluster,
        ratio,
    })
}

/// Summed weight of the columns of `vecs` on indices where `mask` holds.
fn weight(vecs: &Mat<C64>, mask: &[bool]) -> f64 {
    let mut w = 0.0;
    for c in 0..vecs.ncols() {
        for (i, &m) in mask.iter().enumerate() {
            if m {
                w += vecs[(i, c)].norm_sqr();
            }
        }
    }
    w
}

/// Bulk disc around the Dirac center: a quarter of the shortest side.
fn bulk_mask(dd: &DiracData) -> Vec<bool> {
    let extent = dd
        .positions
        .coords
        .iter()
        .map(|c| {
            let (lo, hi) = c.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
            hi - lo + 1.0
        })
        .fold(f64::MAX, f64::min);
    let radius = (extent / 4.0).max(1.5);
    dd.radius().iter().map(|&x| x <= radius).collect()
}

fn bulk_weight_difference(basis: &Mat<C64>, nk: &NearKernel, mask: &[bool]) -> f64 {
    weight(&(basis * &nk.right), mask) - weight(&(basis * &nk.left), mask)
}

/// `P F P` restricted to `Ran P`.
pub fn pfp_matrix(p: &FermiProjection, dd: &DiracData) -> Result<Mat<C64>> {
    let f = dd.phase.as_ref().ok_or(Error::UnsupportedDimension(dd.d()))?;
    if f.len() != p.dim() {
        return Err(Error::DimensionMismatch(format!("dirac {} vs projection {}", f.len(), p.dim())));
    }
    let fv = Mat::from_fn(p.dim(), p.rank(), |i, c| f[i] * p.range[(i, c)]);
    Ok(p.range.adjoint() * &fv)
}

/// `Ind(PFP)` on `Ran P`.
pub fn index_pfp(p: &FermiProjection, dd: &DiracData) -> Result<i64> {
    let nk = near_kernel(&pfp_matrix(p, dd)?)?;
    Ok(bulk_weight_difference(&p.range, &nk, &bulk_mask(dd)).round() as i64)
}

/// `dim Ker(PFP) mod 2`, counting only kernel vectors localized at the Dirac center.
pub fn z2_nullity_parity(p: &FermiProjection, dd: &DiracData) -> Result<u8> {
    let nk = near_kernel(&pfp_matrix(p, dd)?)?;
    let right = weight(&(&p.range * &nk.right), &bulk_mask(dd));
    Ok((right.round() as i64).rem_euclid(2) as u8)
}

/// Off-diagonal block `A = ⟨−|H|+⟩` of a chiral Hamiltonian in the grading frame of `J`.
///
/// Rows and columns are ordered cell-major. Also returns the positions of the
/// block's index space.
pub fn chiral_off_diagonal(
    h: &OperatorMatrix,
    model: &TightBindingModel,
    geom: &LatticeGeometry,
) -> Result<(OperatorMatrix, PositionOperators)> {
    let j = model.symmetries.chiral.as_ref().ok_or(Error::NotChiral)?;
    let (vp, vm) = grading_frames(j)?;
    let l = geom.orbitals;
    let half = l / 2;
    let cells = geom.cells();
    let mut blocks: std::collections::HashMap<(usize, usize), CMat> = std::collections::HashMap::new();
    for (i, k, v) in h.entries() {
        blocks.entry((i / l, k / l)).or_insert_with(|| small::zeros(l))[(i % l, k % l)] = v;
    }
    let mut trip = Vec::new();
    for ((r, c), blk) in blocks {
        let ab = vm.adjoint() * &blk * &vp;
        for i in 0..half {
            for k in 0..half {
                if ab[(i, k)].norm() > 1e-14 {
                    trip.push((r * half + i, c * half + k, ab[(i, k)]));
                }
            }
        }
    }
    let keep: Vec<usize> = (0..cells).flat_map(|c| std::iter::repeat_n(c * l, half)).collect();
    let x = position_operators(geom);
    Ok((OperatorMatrix::from_triplets(cells * half, MatrixKind::General, trip)?, x.restrict(&keep)))
}

/// `Ind(EAE)` on `Ran E` for an invertible chiral block `A`.
pub fn index_eae(a: &OperatorMatrix, dd: &DiracData) -> Result<i64> {
    let e = dd.hardy.as_ref().ok_or(Error::UnsupportedDimension(dd.d()))?;
    let m = dd.gamma[0].nrows();
    if a.dim() * m != e.dim() {
        return Err(Error::DimensionMismatch(format!("block {} vs hardy {}", a.dim(), e.dim())));
    }
    let ad = a.to_dense();
    let smin = ad.singular_values().map_err(|_| Error::EigenFailure)?.last().copied().unwrap_or(0.0);
    if !(smin > 1e-8) {
        return Err(Error::SingularOffDiagonal(smin));
    }
    let amat = small::kron(&ad, &small::eye(m));
    let ee = eigh_dense(&e.to_dense())?;
    let cols: Vec<usize> = (0..ee.values.len()).filter(|&i| ee.values[i] > 0.5).collect();
    let w = Mat::from_fn(e.dim(), cols.len(), |i, c| ee.vectors[(i, cols[c])]);
    let t = w.adjoint() * &amat * &w;
    let nk = near_kernel(&t)?;
    let site_mask = bulk_mask(dd);
    let mask: Vec<bool> = (0..e.dim()).map(|i| site_mask[i / m]).collect();
    Ok(bulk_weight_difference(&w, &nk, &mask).round() as i64)
}

/// Default distance kept between a marker region and the sample boundary.
pub fn default_buffer(model: &TightBindingModel) -> usize {
    4.max(2 * model.range())
}

/// Cells of the centered `side × side` square of a 2D geometry.
pub fn central_region(geom: &LatticeGeometry, side: usize) -> Vec<usize> {
    let lo = -((side / 2) as i64);
    (0..geom.cells())
        .filter(|&c| geom.coords(c).iter().all(|&x| x >= lo && x < lo + side as i64))
        .collect()
}

/// Local Chern marker averaged over the cells of `region`.
pub fn local_chern_marker(p: &FermiProjection, geom: &LatticeGeometry, region: &[usize], buffer: usize) -> Result<f64> {
    if geom.d() != 2 {
        return Err(Error::UnsupportedDimension(geom.d()));
    }
    if region.is_empty() {
        return Err(Error::InvalidGeometry("empty marker region".into()));
    }
    for &cell in region {
        let idx = geom.cell_index(cell);
        for j in 0..2 {
            if idx[j] < buffer || idx[j] + buffer >= geom.extent[j] {
                return Err(Error::RegionTouchesBoundary);
            }
        }
    }
    let l = geom.orbitals;
    let rows: Vec<usize> = region.iter().flat_map(|&c| (c * l)..(c * l + l)).collect();
    Ok(chern_marker_trace(p, geom, &rows) / region.len() as f64)
}

/// `−Re 2πi Σ_{i∈rows} ⟨i|P[[X1,P],[X2,P]]|i⟩`, oriented like [`crate::kspace::chern_number`].
pub fn chern_marker_trace(p: &FermiProjection, geom: &LatticeGeometry, rows: &[usize]) -> f64 {
    let x = position_operators(geom);
    let pd = p.projection.to_dense();
    let n = pd.nrows();
    let comm = |c: &[f64]| Mat::from_fn(n, n, |i, j| pd[(i, j)] * (c[i] - c[j]));
    let a = comm(&x.coords[0]);
    let b = comm(&x.coords[1]);
    let sel = Mat::from_fn(n, rows.len(), |i, c| if i == rows[c] { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
    let cols = &a * (&b * &sel) - &b * (&a * &sel);
    let mut s = C64::new(0.0, 0.0);
    for (c, &i) in rows.iter().enumerate() {
        for k in 0..n {
            s += pd[(i, k)] * cols[(k, c)];
        }
    }
    -(C64::new(0.0, 2.0 * std::f64::consts::PI) * s).re
}

#[cfg(test)]
mod tests;
