use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{MatrixKind, OperatorMatrix};
use crate::C64;

/// Boundary condition along one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    Periodic,
    Open,
    /// Open, with the lower face designated as the physical boundary.
    HalfSpace,
}

impl Boundary {
    pub fn is_periodic(self) -> bool {
        self == Boundary::Periodic
    }
}

/// Finite box of `∏ N_j` cells with `L` orbitals each.
///
/// Site coordinates along axis `j` run over `origin_j .. origin_j + N_j`, with
/// `origin_j = −⌊N_j/2⌋` so samples are centered at zero. Cell index is
/// `m_0 + N_0·(m_1 + N_1·m_2)` and the Hilbert index is `cell·L + orbital`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeGeometry {
    pub extent: Vec<usize>,
    pub orbitals: usize,
    pub boundary: Vec<Boundary>,
    pub origin: Vec<i64>,
}

impl LatticeGeometry {
    pub fn new(extent: Vec<usize>, orbitals: usize, boundary: Vec<Boundary>) -> Result<Self> {
        let d = extent.len();
        if !(1..=3).contains(&d) {
            return Err(Error::InvalidGeometry(format!("dimension {d} not in 1..=3")));
        }
        if boundary.len() != d {
            return Err(Error::InvalidGeometry("one boundary condition per axis required".into()));
        }
        if extent.iter().any(|&n| n == 0) || orbitals == 0 {
            return Err(Error::InvalidGeometry("extent and orbitals must be positive".into()));
        }
        if boundary.iter().filter(|&&b| b == Boundary::HalfSpace).count() > 1 {
            return Err(Error::InvalidGeometry("half-space allowed on at most one axis".into()));
        }
        let origin = extent.iter().map(|&n| -((n / 2) as i64)).collect();
        Ok(LatticeGeometry { extent, orbitals, boundary, origin })
    }

    /// Same boundary condition on every axis.
    pub fn uniform(extent: Vec<usize>, orbitals: usize, boundary: Boundary) -> Result<Self> {
        let d = extent.len();
        Self::new(extent, orbitals, vec![boundary; d])
    }

    pub fn d(&self) -> usize {
        self.extent.len()
    }

    pub fn cells(&self) -> usize {
        self.extent.iter().product()
    }

    pub fn dim(&self) -> usize {
        self.cells() * self.orbitals
    }

    /// Lattice index tuple of a cell.
    pub fn cell_index(&self, cell: usize) -> Vec<usize> {
        let mut rem = cell;
        self.extent
            .iter()
            .map(|&n| {
                let m = rem % n;
                rem /= n;
                m
            })
            .collect()
    }

    pub fn cell_of(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.extent).rev().fold(0, |acc, (&m, &n)| acc * n + m)
    }

    /// Centered integer coordinates of a cell.
    pub fn coords(&self, cell: usize) -> Vec<i64> {
        self.cell_index(cell).iter().zip(&self.origin).map(|(&m, &o)| m as i64 + o).collect()
    }

    /// Cell reached from `cell` by displacement `a`, or `None` if it leaves an open axis.
    pub fn neighbor(&self, cell: usize, a: &[i64]) -> Option<usize> {
        let idx = self.cell_index(cell);
        let mut out = Vec::with_capacity(idx.len());
        for j in 0..idx.len() {
            let n = self.extent[j] as i64;
            let t = idx[j] as i64 + a[j];
            let t = if self.boundary[j].is_periodic() {
                t.rem_euclid(n)
            } else if (0..n).contains(&t) {
                t
            } else {
                return None;
            };
            out.push(t as usize);
        }
        Some(self.cell_of(&out))
    }

    /// Axis carrying the half-space boundary, if any.
    pub fn half_space_axis(&self) -> Option<usize> {
        self.boundary.iter().position(|&b| b == Boundary::HalfSpace)
    }
}

/// Diagonal position operators `X_j|n⟩ = n_j|n⟩`, orbital-degenerate.
#[derive(Debug, Clone)]
pub struct PositionOperators {
    /// Per-axis coordinate of every Hilbert-space index.
    pub coords: Vec<Vec<f64>>,
}

impl PositionOperators {
    pub fn d(&self) -> usize {
        self.coords.len()
    }

    pub fn dim(&self) -> usize {
        self.coords[0].len()
    }

    /// `X_j` as a diagonal operator matrix.
    pub fn operator(&self, axis: usize) -> OperatorMatrix {
        OperatorMatrix::diagonal(&self.coords[axis])
    }

    /// Copy with every coordinate shifted by `shift[j]`.
    pub fn shifted(&self, shift: &[f64]) -> PositionOperators {
        PositionOperators {
            coords: self.coords.iter().zip(shift).map(|(c, &s)| c.iter().map(|x| x + s).collect()).collect(),
        }
    }

    /// Restriction to a subset of Hilbert indices.
    pub fn restrict(&self, keep: &[usize]) -> PositionOperators {
        PositionOperators { coords: self.coords.iter().map(|c| keep.iter().map(|&i| c[i]).collect()).collect() }
    }
}

pub fn position_operators(geom: &LatticeGeometry) -> PositionOperators {
    let l = geom.orbitals;
    let mut coords = vec![Vec::with_capacity(geom.dim()); geom.d()];
    for cell in 0..geom.cells() {
        let c = geom.coords(cell);
        for _ in 0..l {
            for (j, &x) in c.iter().enumerate() {
                coords[j].push(x as f64);
            }
        }
    }
    PositionOperators { coords }
}

/// `[X, A]` for a diagonal `X` given by its entries.
pub fn commutator_with_diagonal(x: &[f64], a: &OperatorMatrix) -> OperatorMatrix {
    let trip = a
        .entries()
        .map(|(i, j, v)| (i, j, v * (x[i] - x[j])))
        .filter(|&(_, _, v)| v != C64::new(0.0, 0.0))
        .collect();
    OperatorMatrix::from_triplets(a.dim(), MatrixKind::General, trip).expect("same dimension")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centered_chain() {
        let g = LatticeGeometry::uniform(vec![3], 1, Boundary::Open).unwrap();
        assert_eq!(position_operators(&g).coords[0], vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn two_by_two_square() {
        let g = LatticeGeometry::uniform(vec![2, 2], 1, Boundary::Open).unwrap();
        let x = position_operators(&g);
        for j in 0..2 {
            assert!(x.coords[j].iter().all(|&v| v == -1.0 || v == 0.0));
        }
    }

    #[test]
    fn coordinate_range() {
        for n in 1..8usize {
            let g = LatticeGeometry::uniform(vec![n], 2, Boundary::Periodic).unwrap();
            let x = position_operators(&g);
            let lo = -((n / 2) as f64);
            let hi = (n.div_ceil(2)) as f64 - 1.0;
            assert!(x.coords[0].iter().all(|&v| v >= lo && v <= hi));
            assert_eq!(x.coords[0].len(), 2 * n);
        }
    }

    #[test]
    fn positions_commute() {
        let g = LatticeGeometry::uniform(vec![3, 4], 2, Boundary::Open).unwrap();
        let x = position_operators(&g);
        let (a, b) = (x.operator(0).to_dense(), x.operator(1).to_dense());
        assert_eq!((&a * &b - &b * &a).norm_l2(), 0.0);
    }

    #[test]
    fn neighbors_wrap_or_leave() {
        let g = LatticeGeometry::new(vec![4, 3], 1, vec![Boundary::Periodic, Boundary::Open]).unwrap();
        let c = g.cell_of(&[3, 2]);
        assert_eq!(g.neighbor(c, &[1, 0]), Some(g.cell_of(&[0, 2])));
        assert_eq!(g.neighbor(c, &[0, 1]), None);
    }

    #[test]
    fn rejects_two_half_spaces() {
        assert!(LatticeGeometry::uniform(vec![4, 4], 1, Boundary::HalfSpace).is_err());
    }
}
