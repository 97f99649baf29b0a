use faer::Mat;

use crate::error::{Error, Result};
use crate::C64;

/// Structural class of an [`OperatorMatrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixKind {
    Hermitian,
    RealSkew,
    General,
}

#[derive(Debug, Clone)]
enum Storage {
    Sparse(Csr),
    Dense(Mat<C64>),
}

/// Compressed sparse rows with sorted column indices and no duplicates.
#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub values: Vec<C64>,
}

impl Csr {
    fn from_triplets(dim: usize, mut trip: Vec<(usize, usize, C64)>) -> Csr {
        // stable sort keeps insertion order of duplicates, so paired
        // (i,j,v)/(j,i,v*) contributions sum to exact conjugates
        trip.sort_by_key(|&(i, j, _)| (i, j));
        let mut indptr = vec![0usize; dim + 1];
        let mut indices = Vec::with_capacity(trip.len());
        let mut values: Vec<C64> = Vec::with_capacity(trip.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in trip {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(j);
                values.push(v);
                indptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..dim {
            indptr[i + 1] += indptr[i];
        }
        Csr { indptr, indices, values }
    }

    fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let r = self.indptr[i]..self.indptr[i + 1];
        self.indices[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    fn get(&self, i: usize, j: usize) -> C64 {
        let r = self.indptr[i]..self.indptr[i + 1];
        match self.indices[r.clone()].binary_search(&j) {
            Ok(p) => self.values[r.start + p],
            Err(_) => C64::new(0.0, 0.0),
        }
    }
}

/// A finite operator on the sample Hilbert space.
///
/// Storage is either sparse rows or a dense `faer` matrix; spectral-calculus
/// results are dense, assembled Hamiltonians and localizers are sparse.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    dim: usize,
    kind: MatrixKind,
    storage: Storage,
}

/// Relative tolerance for the structural checks performed on construction.
pub const STRUCTURE_TOL: f64 = 1e-12;

impl OperatorMatrix {
    /// Assemble from `(row, col, value)` triplets; duplicates are summed.
    ///
    /// Hermitian input is checked to [`STRUCTURE_TOL`] relative and then made
    /// exactly hermitian (upper triangle mirrored, diagonal made real).
    pub fn from_triplets(dim: usize, kind: MatrixKind, trip: Vec<(usize, usize, C64)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch("dim must be positive".into()));
        }
        if let Some(&(i, j, _)) = trip.iter().find(|&&(i, j, _)| i >= dim || j >= dim) {
            return Err(Error::DimensionMismatch(format!("entry ({i},{j}) outside dim {dim}")));
        }
        let csr = Csr::from_triplets(dim, trip);
        let mut m = OperatorMatrix { dim, kind, storage: Storage::Sparse(csr) };
        m.enforce_structure()?;
        Ok(m)
    }

    /// Wrap a dense matrix, validating and enforcing the structure of `kind`.
    pub fn from_dense(mat: Mat<C64>, kind: MatrixKind) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!("{}x{}", mat.nrows(), mat.ncols())));
        }
        let mut m = OperatorMatrix { dim: mat.nrows(), kind, storage: Storage::Dense(mat) };
        m.enforce_structure()?;
        Ok(m)
    }

    /// Real skew matrix from a dense real array (row-major closure).
    pub fn real_skew_from_fn(dim: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut trip = Vec::new();
        for i in 0..dim {
            for j in 0..dim {
                let v = f(i, j);
                if v != 0.0 {
                    trip.push((i, j, C64::new(v, 0.0)));
                }
            }
        }
        Self::from_triplets(dim, MatrixKind::RealSkew, trip)
    }

    pub fn identity(dim: usize) -> Self {
        let trip = (0..dim).map(|i| (i, i, C64::new(1.0, 0.0))).collect();
        Self::from_triplets(dim, MatrixKind::Hermitian, trip).expect("identity")
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let trip = values.iter().enumerate().map(|(i, &v)| (i, i, C64::new(v, 0.0))).collect();
        Self::from_triplets(values.len(), MatrixKind::Hermitian, trip).expect("diagonal")
    }

    fn enforce_structure(&mut self) -> Result<()> {
        match self.kind {
            MatrixKind::General => Ok(()),
            MatrixKind::Hermitian => {
                let scale = self.max_abs_entry().max(f64::MIN_POSITIVE);
                let defect = self.adjoint_defect(false) / scale;
                if defect > STRUCTURE_TOL {
                    return Err(Error::NonHermitianInput { defect });
                }
                self.mirror(false);
                Ok(())
            }
            MatrixKind::RealSkew => {
                let scale = self.max_abs_entry().max(f64::MIN_POSITIVE);
                if self.entries().any(|(_, _, v)| v.im != 0.0) {
                    return Err(Error::NotRealSkew("complex entry".into()));
                }
                let defect = self.adjoint_defect(true) / scale;
                if defect > STRUCTURE_TOL {
                    return Err(Error::NotRealSkew(format!("skew defect {defect:.3e}")));
                }
                self.mirror(true);
                Ok(())
            }
        }
    }

    /// max |a_ij - s·conj(a_ji)| with s = -1 for skew.
    fn adjoint_defect(&self, skew: bool) -> f64 {
        let s = if skew { -1.0 } else { 1.0 };
        let mut d: f64 = 0.0;
        for (i, j, v) in self.entries() {
            d = d.max((v - self.get(j, i).conj() * s).norm());
        }
        d
    }

    fn mirror(&mut self, skew: bool) {
        let s = if skew { -1.0 } else { 1.0 };
        match &mut self.storage {
            Storage::Dense(m) => {
                let n = m.nrows();
                for j in 0..n {
                    for i in 0..j {
                        let v = m[(i, j)];
                        m[(j, i)] = v.conj() * s;
                    }
                    let d = m[(j, j)];
                    m[(j, j)] = if skew { C64::new(0.0, 0.0) } else { C64::new(d.re, 0.0) };
                }
            }
            Storage::Sparse(csr) => {
                let n = csr.indptr.len() - 1;
                let snapshot = csr.clone();
                for i in 0..n {
                    for p in csr.indptr[i]..csr.indptr[i + 1] {
                        let j = csr.indices[p];
                        if i > j {
                            csr.values[p] = snapshot.get(j, i).conj() * s;
                        } else if i == j {
                            let d = csr.values[p];
                            csr.values[p] = if skew { C64::new(0.0, 0.0) } else { C64::new(d.re, 0.0) };
                        }
                    }
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.storage, Storage::Dense(_))
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        match &self.storage {
            Storage::Dense(m) => m[(i, j)],
            Storage::Sparse(c) => c.get(i, j),
        }
    }

    /// Stored entries (nonzero pattern for sparse storage, every nonzero for dense).
    pub fn entries(&self) -> Box<dyn Iterator<Item = (usize, usize, C64)> + '_> {
        match &self.storage {
            Storage::Sparse(c) => Box::new((0..self.dim).flat_map(move |i| c.row(i).map(move |(j, v)| (i, j, v)))),
            Storage::Dense(m) => Box::new(
                (0..self.dim)
                    .flat_map(move |i| (0..self.dim).map(move |j| (i, j, m[(i, j)])))
                    .filter(|&(_, _, v)| v != C64::new(0.0, 0.0)),
            ),
        }
    }

    pub fn nnz(&self) -> usize {
        match &self.storage {
            Storage::Sparse(c) => c.values.len(),
            Storage::Dense(m) => m.nrows() * m.ncols(),
        }
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries().fold(0.0, |a, (_, _, v)| a.max(v.norm()))
    }

    pub fn to_dense(&self) -> Mat<C64> {
        match &self.storage {
            Storage::Dense(m) => m.clone(),
            Storage::Sparse(c) => {
                let mut m = Mat::<C64>::zeros(self.dim, self.dim);
                for i in 0..self.dim {
                    for (j, v) in c.row(i) {
                        m[(i, j)] = v;
                    }
                }
                m
            }
        }
    }

    /// Dense real copy (row-major) of a real-skew matrix.
    pub fn to_dense_real(&self) -> Vec<f64> {
        let n = self.dim;
        let mut a = vec![0.0; n * n];
        for (i, j, v) in self.entries() {
            a[i * n + j] = v.re;
        }
        a
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.dim];
        for (i, j, v) in self.entries() {
            y[i] += v * x[j];
        }
        y
    }

    /// Frobenius norm.
    pub fn norm_fro(&self) -> f64 {
        self.entries().map(|(_, _, v)| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Operator 2-norm (largest singular value), computed densely.
    pub fn norm_2(&self) -> f64 {
        if self.dim == 1 {
            return self.get(0, 0).norm();
        }
        norm_2_dense(&self.to_dense())
    }

    /// Same matrix with a different declared kind (validated).
    pub fn with_kind(self, kind: MatrixKind) -> Result<Self> {
        let mut m = OperatorMatrix { kind, ..self };
        m.enforce_structure()?;
        Ok(m)
    }

    /// `self + shift·1`, keeping sparse storage.
    pub fn shifted(&self, shift: f64) -> OperatorMatrix {
        let mut trip: Vec<_> = self.entries().collect();
        trip.extend((0..self.dim).map(|i| (i, i, C64::new(shift, 0.0))));
        OperatorMatrix::from_triplets(self.dim, self.kind, trip).expect("shift preserves structure")
    }

    /// Principal submatrix on `keep` (in the given order).
    pub fn restrict(&self, keep: &[usize]) -> Result<OperatorMatrix> {
        let mut map = vec![usize::MAX; self.dim];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let trip = self
            .entries()
            .filter(|&(i, j, _)| map[i] != usize::MAX && map[j] != usize::MAX)
            .map(|(i, j, v)| (map[i], map[j], v))
            .collect();
        OperatorMatrix::from_triplets(keep.len(), self.kind, trip)
    }

    /// Symmetric adjacency lists of the nonzero pattern (diagonal excluded).
    pub fn pattern(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.dim];
        for (i, j, v) in self.entries() {
            if i != j && v != C64::new(0.0, 0.0) {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        adj
    }
}

/// Largest singular value of a dense matrix.
pub fn norm_2_dense(m: &Mat<C64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.singular_values().map(|s| s.first().copied().unwrap_or(0.0)).unwrap_or_else(|_| m.norm_l2())
}
