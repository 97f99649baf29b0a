use super::operator::{MatrixKind, OperatorMatrix};
use super::ordering::rcm_order;
use crate::error::{Error, Result};
use crate::C64;

/// Signature data of a hermitian matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Inertia {
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_zero: usize,
}

impl Inertia {
    pub fn dim(&self) -> usize {
        self.n_plus + self.n_minus + self.n_zero
    }

    pub fn signature(&self) -> i64 {
        self.n_plus as i64 - self.n_minus as i64
    }

    /// Counting from a list of eigenvalues, `|λ| < zero_tol` being zero.
    pub fn from_eigenvalues(values: &[f64], zero_tol: f64) -> Inertia {
        let mut r = Inertia { n_plus: 0, n_minus: 0, n_zero: 0 };
        for &x in values {
            if x.abs() < zero_tol {
                r.n_zero += 1;
            } else if x > 0.0 {
                r.n_plus += 1;
            } else {
                r.n_minus += 1;
            }
        }
        r
    }
}

/// Scale-aware default tolerance: `1e-8 · max|a_ij| · dim`.
pub fn default_zero_tol(a: &OperatorMatrix) -> f64 {
    1e-8 * a.max_abs_entry() * a.dim() as f64
}

/// Pivot growth beyond this multiple of the largest input entry is a breakdown.
const GROWTH_LIMIT: f64 = 1e12;

/// Bunch–Kaufman pivot threshold `(1 + √17)/8`.
const ALPHA: f64 = 0.640_388_203_202_208_4;

/// Inertia of `A` with eigenvalues in `(-zero_tol, zero_tol)` counted as zero.
///
/// Two symmetric-indefinite factorizations of the shifted matrices `A ± zero_tol`
/// give exact counts of eigenvalues below `±zero_tol` by Sylvester's law.
pub fn ldl_inertia(a: &OperatorMatrix, zero_tol: f64) -> Result<Inertia> {
    if a.kind() != MatrixKind::Hermitian {
        return Err(Error::NonHermitianInput { defect: f64::INFINITY });
    }
    if zero_tol <= 0.0 {
        return pivot_inertia(a, 0.0);
    }
    let lo = pivot_inertia(a, -zero_tol)?;
    let hi = pivot_inertia(a, zero_tol)?;
    let n_minus = lo.n_minus + lo.n_zero;
    let n_zero = hi.n_minus - n_minus.min(hi.n_minus);
    Ok(Inertia { n_plus: a.dim() - n_minus - n_zero, n_minus, n_zero })
}

/// Inertia of the pivots of `A − shift` (zero counts only exactly singular pivots).
pub fn pivot_inertia(a: &OperatorMatrix, shift: f64) -> Result<Inertia> {
    let n = a.dim();
    let order = working_order(a);
    let mut pos = vec![0usize; n];
    for (new, &old) in order.iter().enumerate() {
        pos[old] = new;
    }
    let mut w = vec![C64::new(0.0, 0.0); n * n];
    for (i, j, v) in a.entries() {
        w[pos[i] + pos[j] * n] = v;
    }
    for i in 0..n {
        w[i + i * n] -= shift;
    }
    let limit = GROWTH_LIMIT * a.max_abs_entry().max(shift.abs()).max(f64::MIN_POSITIVE);
    bunch_kaufman_inertia(&mut w, n, limit)
}

fn working_order(a: &OperatorMatrix) -> Vec<usize> {
    let n = a.dim();
    if a.is_dense() || a.nnz() * 4 > n * n {
        (0..n).collect()
    } else {
        rcm_order(&a.pattern())
    }
}

/// Symmetric row/column interchange of `p` and `q` on the active block `k..n`.
fn swap_sym(w: &mut [C64], n: usize, k: usize, p: usize, q: usize) {
    for j in k..n {
        w.swap(p + j * n, q + j * n);
    }
    for i in k..n {
        w.swap(i + p * n, i + q * n);
    }
}

/// In-place Bunch–Kaufman on a full column-major hermitian array, returning pivot inertia.
///
/// Updates skip structurally zero entries of the pivot columns, so banded
/// inputs cost roughly `n·b²`.
fn bunch_kaufman_inertia(w: &mut [C64], n: usize, limit: f64) -> Result<Inertia> {
    let mut r = Inertia { n_plus: 0, n_minus: 0, n_zero: 0 };
    let zero = C64::new(0.0, 0.0);
    let mut nz: Vec<usize> = Vec::with_capacity(n);
    let mut col1: Vec<C64> = Vec::with_capacity(n);
    let mut col2: Vec<C64> = Vec::with_capacity(n);
    let mut k = 0;
    while k < n {
        let akk = w[k + k * n].re;
        let (mut colmax, mut imax) = (0.0f64, k);
        for i in k + 1..n {
            let v = w[i + k * n].norm();
            if v > colmax {
                colmax = v;
                imax = i;
            }
        }
        if !colmax.is_finite() || !akk.is_finite() {
            return Err(Error::IndefinitePivotBreakdown { limit });
        }
        if akk == 0.0 && colmax == 0.0 {
            r.n_zero += 1;
            k += 1;
            continue;
        }
        let (kstep, kp) = if akk.abs() >= ALPHA * colmax {
            (1, k)
        } else {
            let mut rowmax = 0.0f64;
            for j in k..n {
                if j != imax {
                    rowmax = rowmax.max(w[j + imax * n].norm());
                }
            }
            if akk.abs() * rowmax >= ALPHA * colmax * colmax {
                (1, k)
            } else if w[imax + imax * n].re.abs() >= ALPHA * rowmax {
                (1, imax)
            } else {
                (2, imax)
            }
        };
        let kk = k + kstep - 1;
        if kp != kk {
            swap_sym(w, n, k, kk, kp);
        }

        if kstep == 1 {
            let d = w[k + k * n].re;
            if d.abs() > limit {
                return Err(Error::IndefinitePivotBreakdown { limit });
            }
            match d.partial_cmp(&0.0) {
                Some(std::cmp::Ordering::Greater) => r.n_plus += 1,
                Some(std::cmp::Ordering::Less) => r.n_minus += 1,
                _ => {
                    r.n_zero += 1;
                    k += 1;
                    continue;
                }
            }
            nz.clear();
            col1.clear();
            for i in k + 1..n {
                let v = w[i + k * n];
                if v != zero {
                    nz.push(i);
                    col1.push(v);
                }
            }
            for (q, &j) in nz.iter().enumerate() {
                let cj = col1[q].conj() / d;
                let base = j * n;
                for (p, &i) in nz.iter().enumerate() {
                    w[i + base] -= col1[p] * cj;
                }
            }
        } else {
            let a = w[k + k * n].re;
            let b = w[(k + 1) + k * n];
            let c = w[(k + 1) + (k + 1) * n].re;
            if a.abs().max(c.abs()).max(b.norm()) > limit {
                return Err(Error::IndefinitePivotBreakdown { limit });
            }
            let det = a * c - b.norm_sqr();
            if det < 0.0 {
                r.n_plus += 1;
                r.n_minus += 1;
            } else if det > 0.0 {
                if a > 0.0 {
                    r.n_plus += 2;
                } else {
                    r.n_minus += 2;
                }
            } else {
                return Err(Error::IndefinitePivotBreakdown { limit });
            }
            nz.clear();
            col1.clear();
            col2.clear();
            for i in k + 2..n {
                let u = w[i + k * n];
                let v = w[i + (k + 1) * n];
                if u != zero || v != zero {
                    nz.push(i);
                    col1.push(u);
                    col2.push(v);
                }
            }
            let inv = 1.0 / det;
            let w1: Vec<C64> = col1.iter().zip(&col2).map(|(&u, &v)| (u * c - v * b) * inv).collect();
            let w2: Vec<C64> = col1.iter().zip(&col2).map(|(&u, &v)| (v * a - u * b.conj()) * inv).collect();
            for (q, &j) in nz.iter().enumerate() {
                let (u, v) = (col1[q].conj(), col2[q].conj());
                let base = j * n;
                for (p, &i) in nz.iter().enumerate() {
                    w[i + base] -= w1[p] * u + w2[p] * v;
                }
            }
        }
        k += kstep;
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::spectral::hermitian_eigvals;
    use crate::linalg::testutil::{random_hermitian, random_sparse_hermitian};
    use proptest::prelude::*;
    use rand::SeedableRng;

    #[test]
    fn diagonal_examples() {
        let a = OperatorMatrix::diagonal(&[1.0, -1.0, 2.0]);
        assert_eq!(ldl_inertia(&a, 1e-8).unwrap(), Inertia { n_plus: 2, n_minus: 1, n_zero: 0 });
        let b = OperatorMatrix::diagonal(&[1e-12, 3.0]);
        assert_eq!(ldl_inertia(&b, 1e-8).unwrap(), Inertia { n_plus: 1, n_minus: 0, n_zero: 1 });
    }

    #[test]
    fn zero_diagonal_forces_two_by_two_pivots() {
        let s1 = OperatorMatrix::from_triplets(
            2,
            MatrixKind::Hermitian,
            vec![(0, 1, C64::new(0.0, 2.0)), (1, 0, C64::new(0.0, -2.0))],
        )
        .unwrap();
        assert_eq!(pivot_inertia(&s1, 0.0).unwrap(), Inertia { n_plus: 1, n_minus: 1, n_zero: 0 });
    }

    #[test]
    fn sparse_random_200_matches_eigenvalues() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let a = random_sparse_hermitian(&mut rng, 200, 0.03);
        let tol = default_zero_tol(&a);
        let ev = hermitian_eigvals(&a).unwrap();
        assert_eq!(ldl_inertia(&a, tol).unwrap(), Inertia::from_eigenvalues(&ev, tol));
    }

    #[test]
    fn singular_matrix_counts_kernel() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let a = random_hermitian(&mut rng, 12, 1.0).to_dense();
        // rank deficient: A·P with P a projector onto the first 9 eigenvectors
        let e = crate::linalg::spectral::eigh_dense(&a).unwrap();
        let proj = crate::linalg::spectral::apply_function(
            &e,
            |x| if x >= e.values[3] { x } else { 0.0 },
        );
        let m = OperatorMatrix::from_dense(proj, MatrixKind::Hermitian).unwrap();
        let tol = 1e-8;
        let ev = hermitian_eigvals(&m).unwrap();
        let inertia = ldl_inertia(&m, tol).unwrap();
        assert_eq!(inertia.n_zero, 3);
        assert_eq!(inertia, Inertia::from_eigenvalues(&ev, tol));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn agrees_with_eigenvalue_counting(seed in 0u64..u64::MAX, n in 2usize..400, density in 0.005f64..0.3) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let a = random_sparse_hermitian(&mut rng, n, density);
            let tol = default_zero_tol(&a);
            let ev = hermitian_eigvals(&a).unwrap();
            prop_assert_eq!(ldl_inertia(&a, tol).unwrap(), Inertia::from_eigenvalues(&ev, tol));
        }
    }
}
