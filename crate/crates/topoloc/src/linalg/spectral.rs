use faer::{Mat, Side};

use super::operator::{MatrixKind, OperatorMatrix};
use crate::error::{Error, Result};
use crate::C64;

/// Eigenvalues in ascending order with eigenvectors as unitary columns.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: Mat<C64>,
}

fn require_hermitian(a: &OperatorMatrix) -> Result<()> {
    if a.kind() != MatrixKind::Hermitian {
        return Err(Error::NonHermitianInput { defect: f64::INFINITY });
    }
    Ok(())
}

/// Full eigendecomposition of a hermitian operator.
pub fn hermitian_eigh(a: &OperatorMatrix) -> Result<Eigh> {
    require_hermitian(a)?;
    eigh_dense(&a.to_dense())
}

/// Eigendecomposition of a dense matrix assumed hermitian (lower triangle read).
pub fn eigh_dense(m: &Mat<C64>) -> Result<Eigh> {
    let evd = m.self_adjoint_eigen(Side::Lower).map_err(|_| Error::EigenFailure)?;
    let s = evd.S().column_vector();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[i].re.total_cmp(&s[j].re));
    let values = order.iter().map(|&i| s[i].re).collect();
    let u = evd.U();
    let vectors = Mat::from_fn(n, n, |i, j| u[(i, order[j])]);
    Ok(Eigh { values, vectors })
}

/// Ascending eigenvalues only.
pub fn hermitian_eigvals(a: &OperatorMatrix) -> Result<Vec<f64>> {
    require_hermitian(a)?;
    eigvals_dense(&a.to_dense())
}

pub fn eigvals_dense(m: &Mat<C64>) -> Result<Vec<f64>> {
    let mut v = m.self_adjoint_eigenvalues(Side::Lower).map_err(|_| Error::EigenFailure)?;
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// `V f(Λ) V*` from an existing decomposition, as a dense matrix.
pub fn apply_function(e: &Eigh, f: impl Fn(f64) -> f64) -> Mat<C64> {
    apply_complex_function(e, |x| C64::new(f(x), 0.0))
}

/// `V f(Λ) V*` for a complex-valued `f` (e.g. unitary exponentials).
pub fn apply_complex_function(e: &Eigh, f: impl Fn(f64) -> C64) -> Mat<C64> {
    let n = e.values.len();
    let fv: Vec<C64> = e.values.iter().map(|&x| f(x)).collect();
    // only columns with nonzero weight contribute
    let cols: Vec<usize> = (0..n).filter(|&j| fv[j] != C64::new(0.0, 0.0)).collect();
    let k = cols.len();
    if k == 0 {
        return Mat::zeros(n, n);
    }
    let vs = Mat::from_fn(n, k, |i, j| e.vectors[(i, cols[j])] * fv[cols[j]]);
    let v = Mat::from_fn(n, k, |i, j| e.vectors[(i, cols[j])]);
    &vs * v.adjoint()
}

/// Spectral calculus `f(A)` for a real function, returned as a dense hermitian operator.
pub fn spectral_function(a: &OperatorMatrix, f: impl Fn(f64) -> f64) -> Result<OperatorMatrix> {
    let e = hermitian_eigh(a)?;
    OperatorMatrix::from_dense(apply_function(&e, f), MatrixKind::Hermitian)
}

/// Distance from `mu` to the spectrum; zero when `mu` is an eigenvalue.
pub fn spectral_gap(a: &OperatorMatrix, mu: f64) -> Result<f64> {
    Ok(gap_of(&hermitian_eigvals(a)?, mu))
}

pub fn gap_of(values: &[f64], mu: f64) -> f64 {
    values.iter().fold(f64::INFINITY, |g, &x| g.min((x - mu).abs()))
}

/// Spectral norm of a hermitian operator.
pub fn hermitian_norm(a: &OperatorMatrix) -> Result<f64> {
    let v = hermitian_eigvals(a)?;
    Ok(v.first().unwrap().abs().max(v.last().unwrap().abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::testutil::random_hermitian;
    use rand::SeedableRng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn sigma(k: usize) -> OperatorMatrix {
        let t = match k {
            1 => vec![(0, 1, c(1.0)), (1, 0, c(1.0))],
            2 => vec![(0, 1, C64::new(0.0, -1.0)), (1, 0, C64::new(0.0, 1.0))],
            _ => vec![(0, 0, c(1.0)), (1, 1, c(-1.0))],
        };
        OperatorMatrix::from_triplets(2, MatrixKind::Hermitian, t).unwrap()
    }

    #[test]
    fn diagonal_spectrum_sorted() {
        let e = hermitian_eigh(&OperatorMatrix::diagonal(&[2.0, -1.0])).unwrap();
        assert_eq!(e.values, vec![-1.0, 2.0]);
    }

    #[test]
    fn pauli_x_spectrum() {
        let e = hermitian_eigh(&sigma(1)).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn reconstruction_of_random_hermitian() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let a = random_hermitian(&mut rng, 50, 1.0);
        let e = hermitian_eigh(&a).unwrap();
        let back = apply_function(&e, |x| x);
        let d = a.to_dense();
        let err = (&back - &d).norm_l2() / d.norm_l2();
        assert!(err < 1e-9, "{err}");
        // residual per column
        let n = 50;
        let av = &d * &e.vectors;
        for j in 0..n {
            let r: f64 = (0..n).map(|i| (av[(i, j)] - e.vectors[(i, j)] * e.values[j]).norm_sqr()).sum::<f64>().sqrt();
            assert!(r < 1e-10 * hermitian_norm(&a).unwrap());
        }
    }

    #[test]
    fn functional_calculus_examples() {
        let id = spectral_function(&sigma(1), |x| x).unwrap();
        assert!((id.get(0, 1).re - 1.0).abs() < 1e-14 && id.get(0, 0).norm() < 1e-14);
        let sq = spectral_function(&sigma(1), |x| x * x).unwrap();
        assert!((sq.get(0, 0).re - 1.0).abs() < 1e-14 && sq.get(0, 1).norm() < 1e-14);
        let p = spectral_function(&sigma(3), |x| if x <= 0.0 { 1.0 } else { 0.0 }).unwrap();
        assert_eq!(p.get(0, 0).re, 0.0);
        assert!((p.get(1, 1).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gap_examples() {
        let a = OperatorMatrix::diagonal(&[-1.0, 1.0]);
        assert_eq!(spectral_gap(&a, 0.0).unwrap(), 1.0);
        assert_eq!(spectral_gap(&a, 0.5).unwrap(), 0.5);
        assert_eq!(spectral_gap(&a, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn result_commutes_with_input() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let a = random_hermitian(&mut rng, 30, 0.5);
        let f = spectral_function(&a, |x| (2.0 * x).sin()).unwrap();
        let (ad, fd) = (a.to_dense(), f.to_dense());
        let comm = (&ad * &fd - &fd * &ad).norm_l2();
        assert!(comm < 1e-9 * a.norm_2() * f.norm_2());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]
            #[test]
            fn composition_of_polynomials(seed in 0u64..1000, n in 2usize..20) {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let a = random_hermitian(&mut rng, n, 0.6);
                let g = |x: f64| 0.5 * x * x - x + 0.25;
                let f = |x: f64| x * x * x - 2.0 * x;
                let lhs = spectral_function(&a, |x| f(g(x))).unwrap().to_dense();
                let inner = spectral_function(&a, g).unwrap();
                let rhs = spectral_function(&inner, f).unwrap().to_dense();
                let err = (&lhs - &rhs).norm_l2() / lhs.norm_l2().max(1e-300);
                prop_assert!(err < 1e-8, "{}", err);
            }
        }
    }
}
