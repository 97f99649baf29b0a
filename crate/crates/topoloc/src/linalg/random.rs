//! Random test matrices used by oracles, property tests and benchmarks.

use faer::Mat;
use rand::Rng;

use super::operator::{MatrixKind, OperatorMatrix};
use crate::C64;

fn unit<R: Rng>(rng: &mut R) -> f64 {
    rng.random_range(-1.0..1.0)
}

/// Dense hermitian matrix with entries uniform in the unit box times `scale`.
pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize, scale: f64) -> OperatorMatrix {
    let mut trip = Vec::with_capacity(n * n);
    for i in 0..n {
        trip.push((i, i, C64::new(scale * unit(rng), 0.0)));
        for j in i + 1..n {
            let v = C64::new(unit(rng), unit(rng)) * scale;
            trip.push((i, j, v));
            trip.push((j, i, v.conj()));
        }
    }
    OperatorMatrix::from_triplets(n, MatrixKind::Hermitian, trip).expect("hermitian by construction")
}

/// Sparse hermitian matrix; each off-diagonal pair present with probability `density`.
///
/// A fraction of the diagonal is left empty so that 2×2 pivots occur.
pub fn random_sparse_hermitian<R: Rng>(rng: &mut R, n: usize, density: f64) -> OperatorMatrix {
    let mut trip = Vec::new();
    for i in 0..n {
        if rng.random_bool(0.7) {
            trip.push((i, i, C64::new(unit(rng), 0.0)));
        }
        for j in i + 1..n {
            if rng.random_bool(density) {
                let v = C64::new(unit(rng), unit(rng));
                trip.push((i, j, v));
                trip.push((j, i, v.conj()));
            }
        }
    }
    if trip.is_empty() {
        trip.push((0, 0, C64::new(1.0, 0.0)));
    }
    OperatorMatrix::from_triplets(n, MatrixKind::Hermitian, trip).expect("hermitian by construction")
}

/// Dense real skew matrix.
pub fn random_skew<R: Rng>(rng: &mut R, n: usize, scale: f64) -> OperatorMatrix {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = scale * unit(rng);
            m[i * n + j] = v;
            m[j * n + i] = -v;
        }
    }
    OperatorMatrix::real_skew_from_fn(n, |i, j| m[i * n + j]).expect("skew by construction")
}

/// Haar-ish random orthogonal matrix from the QR factor of a gaussian-like matrix.
pub fn random_orthogonal<R: Rng>(rng: &mut R, n: usize) -> Mat<f64> {
    let g = Mat::<f64>::from_fn(n, n, |_, _| unit(rng) + unit(rng) + unit(rng));
    let qr = g.qr();
    qr.compute_Q()
}
