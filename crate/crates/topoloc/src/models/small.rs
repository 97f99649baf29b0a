//! Small dense matrices for orbital-space data.

use faer::Mat;

use crate::C64;

pub type CMat = Mat<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn zeros(n: usize) -> CMat {
    Mat::zeros(n, n)
}

pub fn eye(n: usize) -> CMat {
    Mat::from_fn(n, n, |i, j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

pub fn from_rows(rows: &[&[C64]]) -> CMat {
    Mat::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
}

pub fn real_diag(d: &[f64]) -> CMat {
    Mat::from_fn(d.len(), d.len(), |i, j| if i == j { c(d[i], 0.0) } else { c(0.0, 0.0) })
}

/// Pauli matrices, `pauli(0)` being the identity.
pub fn pauli(k: usize) -> CMat {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match k {
        0 => from_rows(&[&[o, z], &[z, o]]),
        1 => from_rows(&[&[z, o], &[o, z]]),
        2 => from_rows(&[&[z, -i], &[i, z]]),
        3 => from_rows(&[&[o, z], &[z, -o]]),
        _ => panic!("pauli index {k}"),
    }
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ra, ca, rb, cb) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    Mat::from_fn(ra * rb, ca * cb, |i, j| a[(i / rb, j / cb)] * b[(i % rb, j % cb)])
}

pub fn scale(a: &CMat, s: C64) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * s)
}

pub fn conj(a: &CMat) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)].conj())
}

pub fn adjoint(a: &CMat) -> CMat {
    Mat::from_fn(a.ncols(), a.nrows(), |i, j| a[(j, i)].conj())
}

pub fn max_abs(a: &CMat) -> f64 {
    let mut m: f64 = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

pub fn is_real(a: &CMat) -> bool {
    (0..a.nrows()).all(|i| (0..a.ncols()).all(|j| a[(i, j)].im == 0.0))
}

/// Block-diagonal direct sum.
pub fn direct_sum(a: &CMat, b: &CMat) -> CMat {
    let (n, m) = (a.nrows(), b.nrows());
    Mat::from_fn(n + m, n + m, |i, j| {
        if i < n && j < n {
            a[(i, j)]
        } else if i >= n && j >= n {
            b[(i - n, j - n)]
        } else {
            c(0.0, 0.0)
        }
    })
}
