use super::operator::{MatrixKind, OperatorMatrix};
use super::ordering::{permutation_sign, rcm_order};
use crate::error::{Error, Result};

/// Default pivot tolerance for Pfaffians: `1e-8 · max|a_ij| · dim`.
pub fn default_pfaffian_tol(a: &OperatorMatrix) -> f64 {
    1e-8 * a.max_abs_entry() * a.dim() as f64
}

/// Sign of the Pfaffian of a real skew-symmetric operator.
///
/// Skew Parlett–Reid tridiagonalization with partial pivoting, run in a
/// bandwidth-reducing order whose permutation sign is folded into the result.
pub fn pfaffian_sign(a: &OperatorMatrix, zero_tol: f64) -> Result<f64> {
    if a.kind() != MatrixKind::RealSkew {
        return Err(Error::NotRealSkew("kind is not real-skew".into()));
    }
    let n = a.dim();
    if n % 2 == 1 {
        return Err(Error::OddDimension(n));
    }
    let order: Vec<usize> = if a.is_dense() || a.nnz() * 4 > n * n {
        (0..n).collect()
    } else {
        rcm_order(&a.pattern())
    };
    let mut pos = vec![0usize; n];
    for (new, &old) in order.iter().enumerate() {
        pos[old] = new;
    }
    let mut w = vec![0.0f64; n * n];
    for (i, j, v) in a.entries() {
        w[pos[i] * n + pos[j]] = v.re;
    }
    // Pf(PᵀAP) = det(P)·Pf(A)
    let sign = parlett_reid_sign(&mut w, n, zero_tol)?;
    Ok(sign * permutation_sign(&order))
}

/// Sign of the Pfaffian of a dense row-major skew array (destroyed).
pub fn parlett_reid_sign(w: &mut [f64], n: usize, zero_tol: f64) -> Result<f64> {
    let mut sign = 1.0;
    let mut nz: Vec<usize> = Vec::with_capacity(n);
    let mut tau = vec![0.0f64; n];
    let mut u = vec![0.0f64; n];
    let mut k = 0;
    while k + 1 < n {
        let (mut best, mut kp) = (0.0f64, k + 1);
        for i in k + 1..n {
            let v = w[i * n + k].abs();
            if v > best {
                best = v;
                kp = i;
            }
        }
        if kp != k + 1 {
            let p = k + 1;
            for j in k..n {
                w.swap(p * n + j, kp * n + j);
            }
            for i in k..n {
                w.swap(i * n + p, i * n + kp);
            }
            sign = -sign;
        }
        let piv = w[k * n + k + 1];
        if !(piv.abs() > zero_tol) {
            return Err(Error::SingularSkewMatrix { pivot: piv.abs() });
        }
        if piv < 0.0 {
            sign = -sign;
        }
        nz.clear();
        let denom = w[(k + 1) * n + k];
        for i in k + 2..n {
            let t = w[i * n + k] / denom;
            let uu = w[(k + 1) * n + i];
            if t != 0.0 || uu != 0.0 {
                nz.push(i);
                tau[i] = t;
                u[i] = uu;
            }
        }
        for &i in &nz {
            let (ui, ti) = (u[i], tau[i]);
            let row = i * n;
            for &j in &nz {
                w[row + j] += ui * tau[j] - ti * u[j];
            }
        }
        k += 2;
    }
    Ok(sign)
}

/// Pfaffian by recursive expansion along the first row; exponential cost, for oracles.
pub fn pfaffian_recursive(a: &[f64], n: usize) -> f64 {
    fn rec(a: &[f64], n: usize, idx: &[usize]) -> f64 {
        if idx.is_empty() {
            return 1.0;
        }
        let i0 = idx[0];
        let mut total = 0.0;
        for (p, &j) in idx.iter().enumerate().skip(1) {
            let rest: Vec<usize> = idx.iter().copied().enumerate().filter(|&(q, _)| q != 0 && q != p).map(|(_, x)| x).collect();
            let s = if p % 2 == 1 { 1.0 } else { -1.0 };
            total += s * a[i0 * n + j] * rec(a, n, &rest);
        }
        total
    }
    if n % 2 == 1 {
        return 0.0;
    }
    rec(a, n, &(0..n).collect::<Vec<_>>())
}
