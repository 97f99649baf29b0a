use sprs::{CsMat, TriMat};

/// Reverse Cuthill–McKee ordering of a symmetric nonzero pattern.
///
/// Returns `order` with `order[new] = old`.
pub fn rcm_order(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut tri = TriMat::new((n, n));
    for (i, nb) in adj.iter().enumerate() {
        tri.add_triplet(i, i, 1u8);
        for &j in nb {
            tri.add_triplet(i, j, 1u8);
        }
    }
    let pattern: CsMat<u8> = tri.to_csr();
    let ord = sprs::linalg::reverse_cuthill_mckee(pattern.view());
    ord.perm.vec()
}

/// Half bandwidth of the pattern under `order` (`order[new] = old`).
pub fn bandwidth(adj: &[Vec<usize>], order: &[usize]) -> usize {
    let mut pos = vec![0; order.len()];
    for (new, &old) in order.iter().enumerate() {
        pos[old] = new;
    }
    let mut b = 0;
    for (i, nb) in adj.iter().enumerate() {
        for &j in nb {
            b = b.max(pos[i].abs_diff(pos[j]));
        }
    }
    b
}

/// Sign of the permutation `order` (+1 even, -1 odd), via cycle counting.
pub fn permutation_sign(order: &[usize]) -> f64 {
    let n = order.len();
    let mut seen = vec![false; n];
    let mut sign = 1.0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut k = s;
        while !seen[k] {
            seen[k] = true;
            k = order[k];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}
