use faer::Mat;

use super::ordering::permutation_sign;
use crate::C64;

/// Determinant held as `exp(log_abs) · phase` to avoid overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDet {
    pub log_abs: f64,
    /// Unit-modulus phase factor (zero for a singular matrix).
    pub phase: C64,
}

impl LogDet {
    /// `|Im det| / |det|`.
    pub fn relative_imag(&self) -> f64 {
        self.phase.im.abs()
    }

    pub fn real_sign(&self) -> f64 {
        self.phase.re.signum()
    }

    pub fn is_singular(&self) -> bool {
        self.log_abs == f64::NEG_INFINITY
    }
}

/// Determinant of a general square complex matrix via partially pivoted LU.
pub fn log_det(m: &Mat<C64>) -> LogDet {
    let n = m.nrows();
    let lu = m.partial_piv_lu();
    let u = lu.U();
    let mut log_abs = 0.0;
    let mut phase = C64::new(1.0, 0.0);
    for i in 0..n {
        let d = u[(i, i)];
        let r = d.norm();
        if r == 0.0 {
            return LogDet { log_abs: f64::NEG_INFINITY, phase: C64::new(0.0, 0.0) };
        }
        log_abs += r.ln();
        phase *= d / r;
        // keep the accumulated phase on the unit circle
        phase /= phase.norm();
    }
    let fwd: Vec<usize> = lu.P().arrays().0.to_vec();
    phase *= permutation_sign(&fwd);
    LogDet { log_abs, phase }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_determinants() {
        let m = Mat::<C64>::from_fn(2, 2, |i, j| [[C64::new(0.0, 0.0), C64::new(2.0, 0.0)], [C64::new(3.0, 0.0), C64::new(1.0, 0.0)]][i][j]);
        let d = log_det(&m);
        assert!((d.log_abs - 6f64.ln()).abs() < 1e-14);
        assert!((d.phase - C64::new(-1.0, 0.0)).norm() < 1e-14);
        let z = Mat::<C64>::zeros(3, 3);
        assert!(log_det(&z).is_singular());
    }

    #[test]
    fn agrees_with_faer_determinant() {
        let m = Mat::<C64>::from_fn(5, 5, |i, j| C64::new(((i * 7 + j * 3) % 5) as f64 - 2.0, (i as f64 - j as f64) * 0.3));
        let d = log_det(&m);
        let reference = m.determinant();
        let ours = d.phase * d.log_abs.exp();
        assert!((ours - reference).norm() < 1e-10 * reference.norm());
    }
}
