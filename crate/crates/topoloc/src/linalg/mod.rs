//! Dense and sparse numerical kernels.

mod det;
mod ldl;
mod operator;
mod ordering;
mod pfaffian;
pub mod random;
mod spectral;

pub use det::{log_det, LogDet};
pub use ldl::{default_zero_tol, ldl_inertia, pivot_inertia, Inertia};
pub use operator::{norm_2_dense, Csr, MatrixKind, OperatorMatrix, STRUCTURE_TOL};
pub use ordering::{bandwidth, permutation_sign, rcm_order};
pub use pfaffian::{default_pfaffian_tol, parlett_reid_sign, pfaffian_recursive, pfaffian_sign};
pub use spectral::{
    apply_complex_function, apply_function, eigh_dense, eigvals_dense, gap_of, hermitian_eigh, hermitian_eigvals,
    hermitian_norm, spectral_function, spectral_gap, Eigh,
};

#[cfg(test)]
pub(crate) mod testutil {
    pub use super::random::*;
}
