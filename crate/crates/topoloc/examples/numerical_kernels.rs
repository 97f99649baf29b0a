//! Sparse LDL inertia and Pfaffian signs against dense references.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use topoloc::linalg::random::{random_hermitian, random_skew};
use topoloc::linalg::{default_zero_tol, hermitian_eigvals, ldl_inertia, pfaffian_recursive, pfaffian_sign, Inertia};

fn main() -> topoloc::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = random_hermitian(&mut rng, 40, 1.0);
    let ldl = ldl_inertia(&a, default_zero_tol(&a))?;
    let dense = Inertia::from_eigenvalues(&hermitian_eigvals(&a)?, default_zero_tol(&a));
    println!("LDL inertia {ldl:?}\neigenvalues {dense:?}");

    let s = random_skew(&mut rng, 8, 1.0);
    let d = s.to_dense();
    let flat: Vec<f64> = (0..8).flat_map(|i| (0..8).map(move |j| (i, j))).map(|(i, j)| d[(i, j)].re).collect();
    println!("sgn Pf {:+}, recursive Pf {:.6}", pfaffian_sign(&s, 1e-12)?, pfaffian_recursive(&flat, 8));
    Ok(())
}
