//! Local index map across an interface between topological and trivial regions.

use topoloc::localizer::{local_index_map, LocalizerSpec, Variant};
use topoloc::models::{build_hamiltonian, haldane_benchmark, position_operators, Boundary, LatticeGeometry};
use topoloc::linalg::{MatrixKind, OperatorMatrix};
use topoloc::C64;

fn main() -> topoloc::Result<()> {
    let g = LatticeGeometry::uniform(vec![20, 12], 2, Boundary::Open)?;
    let h = build_hamiltonian(&haldane_benchmark(0.0), &g, 0)?;
    let x = position_operators(&g);
    // staggered mass 4 on the right half makes it trivial
    let mut trip: Vec<_> = h.entries().collect();
    for i in 0..h.dim() {
        if x.coords[0][i] >= 0.0 {
            trip.push((i, i, C64::new(if i % 2 == 0 { 4.0 } else { -4.0 }, 0.0)));
        }
    }
    let h = OperatorMatrix::from_triplets(h.dim(), MatrixKind::Hermitian, trip)?;
    let grid: Vec<Vec<f64>> = (-8..=8).step_by(2).map(|c| vec![c as f64, 0.0]).collect();
    let map = local_index_map(&h, &x, &LocalizerSpec::new(Variant::Even, 0.3, 30.0)?, &grid)?;
    for (c, v) in grid.iter().zip(map) {
        let s = v.map(|v| format!("{v:+}")).unwrap_or_else(|| "singular".into());
        println!("x1 = {:+3}: {s}", c[0]);
    }
    Ok(())
}
