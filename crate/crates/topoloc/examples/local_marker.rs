//! Local Chern marker of a disordered Haldane flake, averaged over seeds.

use topoloc::models::{build_hamiltonian, haldane_benchmark, Boundary, DisorderChannel, LatticeGeometry};
use topoloc::realspace::{central_region, fermi_projection, local_chern_marker};

fn main() -> topoloc::Result<()> {
    let g = LatticeGeometry::uniform(vec![20, 20], 2, Boundary::Open)?;
    let region = central_region(&g, 6);
    for w in [0.0, 0.5, 1.0, 3.0] {
        let model = haldane_benchmark(0.0).with_disorder(w, DisorderChannel::ScalarOnsite);
        let seeds = if w == 0.0 { 1 } else { 6 };
        let mut sum = 0.0;
        for seed in 0..seeds {
            let p = fermi_projection(&build_hamiltonian(&model, &g, seed)?, 0.0)?;
            sum += local_chern_marker(&p, &g, &region, 4)?;
        }
        println!("W = {w}: marker {:.6}", sum / seeds as f64);
    }
    Ok(())
}
