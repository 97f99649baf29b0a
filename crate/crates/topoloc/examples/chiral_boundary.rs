//! Chirality-weighted count of boundary zero modes of open SSH chains.

use topoloc::bbc::{chiral_boundary_index, half_space_restrict};
use topoloc::models::{ssh, Boundary, LatticeGeometry};

fn main() -> topoloc::Result<()> {
    let g = LatticeGeometry::uniform(vec![40], 2, Boundary::Open)?;
    for (v, w) in [(1.0, 2.0), (2.0, 1.0), (0.3, 1.0)] {
        let hs = half_space_restrict(&ssh(v, w, 0.0), &g, 0, 0)?;
        println!("v={v} w={w}: left-edge index {}", chiral_boundary_index(&hs, 1e-6)?);
    }
    Ok(())
}
