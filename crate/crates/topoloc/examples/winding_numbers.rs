//! Winding numbers of chiral models in one and three dimensions.

use topoloc::kspace::{winding_number, winding_number_3d, BlochMap};
use topoloc::models::{chiral_3d, ssh};

fn main() -> topoloc::Result<()> {
    for (v, w) in [(0.5, 1.0), (2.0, 1.0), (1.0, 0.5)] {
        let n = winding_number(&BlochMap::new(&ssh(v, w, 0.0))?, 0, 64)?;
        println!("SSH v={v} w={w}: winding {n}");
    }
    // two-cell hopping gives winding 2
    println!("SSH with w2=2: winding {}", winding_number(&BlochMap::new(&ssh(0.1, 0.5, 2.0))?, 0, 64)?);
    for m in [-2.0, 2.0, 5.0] {
        println!("3d chiral m={m}: winding {}", winding_number_3d(&BlochMap::new(&chiral_3d(m))?, 16)?);
    }
    Ok(())
}
