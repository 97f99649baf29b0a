//! Odd localizer of SSH chains compared with the winding number.

use topoloc::kspace::{winding_number, BlochMap};
use topoloc::localizer::{localizer_report, LocalizerSpec, Variant};
use topoloc::models::{build_hamiltonian, position_operators, ssh, Boundary, LatticeGeometry};

fn main() -> topoloc::Result<()> {
    let g = LatticeGeometry::uniform(vec![60], 2, Boundary::Open)?;
    let x = position_operators(&g);
    let spec = LocalizerSpec::new(Variant::Odd, 0.05, 25.0)?;
    for ratio in [0.5, 0.8, 1.25, 2.0] {
        let model = ssh(ratio, 1.0, 0.0);
        let h = build_hamiltonian(&model, &g, 0)?;
        let r = localizer_report(&h, &x, &model.symmetries, &spec, false)?;
        let w = winding_number(&BlochMap::new(&model)?, 0, 64)?;
        println!("v/w = {ratio:4}: localizer {}  winding {w}", r.value);
    }
    Ok(())
}
