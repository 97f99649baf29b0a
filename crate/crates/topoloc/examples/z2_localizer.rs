//! Z2 localizer signs: Pfaffian for d=2 with odd time reversal, determinant for d=3.

use topoloc::localizer::{skew_localizer_z2_d2, z2_det_d3, LocalizerSpec, Variant};
use topoloc::models::{build_hamiltonian, kane_mele, position_operators, wilson_dirac_3d, Boundary, LatticeGeometry};

fn main() -> topoloc::Result<()> {
    let g = LatticeGeometry::uniform(vec![12, 12], 4, Boundary::Open)?;
    let x = position_operators(&g);
    let spec = LocalizerSpec::new(Variant::SkewD2Trs, 0.2, 5.0)?;
    for lv in [0.0, 1.0, 3.0] {
        let model = kane_mele(1.0, 1.0 / 3.0, 0.1, lv);
        let h = build_hamiltonian(&model, &g, 0)?;
        let trs = &model.symmetries.trs.as_ref().unwrap().matrix;
        println!("Kane-Mele lv={lv}: sgn Pf = {:+}", skew_localizer_z2_d2(&h, trs, &x, &spec)?);
    }

    let g = LatticeGeometry::uniform(vec![6, 6, 6], 4, Boundary::Open)?;
    let x = position_operators(&g);
    let spec = LocalizerSpec::new(Variant::DetD3, 0.3, 10.0)?;
    for m in [1.5, 2.5, 3.5, 4.5] {
        let model = wilson_dirac_3d(m);
        let h = build_hamiltonian(&model, &g, 0)?;
        let trs = &model.symmetries.trs.as_ref().unwrap().matrix;
        let (s, rel) = z2_det_d3(&h, trs, &x, &spec)?;
        println!("Wilson-Dirac m={m}: sgn det = {s:+}  |Im|/|det| = {rel:.1e}");
    }
    Ok(())
}
