//! Ribbon spectra and chiral or helical edge crossings.

use topoloc::bbc::{edge_spectrum, half_space_restrict};
use topoloc::models::{haldane_benchmark, kane_mele, Boundary, LatticeGeometry, TightBindingModel};

fn strip(model: &TightBindingModel) -> topoloc::Result<LatticeGeometry> {
    LatticeGeometry::new(vec![4, 20], model.orbitals, vec![Boundary::Periodic, Boundary::Open])
}

fn main() -> topoloc::Result<()> {
    for m in [0.0, 2.0] {
        let model = haldane_benchmark(m);
        let es = edge_spectrum(&half_space_restrict(&model, &strip(&model)?, 1, 0)?, 300)?;
        println!("Haldane M={m}: lower edge {:+}, upper edge {:+}", es.crossings_lower, es.crossings_upper);
    }
    for lv in [0.0, 3.0] {
        let model = kane_mele(1.0, 1.0 / 3.0, 0.1, lv);
        let es = edge_spectrum(&half_space_restrict(&model, &strip(&model)?, 1, 0)?, 300)?;
        println!("Kane-Mele lv={lv}: {} Kramers pairs on the lower edge", es.kramers_pairs_lower());
    }
    Ok(())
}
