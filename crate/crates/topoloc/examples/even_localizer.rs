//! Half-signature of the even spectral localizer with its tuning certificate.

use topoloc::localizer::{localizer_report, LocalizerSpec, Shape, Variant};
use topoloc::models::{build_hamiltonian, haldane_benchmark, position_operators, Boundary, LatticeGeometry};

fn main() -> topoloc::Result<()> {
    let g = LatticeGeometry::uniform(vec![20, 20], 2, Boundary::Open)?;
    let x = position_operators(&g);
    for m in [0.0, 2.0] {
        let model = haldane_benchmark(m);
        let h = build_hamiltonian(&model, &g, 0)?;
        for (kappa, rho, shape) in [(0.2, 8.0, Shape::Square), (0.1, 9.0, Shape::Ball)] {
            let spec = LocalizerSpec::new(Variant::Even, kappa, rho)?.with_shape(shape);
            let r = localizer_report(&h, &x, &model.symmetries, &spec, true)?;
            println!(
                "M={m} kappa={kappa} rho={rho} {shape:?}: sig/2 = {:+}  gap_L = {:.3e}  tuning_ok = {}",
                r.value,
                r.localizer_gap.unwrap_or(f64::NAN),
                r.tuning.tuning_ok
            );
        }
    }
    Ok(())
}
