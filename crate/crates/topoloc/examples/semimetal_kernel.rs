//! Approximate kernel of the localizer counts the Dirac points of graphene.

use topoloc::localizer::{semimetal_kernel_count, LocalizerSpec, Variant};
use topoloc::models::{build_hamiltonian, haldane, haldane_benchmark, position_operators, Boundary, LatticeGeometry};

fn main() -> topoloc::Result<()> {
    let spec = LocalizerSpec::new(Variant::Even, 0.02, 100.0)?;
    let graphene = haldane(1.0, 0.0, 0.0, 0.0);
    for (name, model) in [("graphene", graphene.clone()), ("graphene x2", graphene.direct_sum(&graphene)), ("gapped Haldane", haldane_benchmark(2.0))] {
        let g = LatticeGeometry::uniform(vec![16, 16], model.orbitals, Boundary::Open)?;
        let h = build_hamiltonian(&model, &g, 0)?;
        let x = position_operators(&g);
        println!("{name}: {} near-zero eigenvalues", semimetal_kernel_count(&h, &x, &spec, None)?);
    }
    Ok(())
}
