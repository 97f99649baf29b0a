//! Fredholm index pairings on finite periodic samples.

use topoloc::models::{build_hamiltonian, haldane_benchmark, kane_mele, position_operators, ssh, Boundary, LatticeGeometry};
use topoloc::realspace::{chiral_off_diagonal, dirac_data, fermi_projection, index_eae, index_pfp, z2_nullity_parity, Parity};

fn main() -> topoloc::Result<()> {
    for m in [0.0, 2.0] {
        let model = haldane_benchmark(m);
        let g = LatticeGeometry::uniform(vec![16, 16], 2, Boundary::Periodic)?;
        let p = fermi_projection(&build_hamiltonian(&model, &g, 0)?, 0.0)?;
        let dd = dirac_data(&position_operators(&g), Parity::Even)?;
        println!("Haldane M={m}: Ind(PFP) = {}", index_pfp(&p, &dd)?);
    }

    let model = ssh(1.0, 2.0, 0.0);
    let g = LatticeGeometry::uniform(vec![60], 2, Boundary::Periodic)?;
    let (a, x) = chiral_off_diagonal(&build_hamiltonian(&model, &g, 0)?, &model, &g)?;
    println!("SSH v=1 w=2: Ind(EAE) = {}", index_eae(&a, &dirac_data(&x, Parity::Odd)?)?);

    for lv in [0.0, 3.0] {
        let model = kane_mele(1.0, 1.0 / 3.0, 0.1, lv);
        let g = LatticeGeometry::uniform(vec![12, 12], 4, Boundary::Periodic)?;
        let p = fermi_projection(&build_hamiltonian(&model, &g, 0)?, 0.0)?;
        let dd = dirac_data(&position_operators(&g), Parity::Even)?;
        println!("Kane-Mele lv={lv}: nullity parity {}", z2_nullity_parity(&p, &dd)?);
    }
    Ok(())
}
