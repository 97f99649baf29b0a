//! Chern number of the Haldane model across the mass axis.

use topoloc::kspace::{chern_number, BlochMap};
use topoloc::models::{haldane, haldane_critical_mass};

fn main() -> topoloc::Result<()> {
    let (t2, phi) = (1.0 / 3.0, std::f64::consts::FRAC_PI_2);
    println!("critical mass {:.4}", haldane_critical_mass(t2, phi));
    for i in 0..=8 {
        let m = 0.25 * i as f64;
        let bloch = BlochMap::new(&haldane(1.0, t2, phi, m))?;
        match chern_number(&bloch, 0.0, (0, 1), 32) {
            Ok(c) => println!("M = {m:4.2}  C = {c:+}"),
            Err(e) => println!("M = {m:4.2}  {e}"),
        }
    }
    Ok(())
}
