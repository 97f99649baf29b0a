//! Periodic table of topological insulators and superconductors.

use topoloc::kspace::{classification_lookup, SymmetryClass};

fn main() {
    print!("{:6}", "class");
    for d in 0..8 {
        print!("{d:>5}");
    }
    println!();
    for caz in SymmetryClass::ALL {
        print!("{:6}", format!("{caz:?}"));
        for d in 0..8 {
            print!("{:>5}", classification_lookup(caz, d).to_string());
        }
        println!();
    }
}
