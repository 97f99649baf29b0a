//! Spectral flow through the gap as a unit flux tube is threaded.

use topoloc::bbc::flux_spectral_flow;
use topoloc::models::{haldane_benchmark, Boundary, LatticeGeometry};

fn main() -> topoloc::Result<()> {
    let g = LatticeGeometry::uniform(vec![16, 16], 2, Boundary::Open)?;
    for m in [0.0, 2.0] {
        let t = flux_spectral_flow(&haldane_benchmark(m), &g, 0.0, 64)?;
        println!("M={m}: flux-bound flow {:+}, edge flow {:+}, reference {:.2}", t.flow, t.edge_flow, t.reference);
        for c in &t.crossings {
            println!("    alpha {:.3}  direction {:+}  weight near flux {:.2}", c.alpha, c.direction, c.bound_weight);
        }
    }
    Ok(())
}
