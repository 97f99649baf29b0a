//! Exponential-map winding and quantized edge current on a Haldane strip.

use topoloc::bbc::{boundary_winding_value, edge_current, edge_current_k, exp_map_unitary, half_space_restrict, Bump, ExpStep};
use topoloc::models::{haldane_benchmark, Boundary, LatticeGeometry};

fn main() -> topoloc::Result<()> {
    let g = LatticeGeometry::new(vec![40, 20], 2, vec![Boundary::Periodic, Boundary::Open])?;
    for m in [0.0, 2.0] {
        let hs = half_space_restrict(&haldane_benchmark(m), &g, 1, 0)?;
        let u = exp_map_unitary(&hs, ExpStep::default())?;
        println!("M={m}: gap {:?}, boundary winding {:.6}", hs.delta, boundary_winding_value(&u, &hs)?);
        let bumps = [Bump::middle_third(hs.delta), Bump::new(hs.delta.0 * 0.6, hs.delta.1 * 0.2), Bump::new(hs.delta.0 * 0.2, hs.delta.1 * 0.5)];
        for b in bumps {
            println!(
                "    bump ({:+.3}, {:+.3}): current {:.4} on the strip, {:.6} in momentum space",
                b.lo,
                b.hi,
                edge_current(&hs, b)?,
                edge_current_k(&hs, b, 2000)?
            );
        }
    }
    Ok(())
}
