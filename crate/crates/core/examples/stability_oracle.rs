// Compares the virtual element stiffness with the harmonic reference energy
// on every cell of a hanging-node mesh, for both stabilization choices.

use polyvem::mesh::{generate, MeshFamily, MeshFamilySpec};
use polyvem::oracle::{stability_table, DEFAULT_LEVELS};
use polyvem::StabilizationPolicy;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mesh = generate(&MeshFamilySpec::new(MeshFamily::HangingNode, 2))?;
    for policy in [StabilizationPolicy::Unit, StabilizationPolicy::Trace] {
        let rows = stability_table(&mesh, policy, DEFAULT_LEVELS)?;
        println!("{policy:?}");
        for r in &rows {
            println!(
                "  cell {} (N = {}): alpha in [{:.3}, {:.3}], residual {:.1e}",
                r.cell, r.n_vertices, r.alpha_lower, r.alpha_upper, r.consistency_residual
            );
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
