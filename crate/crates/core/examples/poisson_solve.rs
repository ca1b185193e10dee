// Solve -Δu = f on the unit square with u = sin(πx) sin(πy) and print the
// error in L² and the H¹ seminorm.

use polyvem::driver::{error_norms, solve, ManufacturedProblem, SolveOptions};
use polyvem::mesh::{generate, MeshFamily, MeshFamilySpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mesh = generate(&MeshFamilySpec::new(MeshFamily::PerturbedQuad, 16))?;
    let problem = ManufacturedProblem::sin_sin();
    let options = SolveOptions::default();

    let sol = solve(&mesh, &problem, &options)?;
    let report = error_norms(&sol, &problem, options.quad_order)?;
    println!(
        "{} cells, {} dofs, {} CG iterations",
        mesh.n_cells(),
        report.n_dof,
        report.cg_iterations
    );
    println!("h = {:.4}  L2 = {:.3e}  H1 = {:.3e}", report.h_max, report.err_l2, report.err_h1);

    // The projected solution is a linear polynomial per cell.
    let mid = (0..mesh.n_cells())
        .map(|c| sol.centroid_value(c))
        .fold(f64::NEG_INFINITY, f64::max);
    println!("max centroid value {mid:.4} (exact peak 1)");
    assert!(report.err_h1 < 0.2);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
