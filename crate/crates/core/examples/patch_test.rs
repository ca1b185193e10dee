// Linear solutions are reproduced to round-off on every mesh family,
// including cells with hanging nodes.

use polyvem::driver::{error_norms, solve, ManufacturedProblem, SolveOptions};
use polyvem::mesh::{generate, MeshFamily, MeshFamilySpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let problem = ManufacturedProblem::linear(1.0, 2.0, -3.0);
    for family in MeshFamily::ALL {
        let mesh = generate(&MeshFamilySpec::new(family, 4))?;
        let sol = solve(&mesh, &problem, &SolveOptions::default())?;
        let vertex_err = mesh
            .vertices()
            .iter()
            .zip(&sol.dofs)
            .map(|(p, u)| ((problem.u)(*p) - u).abs())
            .fold(0.0, f64::max);
        let report = error_norms(&sol, &problem, 4)?;
        println!("{family:>15}: max vertex error {vertex_err:.1e}, H1 error {:.1e}", report.err_h1);
        assert!(vertex_err < 1e-10);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
