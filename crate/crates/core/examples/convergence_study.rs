// Convergence table for the smooth problem on the hexagonal family.

use polyvem::driver::{convergence_study, ManufacturedProblem, SolveOptions};
use polyvem::mesh::{MeshFamily, MeshFamilySpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let spec = MeshFamilySpec::new(MeshFamily::Hexagon, 4);
    let table = convergence_study(&spec, 3, &ManufacturedProblem::sin_sin(), &SolveOptions::default())?;
    print!("{}", table.to_csv(false));

    let (l2, h1) = table.final_eoc();
    println!("final rates: L2 {:.2}, H1 {:.2}", l2.unwrap_or(f64::NAN), h1.unwrap_or(f64::NAN));
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
