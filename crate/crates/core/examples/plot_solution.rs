// Writes an SVG of the hexagonal mesh colored by the discrete solution.

use polyvem::driver::{solve, ManufacturedProblem, SolveOptions};
use polyvem::mesh::{generate, MeshFamily, MeshFamilySpec};
use polyvem::plot::SvgScene;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mesh = generate(&MeshFamilySpec::new(MeshFamily::Hexagon, 8))?;
    let sol = solve(&mesh, &ManufacturedProblem::sin_sin(), &SolveOptions::default())?;
    let values: Vec<f64> = (0..mesh.n_cells()).map(|c| sol.centroid_value(c)).collect();
    let svg = SvgScene::from_mesh(&mesh, Some(&values)).render();

    let path = std::env::temp_dir().join("polyvem_hexagon_sinsin.svg");
    std::fs::write(&path, &svg)?;
    println!("wrote {} ({} bytes)", path.display(), svg.len());
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
