// Generates each mesh family, validates it and round-trips it through JSON.

use polyvem::mesh::{generate, MeshFamily, MeshFamilySpec, PolygonalMesh};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for family in MeshFamily::ALL {
        let mesh = generate(&MeshFamilySpec::new(family, 4))?;
        let report = mesh.validate();
        assert!(report.is_valid(), "{report}");

        let mut sides = [0usize; 8];
        for cell in mesh.cells() {
            sides[cell.len().min(7)] += 1;
        }
        let shapes: Vec<String> = sides
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(k, n)| format!("{n}x{k}-gon"))
            .collect();
        println!(
            "{family:>15}: {:>3} vertices {:>3} cells  h = {:.4}  [{}]",
            mesh.n_vertices(),
            mesh.n_cells(),
            mesh.h_max(),
            shapes.join(", ")
        );

        let back = PolygonalMesh::from_json(&mesh.to_json())?;
        assert_eq!(back.vertices(), mesh.vertices());
        assert_eq!(back.cells(), mesh.cells());
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
