// Local matrices on a pentagon: projector identities and the consistency
// of the stiffness matrix with linear polynomials.

use polyvem::cli::dump_element;
use polyvem::{LocalElementMatrices, Point2, Polygon, StabilizationPolicy};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let poly = Polygon::new(vec![
        Point2::new(0.0, 0.0),
        Point2::new(1.1, 0.1),
        Point2::new(1.3, 0.9),
        Point2::new(0.4, 1.4),
        Point2::new(-0.2, 0.7),
    ])?;
    let el = LocalElementMatrices::new(&poly, StabilizationPolicy::Unit)?;
    print!("{}", dump_element(0, &el));

    let pd = el.pi_star.matmul(&el.d);
    let pi2 = el.pi.matmul(&el.pi);
    println!("|Pi* D - I| = {:.1e}", pd.sub(&polyvem::DenseMatrix::identity(3)).max_abs());
    println!("|Pi Pi - Pi| = {:.1e}", pi2.sub(&el.pi).max_abs());
    println!("consistency residual = {:.1e}", el.consistency_residual());
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
