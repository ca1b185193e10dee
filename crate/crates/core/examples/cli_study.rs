// Drives the command-line interface in-process.

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let status = polyvem::cli::run([
        "polyvem", "study", "--family", "triangle", "--n", "4", "--levels", "3", "--problem", "quadratic",
    ]);
    if status != 0 {
        return Err(format!("study exited with status {status}").into());
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
