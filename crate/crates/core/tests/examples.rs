#[allow(dead_code)]
mod poisson_solve {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/poisson_solve.rs"));
}

#[test]
fn poisson_solve_example_runs() {
    poisson_solve::run_example().expect("poisson_solve example should run");
}

#[allow(dead_code)]
mod patch_test {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/patch_test.rs"));
}

#[test]
fn patch_test_example_runs() {
    patch_test::run_example().expect("patch_test example should run");
}

#[allow(dead_code)]
mod convergence_study {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/convergence_study.rs"));
}

#[test]
fn convergence_study_example_runs() {
    convergence_study::run_example().expect("convergence_study example should run");
}

#[allow(dead_code)]
mod mesh_families {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/mesh_families.rs"));
}

#[test]
fn mesh_families_example_runs() {
    mesh_families::run_example().expect("mesh_families example should run");
}

#[allow(dead_code)]
mod element_matrices {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/element_matrices.rs"));
}

#[test]
fn element_matrices_example_runs() {
    element_matrices::run_example().expect("element_matrices example should run");
}

#[allow(dead_code)]
mod stability_oracle {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/stability_oracle.rs"));
}

#[test]
fn stability_oracle_example_runs() {
    stability_oracle::run_example().expect("stability_oracle example should run");
}

#[allow(dead_code)]
mod plot_solution {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/plot_solution.rs"));
}

#[test]
fn plot_solution_example_runs() {
    plot_solution::run_example().expect("plot_solution example should run");
}

#[allow(dead_code)]
mod cli_study {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/cli_study.rs"));
}

#[test]
fn cli_study_example_runs() {
    cli_study::run_example().expect("cli_study example should run");
}
