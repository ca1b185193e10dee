//! Acceptance suite. Every criterion prints one PASS/FAIL line followed by
//! the measured quantities, then asserts.

use std::process::Command;
use std::time::{Duration, Instant};

use polyvem::driver::{convergence_study, error_norms, solve, ManufacturedProblem, SolveOptions};
use polyvem::linalg::{cg_solve, sym_eigen, DenseMatrix, SparseSymMatrix};
use polyvem::mesh::{generate, MeshFamily, MeshFamilySpec, PolygonalMesh, SplitMix64};
use polyvem::oracle::{consistency_residual, harmonic_stiffness, p1_global_solve, p1_stiffness, stability_table};
use polyvem::{LocalElementMatrices, Point2, Polygon, StabilizationPolicy};

fn report(id: u32, name: &str, ok: bool, detail: &str) {
    println!("[{}] criterion {id}: {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id} ({name}) failed: {detail}");
}

fn mesh(family: MeshFamily, n: usize) -> PolygonalMesh {
    generate(&MeshFamilySpec::new(family, n)).unwrap()
}

fn elements(m: &PolygonalMesh) -> Vec<LocalElementMatrices> {
    (0..m.n_cells())
        .map(|c| LocalElementMatrices::new(&m.cell_polygon(c).unwrap(), StabilizationPolicy::Unit).unwrap())
        .collect()
}

#[test]
fn criterion_1_patch_test() {
    let problem = ManufacturedProblem::patch();
    let (mut worst_v, mut worst_h1, mut slowest) = (0.0f64, 0.0f64, Duration::ZERO);
    for family in MeshFamily::ALL {
        let start = Instant::now();
        let m = mesh(family, 4);
        let sol = solve(&m, &problem, &SolveOptions::default()).unwrap();
        let rep = error_norms(&sol, &problem, 4).unwrap();
        let elapsed = start.elapsed();
        let v = m
            .vertices()
            .iter()
            .zip(&sol.dofs)
            .map(|(p, u)| ((problem.u)(*p) - u).abs())
            .fold(0.0, f64::max);
        println!("  {family}: vertex {v:.2e}, H1 {:.2e}, {elapsed:?}", rep.err_h1);
        worst_v = worst_v.max(v);
        worst_h1 = worst_h1.max(rep.err_h1);
        slowest = slowest.max(elapsed);
    }
    let ok = worst_v <= 1e-10 && worst_h1 <= 1e-10 && slowest < Duration::from_secs(1);
    report(
        1,
        "patch test",
        ok,
        &format!("max vertex error {worst_v:.2e}, max H1 error {worst_h1:.2e}, slowest family {slowest:?}"),
    );
}

#[test]
fn criterion_2_triangle_coincidence() {
    let m = mesh(MeshFamily::Triangle, 8);
    let mut local = 0.0f64;
    for (c, el) in elements(&m).iter().enumerate() {
        let p = m.cell_points(c);
        let k1 = p1_stiffness(p[0], p[1], p[2]).unwrap();
        local = local.max(el.k.sub(&k1).max_abs());
    }
    let opts = SolveOptions::default();
    let problem = ManufacturedProblem::sin_sin();
    let vem = solve(&m, &problem, &opts).unwrap().dofs;
    let fem = p1_global_solve(&m, &problem, &opts).unwrap();
    let global = vem.iter().zip(&fem).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    report(
        2,
        "triangle coincidence",
        local <= 1e-12 && global <= 1e-10,
        &format!("local K difference {local:.2e}, global dof difference {global:.2e}"),
    );
}

#[test]
fn criterion_3_projector_identities() {
    let (mut worst_pd, mut worst_idem, mut cells) = (0.0f64, 0.0f64, 0);
    for family in MeshFamily::ALL {
        for n in [2, 4, 8] {
            for el in elements(&mesh(family, n)) {
                worst_pd = worst_pd.max(el.pi_star.matmul(&el.d).sub(&DenseMatrix::identity(3)).max_abs());
                worst_idem = worst_idem.max(el.pi.matmul(&el.pi).sub(&el.pi).max_abs());
                cells += 1;
            }
        }
    }
    report(
        3,
        "projector identities",
        worst_pd <= 1e-10 && worst_idem <= 1e-12,
        &format!("{cells} cells, |Pi* D - I| {worst_pd:.2e}, |Pi^2 - Pi| {worst_idem:.2e}"),
    );
}

fn numerical_rank(m: &DenseMatrix) -> (usize, DenseMatrix, Vec<f64>) {
    let e = sym_eigen(m).unwrap();
    let norm = m.frobenius_norm();
    let rank = e.values.iter().filter(|&&v| v > 1e-10 * norm).count();
    (rank, e.vectors, e.values)
}

#[test]
fn criterion_4_rank_structure() {
    let mut failures = Vec::new();
    let mut checked = 0;
    for family in MeshFamily::ALL {
        let m = mesh(family, 4);
        for (c, el) in elements(&m).iter().enumerate() {
            let n = el.n_vertices();
            if n >= 4 {
                let (rank, _, _) = numerical_rank(&el.k_consistency);
                if rank != 2 {
                    failures.push(format!("{family} cell {c}: rank K_c = {rank}"));
                }
            }
            let (rank, vectors, _) = numerical_rank(&el.k);
            if rank != n - 1 {
                failures.push(format!("{family} cell {c}: rank K = {rank}, N = {n}"));
            }
            // smallest eigenvalue comes first; its vector must be parallel to 1
            let v0 = vectors.column(0);
            let mean = v0.iter().sum::<f64>() / n as f64;
            let spread = v0.iter().map(|x| (x - mean).abs()).fold(0.0, f64::max);
            if spread > 1e-8 {
                failures.push(format!("{family} cell {c}: kernel not constant ({spread:.1e})"));
            }
            checked += 1;
        }
    }
    report(
        4,
        "rank structure",
        failures.is_empty(),
        &if failures.is_empty() {
            format!("{checked} cells checked")
        } else {
            failures.join("; ")
        },
    );
}

#[test]
fn criterion_5_convergence_rates() {
    let start = Instant::now();
    let problem = ManufacturedProblem::sin_sin();
    let mut ok = true;
    let mut lines = Vec::new();
    for family in [
        MeshFamily::Quad,
        MeshFamily::Triangle,
        MeshFamily::HangingNode,
        MeshFamily::PerturbedQuad,
    ] {
        let table = convergence_study(&MeshFamilySpec::new(family, 4), 4, &problem, &SolveOptions::default()).unwrap();
        let (l2, h1) = table.final_eoc();
        let (l2, h1) = (l2.unwrap_or(f64::NAN), h1.unwrap_or(f64::NAN));
        ok &= (0.85..=1.15).contains(&h1) && (1.7..=2.3).contains(&l2);
        lines.push(format!("{family} eoc_L2 {l2:.3} eoc_H1 {h1:.3}"));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(60);
    report(5, "convergence rates", ok, &format!("{}; total {elapsed:?}", lines.join(", ")));
}

#[test]
fn criterion_6_stability_sandwich() {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut tri_dev = 0.0f64;
    for family in MeshFamily::ALL {
        let rows = stability_table(&mesh(family, 4), StabilizationPolicy::Unit, 3).unwrap();
        for r in &rows {
            lo = lo.min(r.alpha_lower);
            hi = hi.max(r.alpha_upper);
            assert!(r.alpha_lower <= r.alpha_upper);
            if family == MeshFamily::Triangle {
                tri_dev = tri_dev.max((r.alpha_lower - 1.0).abs()).max((r.alpha_upper - 1.0).abs());
            }
        }
    }
    report(
        6,
        "stability sandwich",
        lo >= 0.02 && hi <= 50.0 && tri_dev <= 1e-6,
        &format!("alpha_lower min {lo:.4}, alpha_upper max {hi:.4}, triangle deviation from 1 {tri_dev:.1e}"),
    );
}

#[test]
fn criterion_7_oracle_consistency_monotone() {
    let poly = Polygon::new(vec![
        Point2::new(0.0, 0.0),
        Point2::new(1.1, 0.1),
        Point2::new(1.3, 0.9),
        Point2::new(0.4, 1.4),
        Point2::new(-0.2, 0.7),
    ])
    .unwrap();
    let el = LocalElementMatrices::new(&poly, StabilizationPolicy::Unit).unwrap();
    let residuals: Vec<f64> = [1, 2, 3]
        .iter()
        .map(|&l| consistency_residual(&el.k, &harmonic_stiffness(&poly, l).unwrap().matrix, &el.d))
        .collect();
    let scale = el.k.max_abs();
    println!(
        "  all residuals at round-off relative to |K| = {scale:.3}: {}",
        residuals.iter().all(|r| *r < 1e-12 * scale)
    );
    let monotone = residuals.windows(2).all(|w| w[1] < w[0]);
    report(
        7,
        "oracle consistency residual decreases over levels 1, 2, 3",
        monotone,
        &format!("residuals {:.2e}, {:.2e}, {:.2e}", residuals[0], residuals[1], residuals[2]),
    );
}

fn bin_output(args: &[&str], out: &std::path::Path) -> Vec<u8> {
    let status = Command::new(env!("CARGO_BIN_EXE_polyvem"))
        .args(args)
        .arg("--out")
        .arg(out)
        .status()
        .unwrap();
    assert!(status.success(), "{args:?}");
    std::fs::read(out).unwrap()
}

#[test]
fn criterion_8_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let mut round_trip = true;
    for family in MeshFamily::ALL {
        let m = mesh(family, 4);
        let back = PolygonalMesh::from_json(&m.to_json()).unwrap();
        round_trip &= back.vertices() == m.vertices() && back.cells() == m.cells() && back.to_json() == m.to_json();
    }

    let csv_args = ["study", "--family", "perturbed_quad", "--levels", "3", "--problem", "sinsin"];
    let svg_args = ["plot", "--family", "hexagon", "--n", "4", "--problem", "sinsin"];
    let csv_same = bin_output(&csv_args, &dir.path().join("a.csv")) == bin_output(&csv_args, &dir.path().join("b.csv"));
    let svg_same = bin_output(&svg_args, &dir.path().join("a.svg")) == bin_output(&svg_args, &dir.path().join("b.svg"));

    // random SPD: A = MᵀM + I
    let mut rng = SplitMix64::new(7);
    let n = 50;
    let mm = DenseMatrix::from_fn(n, n, |_, _| rng.next_signed());
    let a = mm.transpose().matmul(&mm).add(&DenseMatrix::identity(n));
    let triplets: Vec<_> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| (i, j, a[(i, j)])).collect();
    let sparse = SparseSymMatrix::from_triplets(n, &triplets).unwrap();
    let b: Vec<f64> = (0..n).map(|_| rng.next_signed()).collect();
    let sol = cg_solve(&sparse, &b, 1e-12, 150).unwrap();
    let r = a.matvec(&sol.x).iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let rel = r / b.iter().map(|x| x * x).sum::<f64>().sqrt();

    report(
        8,
        "infrastructure determinism",
        round_trip && csv_same && svg_same && rel <= 1e-12 && sol.iterations <= 150,
        &format!(
            "JSON round-trip {round_trip}, CSV identical {csv_same}, SVG identical {svg_same}, CG {} iterations relative residual {rel:.1e}",
            sol.iterations
        ),
    );
}
