//! Global assembly, Dirichlet elimination, the Poisson solve, error norms
//! and convergence studies.
//!
//! The reported numerical solution is the per-cell projection Π*u_h: a
//! linear polynomial on every cell, computed from the vertex values alone.
//! Errors are broken norms of u − Π*u_h.

use std::fmt::Write as _;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::element::{local_load, ElementError, LocalElementMatrices, ScaledMonomials, StabilizationPolicy};
use crate::geometry::{GeometryError, Point2, QuadratureRule};
use crate::linalg::{cg_solve, DenseMatrix, LinalgError, SparseSymMatrix};
use crate::mesh::{generate, MeshError, MeshFamilySpec, PolygonalMesh, ValidationReport};

#[derive(Debug, Error)]
pub enum DriverError {
    #[error("cell {cell}: {source}")]
    Element { cell: usize, source: ElementError },
    #[error("cell {cell}: {source}")]
    Geometry { cell: usize, source: GeometryError },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("mesh has no interior vertices; the solution is the boundary lift")]
    EmptyInterior { lift: Vec<f64> },
    #[error("invalid mesh:\n{0}")]
    InvalidMesh(ValidationReport),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("a convergence study needs at least 2 levels, got {0}")]
    TooFewLevels(usize),
}

type ScalarField = Arc<dyn Fn(Point2) -> f64 + Send + Sync>;
type VectorField = Arc<dyn Fn(Point2) -> Point2 + Send + Sync>;

/// A Poisson problem −Δu = f on the unit square with u = g on the boundary,
/// together with its exact solution.
#[derive(Clone)]
pub struct ManufacturedProblem {
    pub name: String,
    pub u: ScalarField,
    pub grad_u: VectorField,
    pub f: ScalarField,
    pub g: ScalarField,
}

impl std::fmt::Debug for ManufacturedProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ManufacturedProblem")
            .field("name", &self.name)
            .finish_non_exhaustive()
    }
}

impl ManufacturedProblem {
    /// Builds a problem whose Dirichlet data is the trace of `u`.
    pub fn new(
        name: impl Into<String>,
        u: impl Fn(Point2) -> f64 + Send + Sync + 'static,
        grad_u: impl Fn(Point2) -> Point2 + Send + Sync + 'static,
        f: impl Fn(Point2) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let u: ScalarField = Arc::new(u);
        Self {
            name: name.into(),
            g: u.clone(),
            u,
            grad_u: Arc::new(grad_u),
            f: Arc::new(f),
        }
    }

    /// u = a + b x + c y.
    pub fn linear(a: f64, b: f64, c: f64) -> Self {
        Self::new(
            "linear",
            move |p| a + b * p.x + c * p.y,
            move |_| Point2::new(b, c),
            |_| 0.0,
        )
    }

    /// u = 2 + 3x − y, reproduced exactly by the method.
    pub fn patch() -> Self {
        Self {
            name: "patch".into(),
            ..Self::linear(2.0, 3.0, -1.0)
        }
    }

    /// u = sin(πx) sin(πy), f = 2π² u.
    pub fn sin_sin() -> Self {
        use std::f64::consts::PI;
        Self::new(
            "sinsin",
            |p| (PI * p.x).sin() * (PI * p.y).sin(),
            |p| {
                Point2::new(
                    PI * (PI * p.x).cos() * (PI * p.y).sin(),
                    PI * (PI * p.x).sin() * (PI * p.y).cos(),
                )
            },
            |p| 2.0 * PI * PI * (PI * p.x).sin() * (PI * p.y).sin(),
        )
    }

    /// u = x² + y², f = −4.
    pub fn quadratic() -> Self {
        Self::new(
            "quadratic",
            |p| p.x * p.x + p.y * p.y,
            |p| Point2::new(2.0 * p.x, 2.0 * p.y),
            |_| -4.0,
        )
    }

    pub fn zero() -> Self {
        Self {
            name: "zero".into(),
            ..Self::linear(0.0, 0.0, 0.0)
        }
    }

    /// Largest central-difference mismatch of (∇u, f) against u at `points`,
    /// returned as (gradient error, Laplacian error).
    pub fn finite_difference_defect(&self, points: &[Point2]) -> (f64, f64) {
        let hg = 1e-6;
        let hl = 1e-4;
        let (mut eg, mut el) = (0.0f64, 0.0f64);
        for &p in points {
            let u = |dx: f64, dy: f64| (self.u)(Point2::new(p.x + dx, p.y + dy));
            let gx = (u(hg, 0.0) - u(-hg, 0.0)) / (2.0 * hg);
            let gy = (u(0.0, hg) - u(0.0, -hg)) / (2.0 * hg);
            let grad = (self.grad_u)(p);
            eg = eg.max((grad.x - gx).abs()).max((grad.y - gy).abs());
            let lap = (u(hl, 0.0) + u(-hl, 0.0) + u(0.0, hl) + u(0.0, -hl) - 4.0 * u(0.0, 0.0)) / (hl * hl);
            el = el.max(((self.f)(p) + lap).abs());
        }
        (eg, el)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub stabilization: StabilizationPolicy,
    /// Relative CG tolerance on ‖Ax − b‖₂ / ‖b‖₂.
    pub tol: f64,
    /// Order of the fan quadrature for loads and error integrals (2 or 4).
    pub quad_order: usize,
    /// CG iteration cap; `None` means 10 × number of unknowns.
    pub max_iter: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            stabilization: StabilizationPolicy::Unit,
            tol: 1e-12,
            quad_order: 4,
            max_iter: None,
        }
    }
}

/// Global stiffness and load before boundary conditions.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub matrix: SparseSymMatrix,
    pub rhs: Vec<f64>,
}

/// Scatters per-cell matrices and vertex-average loads into a global system.
///
/// `local` produces the stiffness of one cell; the load rule and the
/// quadrature are shared by every caller so different elements can be
/// compared on identical right-hand sides.
pub fn assemble_with<F>(
    mesh: &PolygonalMesh,
    source: &(dyn Fn(Point2) -> f64 + Send + Sync),
    quad_order: usize,
    mut local: F,
) -> Result<AssembledSystem, DriverError>
where
    F: FnMut(usize) -> Result<DenseMatrix, DriverError>,
{
    let nv = mesh.n_vertices();
    let mut triplets = Vec::new();
    let mut rhs = vec![0.0; nv];
    for (c, cell) in mesh.cells().iter().enumerate() {
        let k = local(c)?;
        for (a, &ga) in cell.iter().enumerate() {
            for (b, &gb) in cell.iter().enumerate() {
                triplets.push((ga, gb, k[(a, b)]));
            }
        }
        let poly = mesh
            .cell_polygon(c)
            .map_err(|source| DriverError::Geometry { cell: c, source })?;
        let quad = QuadratureRule::fan(&poly, quad_order)
            .map_err(|source| DriverError::Geometry { cell: c, source })?;
        for (&g, l) in cell.iter().zip(local_load(cell.len(), &quad, source)) {
            rhs[g] += l;
        }
    }
    let matrix = SparseSymMatrix::from_triplets(nv, &triplets)?;
    Ok(AssembledSystem { matrix, rhs })
}

/// Computes every cell's local matrices.
pub fn element_matrices(
    mesh: &PolygonalMesh,
    policy: StabilizationPolicy,
) -> Result<Vec<LocalElementMatrices>, DriverError> {
    (0..mesh.n_cells())
        .map(|c| {
            let poly = mesh
                .cell_polygon(c)
                .map_err(|source| DriverError::Geometry { cell: c, source })?;
            LocalElementMatrices::new(&poly, policy).map_err(|source| DriverError::Element { cell: c, source })
        })
        .collect()
}

/// Assembles the virtual element stiffness and load.
pub fn assemble(
    mesh: &PolygonalMesh,
    problem: &ManufacturedProblem,
    options: &SolveOptions,
) -> Result<(AssembledSystem, Vec<LocalElementMatrices>), DriverError> {
    let elements = element_matrices(mesh, options.stabilization)?;
    let system = assemble_with(mesh, problem.f.as_ref(), options.quad_order, |c| Ok(elements[c].k.clone()))?;
    Ok((system, elements))
}

/// The interior system left after eliminating boundary values.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub matrix: SparseSymMatrix,
    pub rhs: Vec<f64>,
    /// Global vertex index of every unknown.
    pub interior: Vec<usize>,
    /// Full-length vector holding g at boundary vertices and 0 elsewhere.
    pub lift: Vec<f64>,
}

impl ReducedSystem {
    /// Scatters interior values back into a full vertex vector.
    pub fn expand(&self, x: &[f64]) -> Vec<f64> {
        let mut full = self.lift.clone();
        for (&g, v) in self.interior.iter().zip(x) {
            full[g] = *v;
        }
        full
    }
}

/// Fixes boundary vertices to g and moves their coupling to the right-hand
/// side: b_I − A_IB g_B. The interior block stays symmetric.
pub fn apply_dirichlet(
    system: &AssembledSystem,
    mesh: &PolygonalMesh,
    g: &(dyn Fn(Point2) -> f64 + Send + Sync),
) -> Result<ReducedSystem, DriverError> {
    let nv = mesh.n_vertices();
    let mut lift = vec![0.0; nv];
    let mut local_index = vec![usize::MAX; nv];
    let mut interior = Vec::new();
    for v in 0..nv {
        if mesh.is_boundary_vertex(v) {
            lift[v] = g(mesh.vertices()[v]);
        } else {
            local_index[v] = interior.len();
            interior.push(v);
        }
    }
    if interior.is_empty() {
        return Err(DriverError::EmptyInterior { lift });
    }
    let mut triplets = Vec::new();
    let mut rhs: Vec<f64> = interior.iter().map(|&v| system.rhs[v]).collect();
    for (i, &gi) in interior.iter().enumerate() {
        for (gj, a) in system.matrix.row(gi) {
            if mesh.is_boundary_vertex(gj) {
                rhs[i] -= a * lift[gj];
            } else {
                triplets.push((i, local_index[gj], a));
            }
        }
    }
    let matrix = SparseSymMatrix::from_triplets(interior.len(), &triplets)?;
    Ok(ReducedSystem {
        matrix,
        rhs,
        interior,
        lift,
    })
}

/// Solves the reduced system, returning full vertex values and the CG
/// iteration count.
pub fn solve_reduced(
    system: &AssembledSystem,
    mesh: &PolygonalMesh,
    g: &(dyn Fn(Point2) -> f64 + Send + Sync),
    options: &SolveOptions,
) -> Result<(Vec<f64>, usize), DriverError> {
    let reduced = match apply_dirichlet(system, mesh, g) {
        Ok(r) => r,
        Err(DriverError::EmptyInterior { lift }) => return Ok((lift, 0)),
        Err(e) => return Err(e),
    };
    let max_iter = options.max_iter.unwrap_or(10 * reduced.interior.len().max(10));
    let sol = cg_solve(&reduced.matrix, &reduced.rhs, options.tol, max_iter)?;
    Ok((reduced.expand(&sol.x), sol.iterations))
}

/// Vertex values and per-cell projections of a discrete solution.
#[derive(Debug, Clone)]
pub struct DiscreteSolution<'m> {
    pub mesh: &'m PolygonalMesh,
    pub dofs: Vec<f64>,
    /// Monomial coefficients of Π*u_h on every cell.
    pub projections: Vec<[f64; 3]>,
    pub bases: Vec<ScaledMonomials>,
    pub cg_iterations: usize,
    pub wall_time: Duration,
}

impl DiscreteSolution<'_> {
    /// Π*u_h at the centroid of cell `c`, i.e. its constant coefficient.
    pub fn centroid_value(&self, c: usize) -> f64 {
        self.projections[c][0]
    }

    pub fn eval_in_cell(&self, c: usize, p: Point2) -> f64 {
        self.bases[c].eval_poly(&self.projections[c], p)
    }

    pub fn grad_in_cell(&self, c: usize) -> Point2 {
        self.bases[c].grad_poly(&self.projections[c])
    }
}

/// Assembles, eliminates the boundary, solves, and projects.
pub fn solve<'m>(
    mesh: &'m PolygonalMesh,
    problem: &ManufacturedProblem,
    options: &SolveOptions,
) -> Result<DiscreteSolution<'m>, DriverError> {
    let start = Instant::now();
    let report = mesh.validate();
    if !report.is_valid() {
        return Err(DriverError::InvalidMesh(report));
    }
    let (system, elements) = assemble(mesh, problem, options)?;
    let (dofs, cg_iterations) = solve_reduced(&system, mesh, problem.g.as_ref(), options)?;
    let projections = mesh
        .cells()
        .iter()
        .zip(&elements)
        .map(|(cell, e)| {
            let local: Vec<f64> = cell.iter().map(|&v| dofs[v]).collect();
            e.project(&local)
        })
        .collect();
    let bases = elements.iter().map(LocalElementMatrices::basis).collect();
    Ok(DiscreteSolution {
        mesh,
        dofs,
        projections,
        bases,
        cg_iterations,
        wall_time: start.elapsed(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub h_max: f64,
    pub n_dof: usize,
    pub err_l2: f64,
    pub err_h1: f64,
    pub cg_iterations: usize,
    #[serde(skip)]
    pub wall_time: Duration,
}

/// Broken L² and H¹-seminorm errors of u − Π*u_h.
pub fn error_norms(
    sol: &DiscreteSolution<'_>,
    problem: &ManufacturedProblem,
    quad_order: usize,
) -> Result<ErrorReport, DriverError> {
    let mesh = sol.mesh;
    let (mut l2, mut h1) = (0.0, 0.0);
    for c in 0..mesh.n_cells() {
        let poly = mesh
            .cell_polygon(c)
            .map_err(|source| DriverError::Geometry { cell: c, source })?;
        let quad = QuadratureRule::fan(&poly, quad_order)
            .map_err(|source| DriverError::Geometry { cell: c, source })?;
        let gh = sol.grad_in_cell(c);
        l2 += quad.integrate(|p| {
            let e = (problem.u)(p) - sol.eval_in_cell(c, p);
            e * e
        });
        h1 += quad.integrate(|p| {
            let e = (problem.grad_u)(p) - gh;
            e.dot(e)
        });
    }
    Ok(ErrorReport {
        h_max: mesh.h_max(),
        n_dof: mesh.n_vertices(),
        err_l2: l2.max(0.0).sqrt(),
        err_h1: h1.max(0.0).sqrt(),
        cg_iterations: sol.cg_iterations,
        wall_time: sol.wall_time,
    })
}

/// Errors below this are treated as round-off and get no convergence rate.
pub const EOC_NOISE_FLOOR: f64 = 1e-10;

/// log(e_prev / e_cur) / log(h_prev / h_cur), or `None` in the round-off
/// regime.
pub fn eoc(e_prev: f64, e_cur: f64, h_prev: f64, h_cur: f64) -> Option<f64> {
    if e_prev <= EOC_NOISE_FLOOR || e_cur <= EOC_NOISE_FLOOR {
        return None;
    }
    Some((e_prev / e_cur).ln() / (h_prev / h_cur).ln())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub level: usize,
    pub resolution: usize,
    #[serde(flatten)]
    pub report: ErrorReport,
    pub eoc_l2: Option<f64>,
    pub eoc_h1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub family: String,
    pub problem: String,
    pub rows: Vec<ConvergenceRow>,
}

pub const CSV_HEADER: &str = "level,h_max,n_dof,err_L2,err_H1,eoc_L2,eoc_H1,cg_iters,wall_ms";

impl ConvergenceTable {
    pub fn from_reports(family: &str, problem: &str, levels: Vec<(usize, ErrorReport)>) -> Self {
        let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(levels.len());
        for (level, (resolution, report)) in levels.into_iter().enumerate() {
            let (eoc_l2, eoc_h1) = match rows.last() {
                Some(prev) => (
                    eoc(prev.report.err_l2, report.err_l2, prev.report.h_max, report.h_max),
                    eoc(prev.report.err_h1, report.err_h1, prev.report.h_max, report.h_max),
                ),
                None => (None, None),
            };
            rows.push(ConvergenceRow {
                level,
                resolution,
                report,
                eoc_l2,
                eoc_h1,
            });
        }
        Self {
            family: family.into(),
            problem: problem.into(),
            rows,
        }
    }

    pub fn final_eoc(&self) -> (Option<f64>, Option<f64>) {
        self.rows.last().map_or((None, None), |r| (r.eoc_l2, r.eoc_h1))
    }

    /// CSV with one row per level. Missing rates are empty fields. Wall time
    /// is written as 0 unless `timing` is set, so that repeated runs produce
    /// identical bytes.
    pub fn to_csv(&self, timing: bool) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let wall = if timing {
                r.report.wall_time.as_millis()
            } else {
                0
            };
            let _ = writeln!(
                s,
                "{},{:.10e},{},{:.10e},{:.10e},{},{},{},{}",
                r.level,
                r.report.h_max,
                r.report.n_dof,
                r.report.err_l2,
                r.report.err_h1,
                opt(r.eoc_l2),
                opt(r.eoc_h1),
                r.report.cg_iterations,
                wall
            );
        }
        s
    }
}

/// Solves on `levels` meshes of the family, doubling the resolution each
/// time, and records errors and rates.
pub fn convergence_study(
    spec: &MeshFamilySpec,
    levels: usize,
    problem: &ManufacturedProblem,
    options: &SolveOptions,
) -> Result<ConvergenceTable, DriverError> {
    if levels < 2 {
        return Err(DriverError::TooFewLevels(levels));
    }
    let mut reports = Vec::with_capacity(levels);
    for level in 0..levels {
        let n = spec.resolution << level;
        let mesh = generate(&spec.with_resolution(n))?;
        let sol = solve(&mesh, problem, options)?;
        reports.push((n, error_norms(&sol, problem, options.quad_order)?));
    }
    Ok(ConvergenceTable::from_reports(
        spec.family.name(),
        &problem.name,
        reports,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sym_eigen;
    use crate::mesh::MeshFamily;

    fn mesh(family: MeshFamily, n: usize) -> PolygonalMesh {
        generate(&MeshFamilySpec::new(family, n)).unwrap()
    }

    #[test]
    fn problems_are_consistent() {
        let pts: Vec<Point2> = (0..20)
            .map(|k| {
                let t = k as f64 / 20.0;
                Point2::new(0.1 + 0.8 * t, 0.9 - 0.7 * t * t)
            })
            .collect();
        for p in [
            ManufacturedProblem::patch(),
            ManufacturedProblem::sin_sin(),
            ManufacturedProblem::quadratic(),
        ] {
            let (eg, el) = p.finite_difference_defect(&pts);
            assert!(eg <= 1e-6, "{} grad {eg}", p.name);
            assert!(el <= 1e-4 * 20.0, "{} lap {el}", p.name);
        }
    }

    #[test]
    fn single_cell_assembly_is_local_matrix() {
        let m = mesh(MeshFamily::Quad, 1);
        let (sys, el) = assemble(&m, &ManufacturedProblem::zero(), &SolveOptions::default()).unwrap();
        let dense = sys.matrix.to_dense();
        assert!(dense.sub(&el[0].k).max_abs() < 1e-15);
        assert_eq!(sys.rhs, vec![0.0; 4]);
    }

    #[test]
    fn quad_two_assembly() {
        let m = mesh(MeshFamily::Quad, 2);
        let (sys, el) = assemble(&m, &ManufacturedProblem::sin_sin(), &SolveOptions::default()).unwrap();
        assert_eq!(sys.matrix.dim(), 9);
        // centre vertex 4 is local index 2, 3, 1, 0 of cells 0..4
        let mut expected = vec![0.0; 9];
        for (c, cell) in m.cells().iter().enumerate() {
            let a = cell.iter().position(|&v| v == 4).unwrap();
            for (b, &gb) in cell.iter().enumerate() {
                expected[gb] += el[c].k[(a, b)];
            }
        }
        let row: Vec<f64> = (0..9).map(|j| sys.matrix.get(4, j)).collect();
        for (a, b) in row.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(row.iter().sum::<f64>().abs() < 1e-14);
        assert_eq!(sys.matrix.symmetry_defect(), 0.0);
    }

    #[test]
    fn global_kernel_is_constants() {
        for family in MeshFamily::ALL {
            let m = mesh(family, 3);
            let (sys, _) = assemble(&m, &ManufacturedProblem::zero(), &SolveOptions::default()).unwrap();
            let dense = sys.matrix.to_dense();
            let e = sym_eigen(&dense).unwrap();
            let tol = 1e-10 * dense.frobenius_norm();
            assert!(e.values[0].abs() <= tol, "{family}");
            assert!(e.values[1] > tol, "{family}");
        }
    }

    #[test]
    fn dirichlet_reduction() {
        let m = mesh(MeshFamily::Quad, 2);
        let (sys, _) = assemble(&m, &ManufacturedProblem::zero(), &SolveOptions::default()).unwrap();
        let r = apply_dirichlet(&sys, &m, &|_| 0.0).unwrap();
        assert_eq!(r.matrix.dim(), 1);
        assert_eq!(r.interior, vec![4]);
        let m1 = mesh(MeshFamily::Quad, 1);
        let (sys1, _) = assemble(&m1, &ManufacturedProblem::zero(), &SolveOptions::default()).unwrap();
        assert!(matches!(
            apply_dirichlet(&sys1, &m1, &|_| 1.0),
            Err(DriverError::EmptyInterior { .. })
        ));
    }

    #[test]
    fn constant_data_gives_constant_solution() {
        let m = mesh(MeshFamily::Hexagon, 4);
        let p = ManufacturedProblem::linear(2.5, 0.0, 0.0);
        let sol = solve(&m, &p, &SolveOptions::default()).unwrap();
        assert!(sol.dofs.iter().all(|v| (v - 2.5).abs() < 1e-12));
    }

    #[test]
    fn zero_data_gives_zero() {
        let m = mesh(MeshFamily::PerturbedQuad, 4);
        let sol = solve(&m, &ManufacturedProblem::zero(), &SolveOptions::default()).unwrap();
        assert!(sol.dofs.iter().all(|&v| v == 0.0));
        assert_eq!(sol.cg_iterations, 0);
    }

    #[test]
    fn linear_patch_on_perturbed_mesh() {
        let m = mesh(MeshFamily::PerturbedQuad, 4);
        let p = ManufacturedProblem::linear(0.0, 1.0, 0.0);
        let sol = solve(&m, &p, &SolveOptions::default()).unwrap();
        for (v, x) in sol.dofs.iter().zip(m.vertices()) {
            assert!((v - x.x).abs() <= 1e-10);
        }
    }

    #[test]
    fn single_cell_solve_is_the_lift() {
        let m = mesh(MeshFamily::Quad, 1);
        let p = ManufacturedProblem::patch();
        let sol = solve(&m, &p, &SolveOptions::default()).unwrap();
        let r = error_norms(&sol, &p, 4).unwrap();
        assert!(r.err_l2 < 1e-14 && r.err_h1 < 1e-14);
    }

    #[test]
    fn error_of_zero_against_one() {
        let m = mesh(MeshFamily::Quad, 2);
        let sol = DiscreteSolution {
            mesh: &m,
            dofs: vec![0.0; 9],
            projections: vec![[0.0; 3]; 4],
            bases: element_matrices(&m, StabilizationPolicy::Unit)
                .unwrap()
                .iter()
                .map(|e| e.basis())
                .collect(),
            cg_iterations: 0,
            wall_time: Duration::ZERO,
        };
        let r = error_norms(&sol, &ManufacturedProblem::linear(1.0, 0.0, 0.0), 4).unwrap();
        assert!((r.err_l2 - 1.0).abs() < 1e-14);
        assert_eq!(r.err_h1, 0.0);
    }

    #[test]
    fn eoc_values() {
        assert_eq!(eoc(1.0, 0.25, 0.5, 0.25), Some(2.0));
        assert_eq!(eoc(1e-12, 1e-13, 0.5, 0.25), None);
    }

    #[test]
    fn csv_layout() {
        let t = convergence_study(
            &MeshFamilySpec::new(MeshFamily::Quad, 2),
            2,
            &ManufacturedProblem::sin_sin(),
            &SolveOptions::default(),
        )
        .unwrap();
        let csv = t.to_csv(false);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 3);
        let first: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(first.len(), 9);
        assert_eq!((first[5], first[6]), ("", ""));
        assert_eq!(first[8], "0");
        assert!(!lines[2].split(',').nth(6).unwrap().is_empty());
    }

    #[test]
    fn too_few_levels() {
        assert!(matches!(
            convergence_study(
                &MeshFamilySpec::new(MeshFamily::Quad, 2),
                1,
                &ManufacturedProblem::sin_sin(),
                &SolveOptions::default()
            ),
            Err(DriverError::TooFewLevels(1))
        ));
    }
}
