//! Reference local energies from discrete harmonic liftings.
//!
//! Each virtual basis function is the harmonic extension of the hat trace
//! δ_i into the cell. Here that extension is approximated by P1 finite
//! elements on a refined fan of the polygon, giving a matrix
//! A(φ_i, φ_j) against which the element's consistency and stability can be
//! measured. None of this is used by the production solve.

use std::fmt::Write as _;

use thiserror::Error;

use crate::driver::{assemble_with, solve_reduced, DriverError, ManufacturedProblem, SolveOptions};
use crate::element::{ElementError, LocalElementMatrices, StabilizationPolicy};
use crate::geometry::{triangle_signed_area, GeometryError, Point2, Polygon};
use crate::linalg::{cg_solve, generalized_eig_bounds, DenseMatrix, LinalgError, SparseSymMatrix};
use crate::mesh::PolygonalMesh;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Element(#[from] ElementError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Driver(#[from] DriverError),
    #[error("refinement level {0} outside [0, 5]")]
    LevelOutOfRange(usize),
    #[error("degenerate triangle (signed area {0:e})")]
    DegenerateTriangle(f64),
    #[error("cell {0} is not a triangle")]
    NotTriangle(usize),
}

pub const DEFAULT_LEVELS: usize = 3;
const MAX_LEVELS: usize = 5;
const SOLVE_TOL: f64 = 1e-13;

/// Position of a boundary node: polygon edge index and parameter in [0, 1].
type EdgeParam = (usize, f64);

/// A refined fan triangulation of one polygon.
///
/// Nodes `0..N` are the polygon vertices, node `N` is the centroid.
#[derive(Debug, Clone)]
pub struct SubTriangulation {
    pub points: Vec<Point2>,
    pub triangles: Vec<[usize; 3]>,
    /// For boundary nodes, every polygon edge the node lies on.
    pub boundary: Vec<Vec<EdgeParam>>,
    n_cell_vertices: usize,
}

impl SubTriangulation {
    pub fn is_boundary(&self, node: usize) -> bool {
        !self.boundary[node].is_empty()
    }

    pub fn n_cell_vertices(&self) -> usize {
        self.n_cell_vertices
    }

    /// Values of the hat trace δ_i at every node (zero at interior nodes).
    pub fn trace(&self, i: usize) -> Vec<f64> {
        let n = self.n_cell_vertices;
        self.boundary
            .iter()
            .map(|params| match params.first() {
                None => 0.0,
                Some(&(e, t)) => {
                    if e == i {
                        1.0 - t
                    } else if (e + 1) % n == i {
                        t
                    } else {
                        0.0
                    }
                }
            })
            .collect()
    }
}

/// Fans the polygon around its centroid, then splits every triangle into four
/// `levels` times.
pub fn subtriangulate(poly: &Polygon, levels: usize) -> Result<SubTriangulation, OracleError> {
    if levels > MAX_LEVELS {
        return Err(OracleError::LevelOutOfRange(levels));
    }
    let n = poly.len();
    let centroid = poly.centroid()?;
    let h = poly.diameter();
    let mut points: Vec<Point2> = poly.vertices().to_vec();
    let mut boundary: Vec<Vec<EdgeParam>> = (0..n).map(|i| vec![(i, 0.0), ((i + n - 1) % n, 1.0)]).collect();
    points.push(centroid);
    boundary.push(Vec::new());
    let mut triangles = Vec::with_capacity(n << (2 * levels));
    for i in 0..n {
        let tri = [n, i, (i + 1) % n];
        let area = triangle_signed_area(points[tri[0]], points[tri[1]], points[tri[2]]);
        if !(area > 1e-14 * h * h) {
            return Err(GeometryError::InvertedSubTriangle { triangle: i }.into());
        }
        triangles.push(tri);
    }

    for _ in 0..levels {
        let mut midpoint = std::collections::HashMap::new();
        let mut refined = Vec::with_capacity(4 * triangles.len());
        for t in &triangles {
            let mut mid = |a: usize, b: usize| -> usize {
                *midpoint.entry((a.min(b), a.max(b))).or_insert_with(|| {
                    points.push((points[a] + points[b]) * 0.5);
                    let shared: Vec<EdgeParam> = boundary[a]
                        .iter()
                        .filter_map(|&(ea, ta)| {
                            boundary[b]
                                .iter()
                                .find(|&&(eb, _)| eb == ea)
                                .map(|&(_, tb)| (ea, 0.5 * (ta + tb)))
                        })
                        .collect();
                    boundary.push(shared);
                    points.len() - 1
                })
            };
            let [a, b, c] = *t;
            let ab = mid(a, b);
            let bc = mid(b, c);
            let ca = mid(c, a);
            refined.push([a, ab, ca]);
            refined.push([ab, b, bc]);
            refined.push([ca, bc, c]);
            refined.push([ab, bc, ca]);
        }
        triangles = refined;
    }
    Ok(SubTriangulation {
        points,
        triangles,
        boundary,
        n_cell_vertices: n,
    })
}

/// Exact P1 stiffness of a triangle.
pub fn p1_stiffness(a: Point2, b: Point2, c: Point2) -> Result<DenseMatrix, OracleError> {
    let area = triangle_signed_area(a, b, c);
    let scale = (b - a).norm().max((c - b).norm()).max((a - c).norm());
    if !(area > 1e-14 * scale * scale) {
        return Err(OracleError::DegenerateTriangle(area));
    }
    // ∇λ_i is the opposite edge rotated by 90°, divided by 2|T|
    let pts = [a, b, c];
    let grads: Vec<Point2> = (0..3)
        .map(|i| {
            let e = pts[(i + 2) % 3] - pts[(i + 1) % 3];
            Point2::new(-e.y, e.x) * (1.0 / (2.0 * area))
        })
        .collect();
    Ok(DenseMatrix::from_fn(3, 3, |i, j| area * grads[i].dot(grads[j])))
}

/// Reference matrix A(φ_i, φ_j) of discrete harmonic liftings.
#[derive(Debug, Clone)]
pub struct OracleStiffness {
    pub matrix: DenseMatrix,
    pub levels: usize,
}

/// Lifts every hat trace harmonically into the sub-triangulation and returns
/// the matrix of their mutual energies.
pub fn harmonic_stiffness(poly: &Polygon, levels: usize) -> Result<OracleStiffness, OracleError> {
    let sub = subtriangulate(poly, levels)?;
    let np = sub.points.len();
    let mut triplets = Vec::with_capacity(9 * sub.triangles.len());
    for t in &sub.triangles {
        let k = p1_stiffness(sub.points[t[0]], sub.points[t[1]], sub.points[t[2]])?;
        for a in 0..3 {
            for b in 0..3 {
                triplets.push((t[a], t[b], k[(a, b)]));
            }
        }
    }
    let full = SparseSymMatrix::from_triplets(np, &triplets)?;

    let mut local = vec![usize::MAX; np];
    let interior: Vec<usize> = (0..np).filter(|&v| !sub.is_boundary(v)).collect();
    for (k, &v) in interior.iter().enumerate() {
        local[v] = k;
    }
    let inner_triplets: Vec<(usize, usize, f64)> = interior
        .iter()
        .enumerate()
        .flat_map(|(i, &gi)| {
            full.row(gi)
                .filter(|&(gj, _)| local[gj] != usize::MAX)
                .map(move |(gj, v)| (i, gj, v))
                .collect::<Vec<_>>()
        })
        .map(|(i, gj, v)| (i, local[gj], v))
        .collect();
    let inner = SparseSymMatrix::from_triplets(interior.len(), &inner_triplets)?;

    let n = sub.n_cell_vertices();
    let mut liftings = Vec::with_capacity(n);
    for i in 0..n {
        let mut phi = sub.trace(i);
        let coupling = full.mul(&phi);
        let rhs: Vec<f64> = interior.iter().map(|&v| -coupling[v]).collect();
        let sol = cg_solve(&inner, &rhs, SOLVE_TOL, 20 * interior.len().max(10))?;
        for (&v, x) in interior.iter().zip(&sol.x) {
            phi[v] = *x;
        }
        liftings.push(phi);
    }
    let applied: Vec<Vec<f64>> = liftings.iter().map(|phi| full.mul(phi)).collect();
    let mut matrix = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let a: f64 = liftings[i].iter().zip(&applied[j]).map(|(x, y)| x * y).sum();
            let b: f64 = liftings[j].iter().zip(&applied[i]).map(|(x, y)| x * y).sum();
            let v = 0.5 * (a + b);
            matrix[(i, j)] = v;
            matrix[(j, i)] = v;
        }
    }
    Ok(OracleStiffness { matrix, levels })
}

/// Measured constants of the stability sandwich on one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityConstants {
    pub alpha_lower: f64,
    pub alpha_upper: f64,
}

pub fn stability_report(
    poly: &Polygon,
    k_vem: &DenseMatrix,
    levels: usize,
) -> Result<StabilityConstants, OracleError> {
    let reference = harmonic_stiffness(poly, levels)?;
    stability_against(k_vem, &reference.matrix)
}

fn stability_against(k_vem: &DenseMatrix, reference: &DenseMatrix) -> Result<StabilityConstants, OracleError> {
    let ones = vec![1.0; k_vem.rows()];
    let (alpha_lower, alpha_upper) = generalized_eig_bounds(k_vem, reference, &ones)?;
    Ok(StabilityConstants {
        alpha_lower,
        alpha_upper,
    })
}

/// max_α ‖(K_vem − K_ref) d_α‖∞ over the monomial dof columns.
pub fn consistency_residual(k_vem: &DenseMatrix, reference: &DenseMatrix, d: &DenseMatrix) -> f64 {
    let diff = k_vem.sub(reference);
    (0..d.cols())
        .flat_map(|a| diff.matvec(&d.column(a)))
        .fold(0.0, |m, v| m.max(v.abs()))
}

/// One row of the per-cell stability table.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CellStability {
    pub cell: usize,
    pub n_vertices: usize,
    pub alpha_lower: f64,
    pub alpha_upper: f64,
    pub consistency_residual: f64,
}

pub const STABILITY_CSV_HEADER: &str = "cell,n_vertices,alpha_lower,alpha_upper,consistency_residual";

/// Stability constants and oracle consistency residual for every cell.
pub fn stability_table(
    mesh: &PolygonalMesh,
    policy: StabilizationPolicy,
    levels: usize,
) -> Result<Vec<CellStability>, OracleError> {
    (0..mesh.n_cells())
        .map(|c| {
            let poly = mesh.cell_polygon(c)?;
            let el = LocalElementMatrices::new(&poly, policy)?;
            let reference = harmonic_stiffness(&poly, levels)?;
            let s = stability_against(&el.k, &reference.matrix)?;
            Ok(CellStability {
                cell: c,
                n_vertices: poly.len(),
                alpha_lower: s.alpha_lower,
                alpha_upper: s.alpha_upper,
                consistency_residual: consistency_residual(&el.k, &reference.matrix, &el.d),
            })
        })
        .collect()
}

pub fn stability_csv(rows: &[CellStability]) -> String {
    let mut s = String::from(STABILITY_CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{:.10e},{:.10e},{:.6e}",
            r.cell, r.n_vertices, r.alpha_lower, r.alpha_upper, r.consistency_residual
        );
    }
    s
}

/// Standard P1 finite element solve on an all-triangle mesh, with the same
/// load rule and boundary treatment as the virtual element driver.
pub fn p1_global_solve(
    mesh: &PolygonalMesh,
    problem: &ManufacturedProblem,
    options: &SolveOptions,
) -> Result<Vec<f64>, OracleError> {
    for (c, cell) in mesh.cells().iter().enumerate() {
        if cell.len() != 3 {
            return Err(OracleError::NotTriangle(c));
        }
    }
    let system = assemble_with(mesh, problem.f.as_ref(), options.quad_order, |c| {
        let p = mesh.cell_points(c);
        p1_stiffness(p[0], p[1], p[2]).map_err(|e| match e {
            OracleError::DegenerateTriangle(area) => DriverError::Geometry {
                cell: c,
                source: GeometryError::NonPositiveArea { area },
            },
            _ => unreachable!("p1_stiffness only reports degenerate triangles"),
        })
    })?;
    let (dofs, _) = solve_reduced(&system, mesh, problem.g.as_ref(), options)?;
    Ok(dofs)
}
