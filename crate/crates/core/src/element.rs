//! Local matrices of the lowest-order virtual element.
//!
//! Degrees of freedom are vertex values. Polynomials of degree one are
//! represented in the scaled monomial basis
//!
//! ```text
//! m1 = 1,  m2 = (x - xP) / hP,  m3 = (y - yP) / hP
//! ```
//!
//! centred at the cell centroid and scaled by the cell diameter. From the
//! matrices `D` (monomial dofs) and `B` (projection right-hand sides) every
//! other local quantity follows:
//!
//! ```text
//! G   = B D
//! Π*  = G⁻¹ B                    coefficients of the projected basis
//! Π   = D Π*                     projection in dof space
//! K   = Π*ᵀ G̃ Π* + ν (I − Π)ᵀ(I − Π)
//! ```
//!
//! where `G̃` is `G` with its first row zeroed. The first term reproduces
//! the exact energy whenever one argument is linear; the second restores
//! full rank on the kernel of the projection.

use thiserror::Error;

use crate::geometry::{CellGeometry, GeometryError, Point2, Polygon, QuadratureRule};
use crate::linalg::DenseMatrix;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ElementError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("projection matrix G is singular (det {det:e}); degenerate cell")]
    SingularG { det: f64 },
}

/// The basis {1, (x − xP)/hP, (y − yP)/hP} of linear polynomials on a cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledMonomials {
    pub centroid: Point2,
    pub diameter: f64,
}

impl ScaledMonomials {
    pub fn new(geom: &CellGeometry) -> Self {
        Self {
            centroid: geom.centroid,
            diameter: geom.diameter,
        }
    }

    pub fn eval(&self, p: Point2) -> [f64; 3] {
        [
            1.0,
            (p.x - self.centroid.x) / self.diameter,
            (p.y - self.centroid.y) / self.diameter,
        ]
    }

    pub fn gradients(&self) -> [Point2; 3] {
        let s = 1.0 / self.diameter;
        [Point2::new(0.0, 0.0), Point2::new(s, 0.0), Point2::new(0.0, s)]
    }

    /// Value of the polynomial with monomial coefficients `c` at `p`.
    pub fn eval_poly(&self, c: &[f64; 3], p: Point2) -> f64 {
        let m = self.eval(p);
        c[0] * m[0] + c[1] * m[1] + c[2] * m[2]
    }

    /// Gradient of the polynomial with monomial coefficients `c`.
    pub fn grad_poly(&self, c: &[f64; 3]) -> Point2 {
        Point2::new(c[1] / self.diameter, c[2] / self.diameter)
    }
}

/// How the stabilization coefficient ν is chosen per cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StabilizationPolicy {
    /// ν = 1.
    #[default]
    Unit,
    /// ν = trace(K_c) / 2.
    Trace,
}

impl StabilizationPolicy {
    pub fn coefficient(self, consistency: &DenseMatrix) -> f64 {
        match self {
            StabilizationPolicy::Unit => 1.0,
            StabilizationPolicy::Trace => 0.5 * consistency.trace(),
        }
    }
}

/// D[i][α] = m_α(V_i).
pub fn matrix_d(geom: &CellGeometry, vertices: &[Point2]) -> DenseMatrix {
    let basis = ScaledMonomials::new(geom);
    let mut d = DenseMatrix::zeros(vertices.len(), 3);
    for (i, v) in vertices.iter().enumerate() {
        let m = basis.eval(*v);
        for a in 0..3 {
            d[(i, a)] = m[a];
        }
    }
    d
}

/// Right-hand sides of the projection problem, one column per vertex.
///
/// Row 1 holds the vertex-average weights 1/N. Rows 2 and 3 hold
/// ∫_P ∇m_α·∇φ_j, which reduces to the boundary integral of φ_j against the
/// normal component and involves only the two edges meeting at V_j.
pub fn matrix_b(geom: &CellGeometry) -> DenseMatrix {
    let n = geom.n_vertices();
    let h = geom.diameter;
    let mut b = DenseMatrix::zeros(3, n);
    for j in 0..n {
        let prev = (j + n - 1) % n;
        let lp = geom.edge_lengths[prev];
        let lj = geom.edge_lengths[j];
        let np = geom.edge_normals[prev];
        let nj = geom.edge_normals[j];
        b[(0, j)] = 1.0 / n as f64;
        b[(1, j)] = (lp * np.x + lj * nj.x) / (2.0 * h);
        b[(2, j)] = (lp * np.y + lj * nj.y) / (2.0 * h);
    }
    b
}

/// G, G̃ and Π* for one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    pub g: DenseMatrix,
    pub g_tilde: DenseMatrix,
    pub pi_star: DenseMatrix,
}

fn det3(m: &DenseMatrix) -> f64 {
    m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
        - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
        + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)])
}

/// Solves G Π* = B with G = B D.
pub fn projector(d: &DenseMatrix, b: &DenseMatrix) -> Result<Projector, ElementError> {
    let g = b.matmul(d);
    let det = det3(&g);
    if det.abs() < 1e-12 * g.frobenius_norm().powi(3) {
        return Err(ElementError::SingularG { det });
    }
    let pi_star = g.solve(b).ok_or(ElementError::SingularG { det })?;
    let mut g_tilde = g.clone();
    for j in 0..3 {
        g_tilde[(0, j)] = 0.0;
    }
    Ok(Projector { g, g_tilde, pi_star })
}

/// Cell average of ∇v computed from vertex values alone:
/// (1/|P|) Σ_i (v_i + v_{i+1})/2 |E_i| n_i.
pub fn average_gradient(geom: &CellGeometry, dofs: &[f64]) -> Point2 {
    let n = geom.n_vertices();
    let mut s = Point2::default();
    for i in 0..n {
        let avg = 0.5 * (dofs[i] + dofs[(i + 1) % n]);
        s = s + geom.edge_normals[i] * (avg * geom.edge_lengths[i]);
    }
    s * (1.0 / geom.area)
}

/// Local stiffness with its consistency and stability parts.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalStiffness {
    pub k: DenseMatrix,
    pub consistency: DenseMatrix,
    /// (I − Π)ᵀ(I − Π), before scaling by ν.
    pub stability: DenseMatrix,
    pub pi: DenseMatrix,
    pub nu: f64,
}

pub fn local_stiffness(
    d: &DenseMatrix,
    proj: &Projector,
    policy: StabilizationPolicy,
) -> LocalStiffness {
    let n = d.rows();
    let pi = d.matmul(&proj.pi_star);
    let consistency = proj
        .pi_star
        .transpose()
        .matmul(&proj.g_tilde)
        .matmul(&proj.pi_star);
    let i_minus_pi = DenseMatrix::identity(n).sub(&pi);
    let stability = i_minus_pi.transpose().matmul(&i_minus_pi);
    let nu = policy.coefficient(&consistency);
    let k = consistency.add(&stability.scaled(nu));
    LocalStiffness {
        k,
        consistency,
        stability,
        pi,
        nu,
    }
}

/// Largest entry of |K d_α − A(φ_j, m_α)| over the three monomials.
///
/// The exact energy against a linear polynomial is a boundary integral of the
/// piecewise-linear trace of φ_j times the constant normal derivative, so it
/// is evaluated here from the edge data directly, independent of `B`.
pub fn consistency_check(k: &DenseMatrix, d: &DenseMatrix, geom: &CellGeometry) -> f64 {
    let n = geom.n_vertices();
    let basis = ScaledMonomials::new(geom);
    let grads = basis.gradients();
    let mut worst: f64 = 0.0;
    for (a, grad) in grads.iter().enumerate() {
        let kd = k.matvec(&d.column(a));
        for (j, kdj) in kd.iter().enumerate() {
            // φ_j is the hat on the two edges meeting at V_j, each contributing
            // half its length times the normal flux
            let mut exact = 0.0;
            for e in [(j + n - 1) % n, j] {
                exact += 0.5 * geom.edge_lengths[e] * grad.dot(geom.edge_normals[e]);
            }
            worst = worst.max((kdj - exact).abs());
        }
    }
    worst
}

/// Load vector from the vertex-average approximation of the source:
/// every vertex receives (1/N) ∫_P f.
pub fn local_load<F: Fn(Point2) -> f64>(n_vertices: usize, quad: &QuadratureRule, f: F) -> Vec<f64> {
    let share = quad.integrate(f) / n_vertices as f64;
    vec![share; n_vertices]
}

/// Every local matrix of one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalElementMatrices {
    pub geometry: CellGeometry,
    pub d: DenseMatrix,
    pub b: DenseMatrix,
    pub g: DenseMatrix,
    pub g_tilde: DenseMatrix,
    pub pi_star: DenseMatrix,
    pub pi: DenseMatrix,
    pub k_consistency: DenseMatrix,
    pub k_stability: DenseMatrix,
    pub k: DenseMatrix,
    pub nu: f64,
}

impl LocalElementMatrices {
    pub fn new(poly: &Polygon, policy: StabilizationPolicy) -> Result<Self, ElementError> {
        let geometry = CellGeometry::new(poly)?;
        let d = matrix_d(&geometry, poly.vertices());
        let b = matrix_b(&geometry);
        let proj = projector(&d, &b)?;
        let stiff = local_stiffness(&d, &proj, policy);
        Ok(Self {
            geometry,
            d,
            b,
            g: proj.g,
            g_tilde: proj.g_tilde,
            pi_star: proj.pi_star,
            pi: stiff.pi,
            k_consistency: stiff.consistency,
            k_stability: stiff.stability,
            k: stiff.k,
            nu: stiff.nu,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.d.rows()
    }

    pub fn basis(&self) -> ScaledMonomials {
        ScaledMonomials::new(&self.geometry)
    }

    /// Monomial coefficients of Π*v for vertex values `dofs`.
    pub fn project(&self, dofs: &[f64]) -> [f64; 3] {
        let c = self.pi_star.matvec(dofs);
        [c[0], c[1], c[2]]
    }

    pub fn consistency_residual(&self) -> f64 {
        consistency_check(&self.k, &self.d, &self.geometry)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sym_eigen;

    fn poly(pts: &[(f64, f64)]) -> Polygon {
        Polygon::new(pts.iter().map(|&(x, y)| Point2::new(x, y)).collect()).unwrap()
    }

    fn unit_square() -> Polygon {
        poly(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
    }

    fn right_triangle() -> Polygon {
        poly(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])
    }

    fn pentagon() -> Polygon {
        poly(&[(0.0, 0.0), (1.1, 0.1), (1.3, 0.9), (0.4, 1.4), (-0.2, 0.7)])
    }

    fn l_shape() -> Polygon {
        poly(&[(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 1.0), (1.0, 2.0), (0.0, 2.0)])
    }

    fn assert_close(a: &DenseMatrix, b: &DenseMatrix, tol: f64) {
        let diff = a.sub(b).max_abs();
        assert!(diff <= tol, "difference {diff:e}\n{a:?}\n{b:?}");
    }

    #[test]
    fn d_unit_square() {
        let e = LocalElementMatrices::new(&unit_square(), StabilizationPolicy::Unit).unwrap();
        let v = -0.5 / 2f64.sqrt();
        assert_eq!(e.d.row(0), &[1.0, v, v]);
        assert!(e.d.column(0).iter().all(|&x| x == 1.0));
        assert_eq!(e.basis().eval(e.geometry.centroid), [1.0, 0.0, 0.0]);
    }

    #[test]
    fn b_unit_square() {
        let e = LocalElementMatrices::new(&unit_square(), StabilizationPolicy::Unit).unwrap();
        // vertex (1,0) is column 1 here (vertex 2 in one-based numbering)
        let s = 1.0 / (2.0 * 2f64.sqrt());
        assert!((e.b[(1, 1)] - s).abs() < 1e-15);
        assert!((e.b[(2, 1)] + s).abs() < 1e-15);
    }

    #[test]
    fn b_row_sums() {
        for p in [unit_square(), right_triangle(), pentagon(), l_shape()] {
            let e = LocalElementMatrices::new(&p, StabilizationPolicy::Unit).unwrap();
            let sums: Vec<f64> = (0..3).map(|r| e.b.row(r).iter().sum()).collect();
            assert!((sums[0] - 1.0).abs() < 1e-15);
            assert!(sums[1].abs() < 1e-14 && sums[2].abs() < 1e-14);
        }
    }

    #[test]
    fn g_unit_square() {
        let e = LocalElementMatrices::new(&unit_square(), StabilizationPolicy::Unit).unwrap();
        let expected = DenseMatrix::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 0.5, 0.0],
            vec![0.0, 0.0, 0.5],
        ]);
        assert_close(&e.g, &expected, 1e-15);
        assert_eq!(e.g_tilde.row(0), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn projector_identities() {
        for p in [unit_square(), right_triangle(), pentagon(), l_shape()] {
            let e = LocalElementMatrices::new(&p, StabilizationPolicy::Unit).unwrap();
            assert_close(&e.pi_star.matmul(&e.d), &DenseMatrix::identity(3), 1e-10);
            assert_close(&e.pi.matmul(&e.pi), &e.pi, 1e-12);
            assert_close(&e.pi.matmul(&e.d), &e.d, 1e-12);
        }
    }

    #[test]
    fn triangle_projection_is_identity() {
        let e = LocalElementMatrices::new(&right_triangle(), StabilizationPolicy::Unit).unwrap();
        assert_close(&e.pi, &DenseMatrix::identity(3), 1e-14);
        assert!(e.k_stability.max_abs() < 1e-14);
        let p1 = DenseMatrix::from_rows(&[
            vec![1.0, -0.5, -0.5],
            vec![-0.5, 0.5, 0.0],
            vec![-0.5, 0.0, 0.5],
        ]);
        assert_close(&e.k, &p1, 1e-14);
    }

    #[test]
    fn average_gradient_examples() {
        let sq = CellGeometry::new(&unit_square()).unwrap();
        let g = average_gradient(&sq, &[0.0, 1.0, 1.0, 0.0]);
        assert!((g.x - 1.0).abs() < 1e-15 && g.y.abs() < 1e-15);
        let g = average_gradient(&sq, &[2.0; 4]);
        assert!(g.norm() < 1e-15);
        let l = l_shape();
        let lg = CellGeometry::new(&l).unwrap();
        let dofs: Vec<f64> = l.vertices().iter().map(|p| p.x).collect();
        let g = average_gradient(&lg, &dofs);
        assert!((g.x - 1.0).abs() < 1e-14 && g.y.abs() < 1e-14);
    }

    #[test]
    fn average_gradient_matches_projection() {
        let p = pentagon();
        let e = LocalElementMatrices::new(&p, StabilizationPolicy::Unit).unwrap();
        let dofs = [0.3, -1.2, 2.0, 0.7, 1.1];
        let c = e.project(&dofs);
        let from_proj = e.basis().grad_poly(&c);
        let avg = average_gradient(&e.geometry, &dofs);
        assert!((from_proj - avg).norm() < 1e-13);
    }

    #[test]
    fn rank_structure() {
        for p in [unit_square(), pentagon(), l_shape()] {
            let e = LocalElementMatrices::new(&p, StabilizationPolicy::Unit).unwrap();
            let n = e.n_vertices();
            let kc = sym_eigen(&e.k_consistency).unwrap();
            let tol = 1e-10 * e.k_consistency.frobenius_norm();
            assert_eq!(kc.values.iter().filter(|&&v| v > tol).count(), 2);
            let k = sym_eigen(&e.k).unwrap();
            let tol = 1e-10 * e.k.frobenius_norm();
            assert_eq!(k.values.iter().filter(|&&v| v > tol).count(), n - 1);
            assert!(k.values[0] >= -1e-12 * e.k.frobenius_norm());
            let k1 = e.k.matvec(&vec![1.0; n]);
            assert!(k1.iter().all(|v| v.abs() <= 1e-12 * e.k.frobenius_norm()));
        }
    }

    #[test]
    fn consistency_holds_and_ignores_nu() {
        for p in [unit_square(), pentagon(), l_shape()] {
            let e = LocalElementMatrices::new(&p, StabilizationPolicy::Unit).unwrap();
            let norm = e.k.frobenius_norm();
            assert!(e.consistency_residual() <= 1e-12 * norm);
            let doubled = e.k_consistency.add(&e.k_stability.scaled(2.0 * e.nu));
            let r = consistency_check(&doubled, &e.d, &e.geometry);
            assert!(r <= 1e-12 * norm);
        }
    }

    #[test]
    fn trace_policy() {
        let e = LocalElementMatrices::new(&pentagon(), StabilizationPolicy::Trace).unwrap();
        assert!((e.nu - 0.5 * e.k_consistency.trace()).abs() < 1e-15);
        assert!(e.nu > 0.0);
    }

    #[test]
    fn load_examples() {
        let sq = unit_square();
        let q = QuadratureRule::fan(&sq, 4).unwrap();
        for b in local_load(4, &q, |_| 1.0) {
            assert!((b - 0.25).abs() < 1e-15);
        }
        assert_eq!(local_load(4, &q, |_| 0.0), vec![0.0; 4]);
        for b in local_load(4, &q, |p| p.x) {
            assert!((b - 0.125).abs() < 1e-15);
        }
    }

    #[test]
    fn invariance_under_translation_and_scaling() {
        let base = pentagon();
        let e0 = LocalElementMatrices::new(&base, StabilizationPolicy::Unit).unwrap();
        let moved = Polygon::new(
            base.vertices()
                .iter()
                .map(|p| Point2::new(3.0 * p.x + 10.0, 3.0 * p.y - 7.0))
                .collect(),
        )
        .unwrap();
        let e1 = LocalElementMatrices::new(&moved, StabilizationPolicy::Unit).unwrap();
        assert_close(&e0.b, &e1.b, 1e-12);
        assert_close(&e0.g, &e1.g, 1e-12);
        assert_close(&e0.pi_star, &e1.pi_star, 1e-12);
        assert_close(&e0.k, &e1.k, 1e-12);
    }

    #[test]
    fn degenerate_cell_errors() {
        let flat = poly(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (1.0, 1e-20)]);
        assert!(matches!(
            LocalElementMatrices::new(&flat, StabilizationPolicy::Unit),
            Err(ElementError::Geometry(GeometryError::NonPositiveArea { .. }))
        ));
    }
}
