use polyvem::mesh::{generate, MeshFamily, MeshFamilySpec, PolygonalMesh};
use polyvem::oracle::harmonic_stiffness;
use polyvem::{DenseMatrix, LocalElementMatrices, Point2, Polygon, StabilizationPolicy};
use proptest::prelude::*;

/// Convex polygon from sorted angles on a jittered ellipse.
fn convex_polygon() -> impl Strategy<Value = Polygon> {
    (
        prop::collection::vec(0.0..1.0f64, 3..9),
        0.3..3.0f64,
        0.3..3.0f64,
        -5.0..5.0f64,
        -5.0..5.0f64,
    )
        .prop_filter_map("degenerate", |(raw, a, b, cx, cy)| {
            let mut t: Vec<f64> = raw.iter().map(|r| r * std::f64::consts::TAU).collect();
            t.sort_by(f64::total_cmp);
            if t.windows(2).any(|w| w[1] - w[0] < 0.05) || t[0] + std::f64::consts::TAU - t[t.len() - 1] < 0.05 {
                return None;
            }
            let pts = t.iter().map(|s| Point2::new(cx + a * s.cos(), cy + b * s.sin())).collect();
            Polygon::new(pts).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projector_identities(poly in convex_polygon()) {
        let el = LocalElementMatrices::new(&poly, StabilizationPolicy::Unit).unwrap();
        prop_assert!(el.pi_star.matmul(&el.d).sub(&DenseMatrix::identity(3)).max_abs() < 1e-10);
        prop_assert!(el.pi.matmul(&el.pi).sub(&el.pi).max_abs() < 1e-10);
        prop_assert!(el.consistency_residual() < 1e-10 * el.k.max_abs().max(1.0));
        prop_assert!(el.k.asymmetry() < 1e-12);
        let row_sums = (0..el.n_vertices()).map(|i| el.k.row(i).iter().sum::<f64>().abs()).fold(0.0, f64::max);
        prop_assert!(row_sums < 1e-10);
    }

    #[test]
    fn projection_reproduces_linears(poly in convex_polygon(), a in -3.0..3.0f64, b in -3.0..3.0f64, c in -3.0..3.0f64) {
        let el = LocalElementMatrices::new(&poly, StabilizationPolicy::Trace).unwrap();
        let dofs: Vec<f64> = poly.vertices().iter().map(|p| a + b * p.x + c * p.y).collect();
        let coeffs = el.project(&dofs);
        let basis = el.basis();
        for p in poly.vertices() {
            prop_assert!((basis.eval_poly(&coeffs, *p) - (a + b * p.x + c * p.y)).abs() < 1e-10);
        }
    }

    #[test]
    fn oracle_agrees_on_linears(poly in convex_polygon()) {
        let el = LocalElementMatrices::new(&poly, StabilizationPolicy::Unit).unwrap();
        let reference = harmonic_stiffness(&poly, 1).unwrap().matrix;
        let r = polyvem::oracle::consistency_residual(&el.k, &reference, &el.d);
        prop_assert!(r < 1e-9, "{}", r);
    }

    #[test]
    fn json_round_trip(family in prop::sample::select(MeshFamily::ALL.to_vec()), n in 2usize..7, seed in any::<u64>()) {
        let spec = MeshFamilySpec { seed, ..MeshFamilySpec::new(family, n) };
        let m = generate(&spec).unwrap();
        let back = PolygonalMesh::from_json(&m.to_json()).unwrap();
        prop_assert_eq!(back.vertices(), m.vertices());
        prop_assert_eq!(back.cells(), m.cells());
    }
}
