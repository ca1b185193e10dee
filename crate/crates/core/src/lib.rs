//! Lowest-order virtual element method for the Poisson problem on polygonal
//! meshes of the unit square.
//!
//! The pipeline is: generate or load a [`mesh::PolygonalMesh`], build the
//! per-cell matrices in [`element`], assemble and solve in [`driver`], and
//! measure errors and convergence rates. [`oracle`] recomputes the local
//! energy with a sub-triangulated harmonic lifting to check the element's
//! consistency and stability independently.

// `!(x > tol)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod driver;
pub mod element;
pub mod geometry;
pub mod linalg;
pub mod mesh;
pub mod oracle;
pub mod plot;

pub use element::{LocalElementMatrices, StabilizationPolicy};
pub use geometry::{CellGeometry, Point2, Polygon, QuadratureRule};
pub use linalg::{DenseMatrix, SparseSymMatrix};
pub use mesh::{MeshFamily, MeshFamilySpec, PolygonalMesh};
