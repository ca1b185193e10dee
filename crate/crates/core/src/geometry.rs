//! Polygon geometry and quadrature on polygons.
//!
//! All polygons are counter-clockwise. Tolerances are relative to the cell
//! scale (diameter or perimeter), so a mesh behaves the same at any physical
//! size.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("non-finite vertex coordinate at index {0}")]
    NonFinite(usize),
    #[error("non-positive polygon area {area:e} (degenerate or clockwise)")]
    NonPositiveArea { area: f64 },
    #[error("edge {edge} has zero length")]
    ZeroLengthEdge { edge: usize },
    #[error("fan sub-triangle {triangle} is inverted; polygon is not star-shaped w.r.t. its centroid")]
    InvertedSubTriangle { triangle: usize },
    #[error("unsupported quadrature order {0} (expected 2 or 4)")]
    UnsupportedOrder(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 2D cross product.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

/// Signed area of the triangle (a, b, c); positive when counter-clockwise.
pub fn triangle_signed_area(a: Point2, b: Point2, c: Point2) -> f64 {
    0.5 * (b - a).cross(c - a)
}

/// A closed polygon given by its vertex loop.
///
/// Construction only checks vertex count and finiteness. Orientation and
/// degeneracy are reported by [`Polygon::area`] so that callers (mesh
/// validation in particular) can collect every failure instead of stopping
/// at the first one.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point2>,
}

impl Polygon {
    pub fn new(vertices: Vec<Point2>) -> Result<Self, GeometryError> {
        if vertices.len() < 3 {
            return Err(GeometryError::TooFewVertices(vertices.len()));
        }
        if let Some(i) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(GeometryError::NonFinite(i));
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Edge `i` runs from vertex `i` to vertex `i + 1` (cyclic).
    pub fn edge(&self, i: usize) -> (Point2, Point2) {
        let n = self.vertices.len();
        (self.vertices[i], self.vertices[(i + 1) % n])
    }

    /// Shoelace area, positive for counter-clockwise loops.
    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        // Shifting by the first vertex keeps the sum well conditioned far
        // from the origin.
        let o = self.vertices[0];
        let mut twice = 0.0;
        for i in 0..n {
            let a = self.vertices[i] - o;
            let b = self.vertices[(i + 1) % n] - o;
            twice += a.cross(b);
        }
        0.5 * twice
    }

    /// Area of a counter-clockwise polygon.
    pub fn area(&self) -> Result<f64, GeometryError> {
        let area = self.signed_area();
        let h = self.diameter();
        if !(area > 1e-14 * h * h) {
            return Err(GeometryError::NonPositiveArea { area });
        }
        Ok(area)
    }

    /// Area-weighted centroid.
    pub fn centroid(&self) -> Result<Point2, GeometryError> {
        let area = self.area()?;
        let n = self.vertices.len();
        let o = self.vertices[0];
        let (mut cx, mut cy) = (0.0, 0.0);
        for i in 0..n {
            let a = self.vertices[i] - o;
            let b = self.vertices[(i + 1) % n] - o;
            let w = a.cross(b);
            cx += (a.x + b.x) * w;
            cy += (a.y + b.y) * w;
        }
        Ok(Point2::new(o.x + cx / (6.0 * area), o.y + cy / (6.0 * area)))
    }

    /// Largest distance between two vertices.
    pub fn diameter(&self) -> f64 {
        let mut h: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                h = h.max(a.distance(*b));
            }
        }
        h
    }

    /// Edge lengths and outward unit normals.
    ///
    /// For a counter-clockwise loop the outward normal of edge a→b is the
    /// clockwise rotation of the unit tangent.
    pub fn edge_data(&self) -> Result<(Vec<f64>, Vec<Point2>), GeometryError> {
        let n = self.vertices.len();
        let h = self.diameter();
        let mut lengths = Vec::with_capacity(n);
        let mut normals = Vec::with_capacity(n);
        for i in 0..n {
            let (a, b) = self.edge(i);
            let t = b - a;
            let len = t.norm();
            if !(len >= 1e-14 * h) || len == 0.0 {
                return Err(GeometryError::ZeroLengthEdge { edge: i });
            }
            lengths.push(len);
            normals.push(Point2::new(t.y / len, -t.x / len));
        }
        Ok((lengths, normals))
    }

    /// True if `p` lies inside or on the boundary of a convex CCW polygon.
    pub fn contains_convex(&self, p: Point2) -> bool {
        let n = self.vertices.len();
        let scale = self.diameter().powi(2);
        (0..n).all(|i| {
            let (a, b) = self.edge(i);
            (b - a).cross(p - a) >= -1e-14 * scale
        })
    }
}

/// Per-cell geometric quantities used by the element.
#[derive(Debug, Clone, PartialEq)]
pub struct CellGeometry {
    pub area: f64,
    pub centroid: Point2,
    pub diameter: f64,
    pub edge_lengths: Vec<f64>,
    pub edge_normals: Vec<Point2>,
}

impl CellGeometry {
    pub fn new(poly: &Polygon) -> Result<Self, GeometryError> {
        let area = poly.area()?;
        let centroid = poly.centroid()?;
        let diameter = poly.diameter();
        let (edge_lengths, edge_normals) = poly.edge_data()?;
        Ok(Self {
            area,
            centroid,
            diameter,
            edge_lengths,
            edge_normals,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.edge_lengths.len()
    }

    pub fn perimeter(&self) -> f64 {
        self.edge_lengths.iter().sum()
    }
}

/// 3-point symmetric rule, exact for degree 2 (barycentric point, weight
/// fraction of the triangle area).
const TRI_RULE_2: [([f64; 3], f64); 3] = [
    ([2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0], 1.0 / 3.0),
    ([1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0], 1.0 / 3.0),
    ([1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0], 1.0 / 3.0),
];

const A4_1: f64 = 0.445_948_490_915_964_886_318_329_253_883;
const B4_1: f64 = 0.108_103_018_168_070_227_363_341_492_234;
const W4_1: f64 = 0.223_381_589_678_011_465_695_007_008_433;
const A4_2: f64 = 0.091_576_213_509_770_743_459_571_463_402_2;
const B4_2: f64 = 0.816_847_572_980_458_513_080_857_073_196;
#[allow(clippy::excessive_precision)]
const W4_2: f64 = 0.109_951_743_655_321_867_638_326_324_9;

/// 6-point symmetric rule, exact for degree 4.
const TRI_RULE_4: [([f64; 3], f64); 6] = [
    ([B4_1, A4_1, A4_1], W4_1),
    ([A4_1, B4_1, A4_1], W4_1),
    ([A4_1, A4_1, B4_1], W4_1),
    ([B4_2, A4_2, A4_2], W4_2),
    ([A4_2, B4_2, A4_2], W4_2),
    ([A4_2, A4_2, B4_2], W4_2),
];

/// Quadrature points and weights on a polygon.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct QuadratureRule {
    pub points: Vec<Point2>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// Symmetric rule on a single triangle.
    pub fn triangle(a: Point2, b: Point2, c: Point2, order: usize) -> Result<Self, GeometryError> {
        let area = triangle_signed_area(a, b, c);
        let mut rule = QuadratureRule::default();
        rule.push_triangle(a, b, c, area, order)?;
        Ok(rule)
    }

    /// Fans the polygon around its centroid and applies a symmetric triangle
    /// rule of the given order (2 or 4) on every sub-triangle.
    pub fn fan(poly: &Polygon, order: usize) -> Result<Self, GeometryError> {
        let c = poly.centroid()?;
        let h = poly.diameter();
        let n = poly.len();
        let mut rule = QuadratureRule {
            points: Vec::with_capacity(n * 6),
            weights: Vec::with_capacity(n * 6),
        };
        for i in 0..n {
            let (a, b) = poly.edge(i);
            let area = triangle_signed_area(c, a, b);
            if !(area > 1e-14 * h * h) {
                return Err(GeometryError::InvertedSubTriangle { triangle: i });
            }
            rule.push_triangle(c, a, b, area, order)?;
        }
        Ok(rule)
    }

    fn push_triangle(
        &mut self,
        a: Point2,
        b: Point2,
        c: Point2,
        area: f64,
        order: usize,
    ) -> Result<(), GeometryError> {
        let table: &[([f64; 3], f64)] = match order {
            2 => &TRI_RULE_2,
            4 => &TRI_RULE_4,
            other => return Err(GeometryError::UnsupportedOrder(other)),
        };
        for (bary, w) in table {
            self.points.push(Point2::new(
                bary[0] * a.x + bary[1] * b.x + bary[2] * c.x,
                bary[0] * a.y + bary[1] * b.y + bary[2] * c.y,
            ));
            self.weights.push(w * area);
        }
        Ok(())
    }

    pub fn integrate<F: Fn(Point2) -> f64>(&self, f: F) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(*p))
            .sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}
