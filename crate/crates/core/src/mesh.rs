//! Polygonal meshes of the unit square: data model, generators, validation
//! and the JSON interchange format.
//!
//! A mesh is a vertex list plus counter-clockwise index loops, one per cell.
//! Edge topology is derived on construction. Hanging nodes are ordinary
//! polygon vertices: a square with a midpoint on one side is a pentagon.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;
use thiserror::Error;

use crate::geometry::{triangle_signed_area, GeometryError, Point2, Polygon};

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("hexagon family requires n >= 2, got {0}")]
    UnsupportedResolution(usize),
    #[error("invalid mesh family spec: {0}")]
    InvalidSpec(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("mesh failed validation:\n{0}")]
    Validation(ValidationReport),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeshFamily {
    Quad,
    PerturbedQuad,
    Triangle,
    Hexagon,
    HangingNode,
}

impl MeshFamily {
    pub const ALL: [MeshFamily; 5] = [
        MeshFamily::Quad,
        MeshFamily::PerturbedQuad,
        MeshFamily::Triangle,
        MeshFamily::Hexagon,
        MeshFamily::HangingNode,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeshFamily::Quad => "quad",
            MeshFamily::PerturbedQuad => "perturbed_quad",
            MeshFamily::Triangle => "triangle",
            MeshFamily::Hexagon => "hexagon",
            MeshFamily::HangingNode => "hanging_node",
        }
    }
}

impl fmt::Display for MeshFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeshFamily {
    type Err = MeshError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MeshFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| MeshError::InvalidSpec(format!("unknown family {s:?}")))
    }
}

/// Parameters of a generated mesh of [0,1]².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshFamilySpec {
    pub family: MeshFamily,
    pub resolution: usize,
    /// Maximum interior vertex displacement as a fraction of 1/n, per
    /// coordinate. Only used by the perturbed family.
    pub perturbation: f64,
    pub seed: u64,
}

impl MeshFamilySpec {
    pub const DEFAULT_PERTURBATION: f64 = 0.2;
    pub const DEFAULT_SEED: u64 = 1;

    pub fn new(family: MeshFamily, resolution: usize) -> Self {
        Self {
            family,
            resolution,
            perturbation: Self::DEFAULT_PERTURBATION,
            seed: Self::DEFAULT_SEED,
        }
    }

    pub fn with_resolution(self, resolution: usize) -> Self {
        Self { resolution, ..self }
    }
}

/// SplitMix64 generator.
///
/// ```text
/// state += 0x9E3779B97F4A7C15
/// z = state
/// z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
/// z = (z ^ (z >> 27)) * 0x94D049BB133111EB
/// return z ^ (z >> 31)
/// ```
///
/// A uniform double in [0, 1) is `(next >> 11) * 2^-53`. Meshes depend on
/// nothing else, so any implementation of this recurrence reproduces them.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [-1, 1).
    pub fn next_signed(&mut self) -> f64 {
        2.0 * self.next_f64() - 1.0
    }
}

/// An undirected mesh edge with its incident cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    /// (min, max) vertex indices.
    pub vertices: (usize, usize),
    pub cells: Vec<usize>,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.cells.len() == 1
    }
}

#[derive(Debug, Clone)]
pub struct PolygonalMesh {
    vertices: Vec<Point2>,
    cells: Vec<Vec<usize>>,
    edges: Vec<Edge>,
    boundary_flags: Vec<bool>,
}

impl PartialEq for PolygonalMesh {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.cells == other.cells
    }
}

impl PolygonalMesh {
    /// Builds the derived topology. Out-of-range indices are skipped here and
    /// reported by [`PolygonalMesh::validate`].
    pub fn new(vertices: Vec<Point2>, cells: Vec<Vec<usize>>) -> Self {
        let nv = vertices.len();
        let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        for (c, cell) in cells.iter().enumerate() {
            let k = cell.len();
            for i in 0..k {
                let (a, b) = (cell[i], cell[(i + 1) % k]);
                if a >= nv || b >= nv || a == b {
                    continue;
                }
                let key = (a.min(b), a.max(b));
                let e = *index.entry(key).or_insert_with(|| {
                    edges.push(Edge {
                        vertices: key,
                        cells: Vec::new(),
                    });
                    edges.len() - 1
                });
                edges[e].cells.push(c);
            }
        }
        let mut boundary_flags = vec![false; nv];
        for e in edges.iter().filter(|e| e.is_boundary()) {
            boundary_flags[e.vertices.0] = true;
            boundary_flags[e.vertices.1] = true;
        }
        Self {
            vertices,
            cells,
            edges,
            boundary_flags,
        }
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_flags[v]
    }

    /// Vertices on at least one edge that has exactly one incident cell.
    pub fn boundary_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&v| self.boundary_flags[v])
            .collect()
    }

    pub fn cell_points(&self, c: usize) -> Vec<Point2> {
        self.cells[c].iter().map(|&v| self.vertices[v]).collect()
    }

    pub fn cell_polygon(&self, c: usize) -> Result<Polygon, GeometryError> {
        Polygon::new(self.cell_points(c))
    }

    /// Largest cell diameter.
    pub fn h_max(&self) -> f64 {
        (0..self.cells.len())
            .filter_map(|c| self.cell_polygon(c).ok())
            .map(|p| p.diameter())
            .fold(0.0, f64::max)
    }

    /// Checks every structural invariant and lists all violations.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let nv = self.vertices.len();
        if self.cells.is_empty() {
            report.push(Violation::Empty);
        }
        for (v, p) in self.vertices.iter().enumerate() {
            if !p.is_finite() {
                report.push(Violation::NonFiniteVertex { vertex: v });
            }
        }

        let mut used = vec![false; nv];
        for (c, cell) in self.cells.iter().enumerate() {
            if cell.len() < 3 {
                report.push(Violation::TooFewVertices { cell: c });
                continue;
            }
            if let Some(&v) = cell.iter().find(|&&v| v >= nv) {
                report.push(Violation::IndexOutOfRange { cell: c, vertex: v });
                continue;
            }
            let mut sorted = cell.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                report.push(Violation::RepeatedIndex { cell: c });
                continue;
            }
            for &v in cell {
                used[v] = true;
            }
            let poly = match self.cell_polygon(c) {
                Ok(p) => p,
                Err(_) => continue,
            };
            let signed = poly.signed_area();
            let h = poly.diameter();
            if signed < -1e-14 * h * h {
                report.push(Violation::Orientation { cell: c, signed_area: signed });
                continue;
            }
            if signed <= 1e-14 * h * h {
                report.push(Violation::NonPositiveArea { cell: c, area: signed });
                continue;
            }
            if let Ok(centroid) = poly.centroid() {
                let k = poly.len();
                let star = (0..k).all(|i| {
                    let (a, b) = poly.edge(i);
                    triangle_signed_area(centroid, a, b) > 1e-14 * h * h
                });
                if !star {
                    report.push(Violation::NotStarShaped { cell: c });
                }
            }
        }

        for (v, u) in used.iter().enumerate() {
            if !u {
                report.push(Violation::OrphanVertex { vertex: v });
            }
        }

        let scale = self.domain_diameter();
        let mut seen: HashMap<(i64, i64), usize> = HashMap::new();
        let cell_size = (1e-12 * scale).max(f64::MIN_POSITIVE);
        for (v, p) in self.vertices.iter().enumerate() {
            if !p.is_finite() {
                continue;
            }
            let key = ((p.x / cell_size).floor() as i64, (p.y / cell_size).floor() as i64);
            // neighbouring buckets catch pairs straddling a bucket boundary
            for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(&w) = seen.get(&(key.0 + dx, key.1 + dy)) {
                        if self.vertices[w].distance(*p) <= cell_size {
                            report.push(Violation::DuplicateVertex { first: w, second: v });
                        }
                    }
                }
            }
            seen.entry(key).or_insert(v);
        }

        for e in &self.edges {
            match e.cells.len() {
                1 => {}
                2 => {
                    let dir0 = self.traverses(e.cells[0], e.vertices);
                    let dir1 = self.traverses(e.cells[1], e.vertices);
                    if dir0 == dir1 {
                        report.push(Violation::InconsistentEdgeOrientation { edge: e.vertices });
                    }
                }
                k => report.push(Violation::NonManifoldEdge {
                    edge: e.vertices,
                    incident_cells: k,
                }),
            }
        }
        report
    }

    /// True if cell `c` walks the edge from `e.0` to `e.1`.
    fn traverses(&self, c: usize, e: (usize, usize)) -> bool {
        let cell = &self.cells[c];
        let k = cell.len();
        (0..k).any(|i| cell[i] == e.0 && cell[(i + 1) % k] == e.1)
    }

    fn domain_diameter(&self) -> f64 {
        let finite = self.vertices.iter().filter(|p| p.is_finite());
        let (mut lo, mut hi) = (
            Point2::new(f64::INFINITY, f64::INFINITY),
            Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        );
        for p in finite {
            lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        if lo.x > hi.x {
            0.0
        } else {
            hi.distance(lo)
        }
    }

    /// Serializes to the JSON interchange format. Coordinates carry 17
    /// significant digits, which round-trips every f64 exactly.
    pub fn to_json(&self) -> String {
        let mut s = String::from("{\n  \"vertices\": [\n");
        for (i, p) in self.vertices.iter().enumerate() {
            let sep = if i + 1 == self.vertices.len() { "" } else { "," };
            let _ = writeln!(s, "    [{:.16e}, {:.16e}]{sep}", p.x, p.y);
        }
        s.push_str("  ],\n  \"cells\": [\n");
        for (i, cell) in self.cells.iter().enumerate() {
            let sep = if i + 1 == self.cells.len() { "" } else { "," };
            let idx: Vec<String> = cell.iter().map(usize::to_string).collect();
            let _ = writeln!(s, "    [{}]{sep}", idx.join(", "));
        }
        s.push_str("  ]\n}\n");
        s
    }

    /// Parses the JSON interchange format and validates the result.
    pub fn from_json(text: &str) -> Result<Self, MeshError> {
        #[derive(Deserialize)]
        struct Doc {
            vertices: Vec<[f64; 2]>,
            cells: Vec<Vec<usize>>,
        }
        let doc: Doc = serde_json::from_str(text).map_err(|e| MeshError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let mesh = PolygonalMesh::new(
            doc.vertices.iter().map(|v| Point2::new(v[0], v[1])).collect(),
            doc.cells,
        );
        let report = mesh.validate();
        if !report.is_valid() {
            return Err(MeshError::Validation(report));
        }
        Ok(mesh)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<(), MeshError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self, MeshError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Empty,
    NonFiniteVertex { vertex: usize },
    TooFewVertices { cell: usize },
    IndexOutOfRange { cell: usize, vertex: usize },
    RepeatedIndex { cell: usize },
    Orientation { cell: usize, signed_area: f64 },
    NonPositiveArea { cell: usize, area: f64 },
    NotStarShaped { cell: usize },
    OrphanVertex { vertex: usize },
    DuplicateVertex { first: usize, second: usize },
    NonManifoldEdge { edge: (usize, usize), incident_cells: usize },
    InconsistentEdgeOrientation { edge: (usize, usize) },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "mesh has no cells"),
            Violation::NonFiniteVertex { vertex } => write!(f, "vertex {vertex} is not finite"),
            Violation::TooFewVertices { cell } => write!(f, "cell {cell} has fewer than 3 vertices"),
            Violation::IndexOutOfRange { cell, vertex } => {
                write!(f, "cell {cell} references missing vertex {vertex}")
            }
            Violation::RepeatedIndex { cell } => write!(f, "cell {cell} repeats a vertex index"),
            Violation::Orientation { cell, signed_area } => {
                write!(f, "cell {cell} is clockwise (signed area {signed_area:e})")
            }
            Violation::NonPositiveArea { cell, area } => {
                write!(f, "cell {cell} has non-positive area {area:e}")
            }
            Violation::NotStarShaped { cell } => {
                write!(f, "cell {cell} is not star-shaped w.r.t. its centroid")
            }
            Violation::OrphanVertex { vertex } => write!(f, "vertex {vertex} belongs to no cell"),
            Violation::DuplicateVertex { first, second } => {
                write!(f, "vertices {first} and {second} coincide")
            }
            Violation::NonManifoldEdge { edge, incident_cells } => write!(
                f,
                "edge ({}, {}) has {incident_cells} incident cells",
                edge.0, edge.1
            ),
            Violation::InconsistentEdgeOrientation { edge } => write!(
                f,
                "edge ({}, {}) is traversed in the same direction by both cells",
                edge.0, edge.1
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

/// Generates a mesh of the unit square.
pub fn generate(spec: &MeshFamilySpec) -> Result<PolygonalMesh, MeshError> {
    let n = spec.resolution;
    if n == 0 {
        return Err(MeshError::InvalidSpec("resolution must be >= 1".into()));
    }
    if !(0.0..0.5).contains(&spec.perturbation) {
        return Err(MeshError::InvalidSpec(format!(
            "perturbation {} outside [0, 0.5)",
            spec.perturbation
        )));
    }
    Ok(match spec.family {
        MeshFamily::Quad => quad_grid(n),
        MeshFamily::PerturbedQuad => perturbed_quad(n, spec.perturbation, spec.seed),
        MeshFamily::Triangle => triangle_grid(n),
        MeshFamily::Hexagon => {
            if n < 2 {
                return Err(MeshError::UnsupportedResolution(n));
            }
            hexagon_tiling(n)
        }
        MeshFamily::HangingNode => hanging_node(n),
    })
}

fn grid_vertices(n: usize) -> Vec<Point2> {
    let h = 1.0 / n as f64;
    let mut v = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            v.push(Point2::new(i as f64 * h, j as f64 * h));
        }
    }
    v
}

fn quad_grid(n: usize) -> PolygonalMesh {
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut cells = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            cells.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    PolygonalMesh::new(grid_vertices(n), cells)
}

fn perturbed_quad(n: usize, perturbation: f64, seed: u64) -> PolygonalMesh {
    let mut mesh = quad_grid(n);
    let mut rng = SplitMix64::new(seed);
    let amp = perturbation / n as f64;
    for j in 1..n {
        for i in 1..n {
            let v = &mut mesh.vertices[j * (n + 1) + i];
            let dx = amp * rng.next_signed();
            let dy = amp * rng.next_signed();
            *v = Point2::new(v.x + dx, v.y + dy);
        }
    }
    mesh
}

fn triangle_grid(n: usize) -> PolygonalMesh {
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut cells = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            cells.push(vec![id(i, j), id(i + 1, j), id(i, j + 1)]);
            cells.push(vec![id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    PolygonalMesh::new(grid_vertices(n), cells)
}

/// Interns integer lattice points so cells share vertex indices exactly.
struct LatticeVertices {
    index: HashMap<(i64, i64), usize>,
    points: Vec<(i64, i64)>,
}

impl LatticeVertices {
    fn new() -> Self {
        Self {
            index: HashMap::new(),
            points: Vec::new(),
        }
    }

    fn id(&mut self, p: (i64, i64)) -> usize {
        *self.index.entry(p).or_insert_with(|| {
            self.points.push(p);
            self.points.len() - 1
        })
    }

    fn into_points(self, sx: f64, sy: f64) -> Vec<Point2> {
        self.points
            .into_iter()
            .map(|(i, j)| Point2::new(i as f64 * sx, j as f64 * sy))
            .collect()
    }
}

/// n×n squares; squares inside [0, 0.5]² are split into four, so their
/// unrefined neighbours gain midpoint vertices.
fn hanging_node(n: usize) -> PolygonalMesh {
    // lattice of half-cells: coordinate k ↦ k / (2n)
    let m = 2 * n as i64;
    let refined = |i: i64, j: i64| 2 * (i + 1) <= n as i64 && 2 * (j + 1) <= n as i64;
    let refined_at = |i: i64, j: i64| i >= 0 && j >= 0 && i < n as i64 && j < n as i64 && refined(i, j);
    let mut lat = LatticeVertices::new();
    let mut cells = Vec::new();
    for j in 0..n as i64 {
        for i in 0..n as i64 {
            let (x0, y0) = (2 * i, 2 * j);
            if refined(i, j) {
                for (di, dj) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                    let (a, b) = (x0 + di, y0 + dj);
                    cells.push(vec![
                        lat.id((a, b)),
                        lat.id((a + 1, b)),
                        lat.id((a + 1, b + 1)),
                        lat.id((a, b + 1)),
                    ]);
                }
                continue;
            }
            // walk the boundary CCW, inserting the midpoint of every side
            // shared with a refined neighbour
            let mut loop_ = vec![lat.id((x0, y0))];
            if refined_at(i, j - 1) {
                loop_.push(lat.id((x0 + 1, y0)));
            }
            loop_.push(lat.id((x0 + 2, y0)));
            if refined_at(i + 1, j) {
                loop_.push(lat.id((x0 + 2, y0 + 1)));
            }
            loop_.push(lat.id((x0 + 2, y0 + 2)));
            if refined_at(i, j + 1) {
                loop_.push(lat.id((x0 + 1, y0 + 2)));
            }
            loop_.push(lat.id((x0, y0 + 2)));
            if refined_at(i - 1, j) {
                loop_.push(lat.id((x0, y0 + 1)));
            }
            cells.push(loop_);
        }
    }
    let s = 1.0 / m as f64;
    PolygonalMesh::new(lat.into_points(s, s), cells)
}

/// Hexagon-dominant tiling clipped to the unit square.
///
/// Pointy-top hexagons of width 1/n sit in rows whose centres lie on
/// y = r / (m − 1), odd rows shifted by half a width. The square clips the
/// first and last rows through their side midpoints and the odd rows through
/// their top and bottom vertices, so the boundary cells are pentagons and
/// quadrilaterals. Everything is built on an integer lattice with unit
/// w/2 horizontally and s/2 vertically (s the hexagon side).
fn hexagon_tiling(n: usize) -> PolygonalMesh {
    let spacings = ((n as f64) * 2.0 / 3f64.sqrt()).round().max(1.0) as i64;
    let rows = spacings + 1;
    let xmax = 2 * n as i64;
    let ymax = 3 * spacings;
    let mut lat = LatticeVertices::new();
    let mut cells = Vec::new();
    for r in 0..rows {
        let cy = 3 * r;
        let centres: Vec<i64> = if r % 2 == 0 {
            (0..n as i64).map(|i| 2 * i + 1).collect()
        } else {
            (0..=n as i64).map(|i| 2 * i).collect()
        };
        for cx in centres {
            let hex = [
                (cx, cy - 2),
                (cx + 1, cy - 1),
                (cx + 1, cy + 1),
                (cx, cy + 2),
                (cx - 1, cy + 1),
                (cx - 1, cy - 1),
            ];
            let clipped = clip_to_box(&hex, xmax, ymax);
            if clipped.len() < 3 {
                continue;
            }
            cells.push(clipped.into_iter().map(|p| lat.id(p)).collect());
        }
    }
    let sx = 1.0 / xmax as f64;
    let sy = 1.0 / ymax as f64;
    PolygonalMesh::new(lat.into_points(sx, sy), cells)
}

/// Sutherland–Hodgman clip of a convex lattice polygon to [0, xmax]×[0, ymax].
/// Every crossing in the hexagon tiling is an edge midpoint on the lattice.
fn clip_to_box(poly: &[(i64, i64)], xmax: i64, ymax: i64) -> Vec<(i64, i64)> {
    // each half-plane as (axis, bound, keep_below)
    let planes = [(0, 0, false), (0, xmax, true), (1, 0, false), (1, ymax, true)];
    let mut pts: Vec<(i64, i64)> = poly.to_vec();
    for (axis, bound, below) in planes {
        let coord = |p: (i64, i64)| if axis == 0 { p.0 } else { p.1 };
        let inside = |p: (i64, i64)| if below { coord(p) <= bound } else { coord(p) >= bound };
        let mut out = Vec::new();
        for k in 0..pts.len() {
            let a = pts[k];
            let b = pts[(k + 1) % pts.len()];
            if inside(a) {
                out.push(a);
            }
            if inside(a) != inside(b) && coord(a) != bound && coord(b) != bound {
                let (da, db) = (coord(a) - bound, coord(b) - bound);
                let t_num = da;
                let t_den = da - db;
                let x = a.0 * t_den + (b.0 - a.0) * t_num;
                let y = a.1 * t_den + (b.1 - a.1) * t_num;
                debug_assert!(x % t_den == 0 && y % t_den == 0);
                out.push((x / t_den, y / t_den));
            }
        }
        out.dedup();
        while out.len() > 1 && out.first() == out.last() {
            out.pop();
        }
        pts = out;
        if pts.is_empty() {
            break;
        }
    }
    pts
}
