//! SVG rendering of meshes and cell-wise solution values.
//!
//! Colors come from a 256-step diverging map. A value v in [lo, hi] maps to
//! step k = min(255, ⌊256 (v − lo)/(hi − lo)⌋); step k is the piecewise-linear
//! blend at s = k/255 of
//!
//! ```text
//! s = 0.0   (59, 76, 192)    blue
//! s = 0.5   (221, 221, 221)  grey
//! s = 1.0   (180, 4, 38)     red
//! ```
//!
//! with channels rounded to the nearest integer. A constant field uses the
//! middle step.

use std::fmt::Write as _;

use crate::geometry::Point2;
use crate::mesh::PolygonalMesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl Rgb {
    pub fn hex(self) -> String {
        format!("#{:02x}{:02x}{:02x}", self.0, self.1, self.2)
    }
}

const STOPS: [(f64, [f64; 3]); 3] = [
    (0.0, [59.0, 76.0, 192.0]),
    (0.5, [221.0, 221.0, 221.0]),
    (1.0, [180.0, 4.0, 38.0]),
];

pub const COLOR_STEPS: usize = 256;

/// Color of step `k` in 0..256.
pub fn color_step(k: usize) -> Rgb {
    let s = k.min(COLOR_STEPS - 1) as f64 / (COLOR_STEPS - 1) as f64;
    let (lo, hi) = if s <= 0.5 { (STOPS[0], STOPS[1]) } else { (STOPS[1], STOPS[2]) };
    let t = (s - lo.0) / (hi.0 - lo.0);
    let ch = |i: usize| (lo.1[i] + t * (hi.1[i] - lo.1[i])).round() as u8;
    Rgb(ch(0), ch(1), ch(2))
}

/// Quantized color of `v` on the range [lo, hi].
pub fn color_map(v: f64, lo: f64, hi: f64) -> Rgb {
    if !(hi > lo) {
        return color_step(COLOR_STEPS / 2);
    }
    let t = ((v - lo) / (hi - lo)).clamp(0.0, 1.0);
    color_step(((t * COLOR_STEPS as f64).floor() as usize).min(COLOR_STEPS - 1))
}

/// A set of filled or outlined polygons mapped onto a square canvas.
#[derive(Debug, Clone)]
pub struct SvgScene {
    pub size: f64,
    pub margin: f64,
    pub polygons: Vec<(Vec<Point2>, Option<Rgb>)>,
    /// Value range for a colorbar legend.
    pub colorbar: Option<(f64, f64)>,
}

impl SvgScene {
    /// Mesh wireframe; `values` (one per cell) fill the cells when given.
    pub fn from_mesh(mesh: &PolygonalMesh, values: Option<&[f64]>) -> Self {
        let range = values.map(|v| {
            v.iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
        });
        let polygons = (0..mesh.n_cells())
            .map(|c| {
                let fill = match (values, range) {
                    (Some(v), Some((lo, hi))) => Some(color_map(v[c], lo, hi)),
                    _ => None,
                };
                (mesh.cell_points(c), fill)
            })
            .collect();
        Self {
            size: 512.0,
            margin: 16.0,
            polygons,
            colorbar: range,
        }
    }

    /// Serializes to an SVG 1.1 document. Output depends only on the scene.
    pub fn render(&self) -> String {
        let (mut lo, mut hi) = (
            Point2::new(f64::INFINITY, f64::INFINITY),
            Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        );
        for p in self.polygons.iter().flat_map(|(pts, _)| pts) {
            lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let extent = (hi.x - lo.x).max(hi.y - lo.y);
        let scale = if extent > 0.0 {
            (self.size - 2.0 * self.margin) / extent
        } else {
            1.0
        };
        // y axis flipped so the mesh appears in the usual orientation
        let map = |p: &Point2| {
            (
                self.margin + (p.x - lo.x) * scale,
                self.size - self.margin - (p.y - lo.y) * scale,
            )
        };
        let bar = if self.colorbar.is_some() { 80.0 } else { 0.0 };
        let width = self.size + bar;

        let mut s = String::new();
        let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0}" height="{:.0}" viewBox="0 0 {width:.0} {:.0}">"#,
            self.size, self.size
        );
        let _ = writeln!(s, r#"<rect x="0" y="0" width="{width:.0}" height="{:.0}" fill="white"/>"#, self.size);
        for (pts, fill) in &self.polygons {
            let mut d = String::new();
            for (k, p) in pts.iter().enumerate() {
                let (x, y) = map(p);
                let _ = write!(d, "{}{x:.3},{y:.3} ", if k == 0 { "M" } else { "L" });
            }
            d.push('Z');
            let fill = fill.map_or_else(|| "none".to_string(), Rgb::hex);
            let _ = writeln!(s, r#"<path d="{d}" fill="{fill}" stroke="black" stroke-width="0.5"/>"#);
        }
        if let Some((vlo, vhi)) = self.colorbar {
            let x = self.size + 10.0;
            let h = (self.size - 2.0 * self.margin) / COLOR_STEPS as f64;
            for k in 0..COLOR_STEPS {
                let y = self.size - self.margin - (k + 1) as f64 * h;
                let _ = writeln!(
                    s,
                    r#"<rect x="{x:.3}" y="{y:.3}" width="20" height="{:.3}" fill="{}"/>"#,
                    h + 0.01,
                    color_step(k).hex()
                );
            }
            let _ = writeln!(
                s,
                r#"<text x="{:.3}" y="{:.3}" font-size="10">{vhi:.4e}</text>"#,
                x + 24.0,
                self.margin + 8.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.3}" y="{:.3}" font-size="10">{vlo:.4e}</text>"#,
                x + 24.0,
                self.size - self.margin
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate, MeshFamily, MeshFamilySpec};

    #[test]
    fn color_map_ends() {
        assert_eq!(color_step(0), Rgb(59, 76, 192));
        assert_eq!(color_step(255), Rgb(180, 4, 38));
        assert_eq!(color_map(0.0, 0.0, 1.0), Rgb(59, 76, 192));
        assert_eq!(color_map(1.0, 0.0, 1.0), Rgb(180, 4, 38));
        assert_eq!(color_map(3.0, 3.0, 3.0), color_step(128));
    }

    #[test]
    fn wireframe_has_one_path_per_cell() {
        let m = generate(&MeshFamilySpec::new(MeshFamily::Quad, 2)).unwrap();
        let svg = SvgScene::from_mesh(&m, None).render();
        assert_eq!(svg.matches("<path").count(), 4);
        assert!(svg.contains(r#"fill="none""#));
        assert_eq!(svg, SvgScene::from_mesh(&m, None).render());
    }
}
