//! Triangulated unit sphere with per-panel groups and Wavefront OBJ/MTL export.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::format::fmt_num;
use crate::plane::Covector;
use crate::polygon::Polygon;
use crate::sphere::{panel_endpoint, panel_height, wall_bound, PanelCoords, Side};

#[derive(Clone, Debug, PartialEq)]
pub struct MeshGroup {
    /// `panel_<i>_<j>_<side>` with 1-based indices.
    pub name: String,
    /// Material keyed by the Pansu covector at the panel centre.
    pub material: String,
    pub color: [u8; 3],
    pub faces: Vec<[usize; 3]>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    pub groups: Vec<MeshGroup>,
}

/// Colour of a covector on the dual unit circle, by its angle.
pub fn covector_rgb(c: Covector) -> [u8; 3] {
    let hue = (c.b.atan2(c.a).to_degrees() + 360.0) % 360.0;
    let x = 1.0 - ((hue / 60.0) % 2.0 - 1.0).abs();
    let (r, g, b) = match (hue / 60.0) as u32 {
        0 => (1.0, x, 0.0),
        1 => (x, 1.0, 0.0),
        2 => (0.0, 1.0, x),
        3 => (0.0, x, 1.0),
        4 => (x, 0.0, 1.0),
        _ => (1.0, 0.0, x),
    };
    let q = |t: f64| (55.0 + 200.0 * t).round() as u8;
    [q(r), q(g), q(b)]
}

/// `#rrggbb` form of [`covector_rgb`].
pub fn covector_color(c: Covector) -> String {
    let [r, g, b] = covector_rgb(c);
    format!("#{r:02x}{g:02x}{b:02x}")
}

impl Mesh {
    fn push_grid(&mut self, rows: &[Vec<[f64; 3]>], name: String, key: Covector, flip: bool) {
        let base = self.vertices.len();
        let cols = rows[0].len();
        for row in rows {
            self.vertices.extend_from_slice(row);
        }
        let mut faces = Vec::with_capacity(2 * (rows.len() - 1) * (cols - 1));
        for a in 0..rows.len() - 1 {
            for b in 0..cols - 1 {
                let p00 = base + a * cols + b;
                let (p01, p10, p11) = (p00 + 1, p00 + cols, p00 + cols + 1);
                if flip {
                    faces.push([p00, p11, p10]);
                    faces.push([p00, p01, p11]);
                } else {
                    faces.push([p00, p10, p11]);
                    faces.push([p00, p11, p01]);
                }
            }
        }
        let color = covector_rgb(key);
        let material = format!("pd_{:02x}{:02x}{:02x}", color[0], color[1], color[2]);
        self.groups.push(MeshGroup { name, material, color, faces });
    }

    pub fn face_count(&self) -> usize {
        self.groups.iter().map(|g| g.faces.len()).sum()
    }

    pub fn z_range(&self) -> (f64, f64) {
        self.vertices
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v[2]), hi.max(v[2])))
    }

    /// OBJ text; `mtllib` names the companion material file.
    pub fn to_obj(&self, mtllib: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "mtllib {mtllib}");
        for v in &self.vertices {
            let _ = writeln!(s, "v {} {} {}", fmt_num(v[0]), fmt_num(v[1]), fmt_num(v[2]));
        }
        for g in &self.groups {
            let _ = writeln!(s, "g {}", g.name);
            let _ = writeln!(s, "usemtl {}", g.material);
            for f in &g.faces {
                let _ = writeln!(s, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
            }
        }
        s
    }

    /// MTL text with one diffuse colour per distinct material.
    pub fn to_mtl(&self) -> String {
        let mut mats = BTreeMap::new();
        for g in &self.groups {
            mats.insert(g.material.clone(), g.color);
        }
        let mut s = String::new();
        for (name, c) in mats {
            let _ = writeln!(s, "newmtl {name}");
            let _ = writeln!(
                s,
                "Kd {} {} {}",
                fmt_num(c[0] as f64 / 255.0),
                fmt_num(c[1] as f64 / 255.0),
                fmt_num(c[2] as f64 / 255.0)
            );
        }
        s
    }
}

/// Samples every ceiling, basement and wall panel on a `samples x samples` grid.
///
/// Star panels are segments and carry no faces.
pub fn sphere_mesh(g: &Polygon, samples: usize) -> Result<Mesh> {
    if samples < 2 {
        return Err(Error::InvalidArgument(format!("samples must be >= 2, got {samples}")));
    }
    let n = g.len();
    let t = |k: usize| k as f64 / (samples - 1) as f64;
    let mut mesh = Mesh::default();
    for north in [true, false] {
        let side = if north { Side::Ceiling } else { Side::Basement };
        for i in 0..n {
            for m in 2..n {
                let j = (i + m) % n;
                let mut rows = Vec::with_capacity(samples);
                for a in 0..samples {
                    let mut row = Vec::with_capacity(samples);
                    for b in 0..samples {
                        let c = PanelCoords::new(i, j, t(a), t(b), side);
                        let u = panel_endpoint(g, &c)?;
                        let h = panel_height(g, &c)?;
                        row.push([u.x, u.y, if north { h } else { -h }]);
                    }
                    rows.push(row);
                }
                let key = if north {
                    g.alpha(j as isize - 1).lerp(g.alpha(j as isize), 0.5)
                } else {
                    g.alpha(i as isize).lerp(g.alpha(i as isize - 1), 0.5)
                };
                let name = format!("panel_{}_{}_{}", i + 1, j + 1, side.as_str());
                mesh.push_grid(&rows, name, key, !north);
            }
        }
    }
    for i in 0..n {
        let (a, b) = (g.v(i as isize), g.v(i as isize + 1));
        let mut rows = Vec::with_capacity(samples);
        for k in 0..samples {
            let tz = 2.0 * t(k) - 1.0;
            let mut row = Vec::with_capacity(samples);
            for l in 0..samples {
                let w = a + (b - a) * t(l);
                let top = wall_bound(g, i, w)?;
                row.push([w.x, w.y, tz * top]);
            }
            rows.push(row);
        }
        let name = format!("panel_{}_{}_wall", i + 1, (i + 1) % n + 1);
        mesh.push_grid(&rows, name, g.alpha(i as isize), false);
    }
    Ok(mesh)
}
