//! Unit sphere of the polygonal sub-Finsler distance.
//!
//! The disk Q is covered by the panels `Q_ij`, `j = i + m (mod 2N)`:
//! - `m = 1`: wall panel, the `i`-th edge of Q;
//! - `2 <= m <= 2N-1`: ceiling/basement quadrilaterals;
//! - `m = 0`: star segment `u_ii(r, 0)`, the trace of a full lap minus `(1-r) sigma_i`.
//!
//! The ball is `{gauge(v) <= 1, |t| <= Phi(v)}` with `Phi` the trace-path height
//! `phi_ij` over the panel containing `v`. On the star segment `r = 1` is the
//! origin and `r = 0` is the far tip.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heisenberg::HeisPoint;
use crate::plane::{omega, Vec2};
use crate::polygon::Polygon;

/// Distance to a seam locus below which a sphere point counts as a seam point.
pub const SEAM_BRACKET: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Ceiling,
    Basement,
    Wall,
    Star,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Ceiling => "ceiling",
            Side::Basement => "basement",
            Side::Wall => "wall",
            Side::Star => "star",
        }
    }
}

/// Trace-path coordinates of a point of Q.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PanelCoords {
    pub i: usize,
    pub j: usize,
    pub r: f64,
    pub s: f64,
    pub side: Side,
}

impl PanelCoords {
    pub fn new(i: usize, j: usize, r: f64, s: f64, side: Side) -> Self {
        Self { i, j, r, s, side }
    }
}

/// `(j - i) mod 2N` with the star panel reported as `2N`.
#[inline]
fn span(g: &Polygon, i: usize, j: usize) -> usize {
    let m = g.len();
    match (j + m - i) % m {
        0 => m,
        d => d,
    }
}

fn check_coords(g: &Polygon, c: &PanelCoords) -> Result<usize> {
    let tol = g.tol();
    if c.i >= g.len() || c.j >= g.len() {
        return Err(Error::InvalidCoords(format!("index out of range in {c:?}")));
    }
    if !(c.r >= -tol && c.r <= 1.0 + tol && c.s >= -tol && c.s <= 1.0 + tol) {
        return Err(Error::InvalidCoords(format!("r, s outside [0, 1] in {c:?}")));
    }
    let m = span(g, c.i, c.j);
    let side_ok = match c.side {
        Side::Wall => m == 1,
        Side::Star => m == g.len(),
        Side::Ceiling | Side::Basement => m >= 2,
    };
    if !side_ok {
        return Err(Error::InvalidCoords(format!("side does not match panel in {c:?}")));
    }
    if m == g.len() && c.r + c.s > 1.0 + tol {
        return Err(Error::InvalidCoords(format!("star panel needs r + s <= 1 in {c:?}")));
    }
    Ok(m)
}

/// The traced vectors `r sigma_i, sigma_{i+1}, ..., sigma_{j-1}, s sigma_j` and `mu`.
pub fn trace_vectors(g: &Polygon, c: &PanelCoords) -> Result<(Vec<Vec2>, f64)> {
    let m = check_coords(g, c)?;
    let (i, j) = (c.i as isize, c.j as isize);
    let mut out = Vec::with_capacity(m + 1);
    out.push(g.sigma(i) * c.r);
    for k in 1..m as isize {
        out.push(g.sigma(i + k));
    }
    out.push(g.sigma(j) * c.s);
    let (_, mid) = g.middle_sums(c.i, m);
    let mu = c.r * g.sigma_norm(i) + mid + c.s * g.sigma_norm(j);
    if mu <= g.tol() {
        return Err(Error::DegenerateMu { i: c.i, j: c.j });
    }
    Ok((out, mu))
}

/// `u_ij(r, s) = (r sigma_i + sigma_ij + s sigma_j) / mu`.
pub fn panel_endpoint(g: &Polygon, c: &PanelCoords) -> Result<Vec2> {
    let m = check_coords(g, c)?;
    let (i, j) = (c.i as isize, c.j as isize);
    let (mid, len) = g.middle_sums(c.i, m);
    let mu = c.r * g.sigma_norm(i) + len + c.s * g.sigma_norm(j);
    if mu <= g.tol() {
        return Err(Error::DegenerateMu { i: c.i, j: c.j });
    }
    Ok((g.sigma(i) * c.r + mid + g.sigma(j) * c.s) / mu)
}

/// `phi_ij(r, s)`: balayage area of the unit-length trace path, always `>= 0`.
pub fn panel_height(g: &Polygon, c: &PanelCoords) -> Result<f64> {
    let (vecs, mu) = trace_vectors(g, c)?;
    let mut prefix = Vec2::ZERO;
    let mut twice = 0.0;
    for &u in &vecs {
        twice += omega(prefix, u);
        prefix += u;
    }
    Ok(twice / (2.0 * mu * mu))
}

/// First derivatives of `u` and `phi` in the trace coordinates.
#[derive(Clone, Copy, Debug)]
pub struct PanelPartials {
    pub du_dr: Vec2,
    pub du_ds: Vec2,
    pub dphi_dr: f64,
    pub dphi_ds: f64,
}

pub fn panel_partials(g: &Polygon, c: &PanelCoords) -> Result<PanelPartials> {
    let (_, mu) = trace_vectors(g, c)?;
    let u = panel_endpoint(g, c)?;
    let phi = panel_height(g, c)?;
    let (i, j) = (c.i as isize, c.j as isize);
    let (ni, nj) = (g.sigma_norm(i), g.sigma_norm(j));
    let (vi, vj) = (g.v(i), g.v(j));
    Ok(PanelPartials {
        du_dr: (vi - u) * (ni / mu),
        du_ds: (vj - u) * (nj / mu),
        dphi_dr: ni / mu * (0.5 * omega(vi, u - g.sigma(i) * (c.r / mu)) - 2.0 * phi),
        dphi_ds: nj / mu * (0.5 * omega(u - g.sigma(j) * (c.s / mu), vj) - 2.0 * phi),
    })
}

/// `F_i(v) = omega(v_i, v) omega(v, v_{i+1}) / (2 omega(v_i, v_{i+1}))` on the cone `C_i^+`.
pub fn wall_bound(g: &Polygon, i: usize, v: Vec2) -> Result<f64> {
    let (a, b) = (g.v(i as isize), g.v(i as isize + 1));
    let (p, q) = (omega(a, v), omega(v, b));
    let slack = g.tol() * (1.0 + v.norm2());
    if p < -slack || q < -slack {
        return Err(Error::OutsideCone(i));
    }
    Ok((p.max(0.0) * q.max(0.0)) / (2.0 * omega(a, b)))
}

/// Unbounded wall height formula, used by blow-up fixtures.
pub fn wall_height_formula(g: &Polygon, i: usize, v: Vec2) -> f64 {
    let (a, b) = (g.v(i as isize), g.v(i as isize + 1));
    omega(a, v) * omega(v, b) / (2.0 * omega(a, b))
}

/// Wall coordinates `(r, s)` of a point on edge `i`, normalized so `max(r, s) = 1`.
fn wall_coords(g: &Polygon, i: usize, w: Vec2) -> PanelCoords {
    let (a, b) = (g.v(i as isize), g.v(i as isize + 1));
    let den = omega(a, b);
    let wa = (omega(w, b) / den).max(0.0);
    let wb = (omega(a, w) / den).max(0.0);
    let (na, nb) = (g.sigma_norm(i as isize), g.sigma_norm(i as isize + 1));
    // weight on v_i is r na / (r na + s nb)
    let (x, y) = (wa * nb, wb * na);
    let (r, s) = if x >= y { (1.0, if x > 0.0 { y / x } else { 0.0 }) } else { (x / y, 1.0) };
    PanelCoords::new(i, (i + 1) % g.len(), r, s, Side::Wall)
}

/// Length of the star segment as a multiple of `|v_i|`: `|sigma_i| / (l - |sigma_i|)`.
#[inline]
pub fn star_reach(g: &Polygon, i: usize) -> f64 {
    let n = g.sigma_norm(i as isize);
    n / (g.iso_perimeter - n)
}

/// Star coordinate `r` of `-c v_i`; `r = 0` at the tip.
#[inline]
fn star_r(g: &Polygon, i: usize, c: f64) -> f64 {
    let x = c * g.iso_perimeter / (1.0 + c);
    1.0 - x / g.sigma_norm(i as isize)
}

/// Finds trace coordinates of `w` in Q.
///
/// Precedence: boundary points get wall coordinates, the origin gets
/// `(0, 2N-1, 1, 1)`, everything else the lexicographically smallest
/// `(i, (j - i) mod 2N)` among panels containing it.
pub fn locate_panel(g: &Polygon, w: Vec2) -> Result<PanelCoords> {
    let tol = g.tol();
    let gam = g.gauge(w);
    if gam > 1.0 + tol {
        return Err(Error::OutsideDisk(gam));
    }
    let m = g.len();
    if gam >= 1.0 - tol {
        return Ok(wall_coords(g, g.cone_of(w), w));
    }
    if w.x.abs() <= tol && w.y.abs() <= tol {
        return Ok(PanelCoords::new(0, m - 1, 1.0, 1.0, Side::Ceiling));
    }
    for i in 0..m {
        if let Some(c) = star_fit(g, i, w, tol) {
            return Ok(c);
        }
        for span in 2..m {
            if let Some(c) = quad_fit(g, i, span, w, tol) {
                return Ok(c);
            }
        }
    }
    Err(Error::NoPanelFound(w.x, w.y))
}

fn star_fit(g: &Polygon, i: usize, w: Vec2, tol: f64) -> Option<PanelCoords> {
    let vi = g.v(i as isize);
    let len = vi.norm2();
    if omega(vi, w).abs() > tol * len || w.dot(vi) >= 0.0 {
        return None;
    }
    let c = w.norm2() / len;
    if c > star_reach(g, i) + tol {
        return None;
    }
    let r = star_r(g, i, c).clamp(0.0, 1.0);
    Some(PanelCoords::new(i, i, r, 0.0, Side::Star))
}

fn quad_fit(g: &Polygon, i: usize, span: usize, w: Vec2, tol: f64) -> Option<PanelCoords> {
    let j = (i + span) % g.len();
    let (si, sj) = (g.sigma(i as isize), g.sigma(j as isize));
    let (ni, nj) = (g.sigma_norm(i as isize), g.sigma_norm(j as isize));
    let (mid, len) = g.middle_sums(i, span);
    let c1 = si - w * ni;
    let c2 = sj - w * nj;
    let rhs = w * len - mid;
    let det = omega(c1, c2);
    if det.abs() < 1e-14 {
        return None;
    }
    let r = omega(rhs, c2) / det;
    let s = omega(c1, rhs) / det;
    let ptol = 1e3 * tol;
    if !(r >= -ptol && r <= 1.0 + ptol && s >= -ptol && s <= 1.0 + ptol) {
        return None;
    }
    let c = PanelCoords::new(i, j, r.clamp(0.0, 1.0), s.clamp(0.0, 1.0), Side::Ceiling);
    let back = panel_endpoint(g, &c).ok()?;
    let err = (back - w).norm2();
    (err <= 1e3 * tol).then_some(c)
}

/// Ceiling height `Phi(w)`; the basement is `-Phi(w)`.
pub fn ceiling_height(g: &Polygon, w: Vec2) -> Result<f64> {
    let c = locate_panel(g, w)?;
    panel_height(g, &c)
}

/// Ball membership with an absolute slack `tol` on both constraints.
pub fn unit_ball_contains_tol(g: &Polygon, p: HeisPoint, tol: f64) -> bool {
    let v = p.project();
    let gam = g.gauge(v);
    if gam > 1.0 + tol {
        return false;
    }
    let w = if gam > 1.0 { v / gam } else { v };
    match ceiling_height(g, w) {
        Ok(h) => p.z.abs() <= h + tol,
        Err(_) => false,
    }
}

/// Ball membership with the default geometric tolerance.
pub fn unit_ball_contains(g: &Polygon, p: HeisPoint) -> bool {
    unit_ball_contains_tol(g, p, g.tol())
}

/// Taxonomy of sphere points by blow-up behaviour.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum SphereClass {
    CeilingInterior,
    BasementInterior,
    WallInterior { i: usize },
    NorthPole,
    SouthPole,
    Vertex { i: usize },
    NorthStarSeam { i: usize, r: f64 },
    SouthStarSeam { i: usize, r: f64 },
    StarTip { i: usize, north: bool },
    WallCeilingSeam { i: usize, r: f64, s: f64 },
    WallBasementSeam { i: usize, r: f64, s: f64 },
}

impl SphereClass {
    /// True where `d_e` is Pansu differentiable.
    pub fn is_smooth(&self) -> bool {
        matches!(
            self,
            SphereClass::CeilingInterior
                | SphereClass::BasementInterior
                | SphereClass::WallInterior { .. }
                | SphereClass::StarTip { .. }
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            SphereClass::CeilingInterior => "CeilingInterior",
            SphereClass::BasementInterior => "BasementInterior",
            SphereClass::WallInterior { .. } => "WallInterior",
            SphereClass::NorthPole => "NorthPole",
            SphereClass::SouthPole => "SouthPole",
            SphereClass::Vertex { .. } => "Vertex",
            SphereClass::NorthStarSeam { .. } => "NorthStarSeam",
            SphereClass::SouthStarSeam { .. } => "SouthStarSeam",
            SphereClass::StarTip { .. } => "StarTip",
            SphereClass::WallCeilingSeam { .. } => "WallCeilingSeam",
            SphereClass::WallBasementSeam { .. } => "WallBasementSeam",
        }
    }
}

/// Classifies a point assumed to lie on the unit sphere.
pub fn classify_on_sphere(g: &Polygon, p: HeisPoint) -> SphereClass {
    let b = SEAM_BRACKET;
    let v = p.project();
    let north = p.z > 0.0;
    if v.x.abs() <= b && v.y.abs() <= b {
        return if north { SphereClass::NorthPole } else { SphereClass::SouthPole };
    }
    let gam = g.gauge(v);
    if gam >= 1.0 - b {
        if let Some(i) = (0..g.len()).find(|&k| (v - g.vertices[k]).norm2() <= b) {
            return SphereClass::Vertex { i };
        }
        let w = v / gam;
        let i = g.cone_of(w);
        let c = wall_coords(g, i, w);
        let top = wall_bound(g, i, w).unwrap_or(0.0);
        return if p.z.abs() < top - b {
            SphereClass::WallInterior { i }
        } else if north {
            SphereClass::WallCeilingSeam { i, r: c.r, s: c.s }
        } else {
            SphereClass::WallBasementSeam { i, r: c.r, s: c.s }
        };
    }
    for i in 0..g.len() {
        let vi = g.vertices[i];
        let len = vi.norm2();
        if v.dot(vi) >= 0.0 || omega(vi, v).abs() / len > b {
            continue;
        }
        let c = v.norm2() / len;
        let reach = star_reach(g, i);
        if c > reach + b / len {
            continue;
        }
        if (reach - c) * len <= b {
            return SphereClass::StarTip { i, north };
        }
        let r = star_r(g, i, c).clamp(0.0, 1.0);
        return if north { SphereClass::NorthStarSeam { i, r } } else { SphereClass::SouthStarSeam { i, r } };
    }
    if north {
        SphereClass::CeilingInterior
    } else {
        SphereClass::BasementInterior
    }
}

/// Classifies `p` after checking `|d_e(p) - 1| <= tol`.
pub fn classify_sphere_point(g: &Polygon, p: HeisPoint, tol: f64) -> Result<SphereClass> {
    let d = crate::distance::d_e(g, p);
    if (d - 1.0).abs() > tol {
        return Err(Error::NotOnSphere(d));
    }
    Ok(classify_on_sphere(g, p))
}

/// The sphere point over `w` on the ceiling (`north`) or basement.
pub fn sphere_point_over(g: &Polygon, w: Vec2, north: bool) -> Result<HeisPoint> {
    let h = ceiling_height(g, w)?;
    Ok(HeisPoint::from_parts(w, if north { h } else { -h }))
}
