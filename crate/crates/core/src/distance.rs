//! Distance from the identity, geodesics and Pansu derivatives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heisenberg::{lift, HeisPoint};
use crate::plane::{omega, Covector, Vec2};
use crate::polygon::Polygon;
use crate::sphere::{self, classify_on_sphere, locate_panel, trace_vectors, SphereClass, Side};

/// Exact ball membership: `gauge(v) <= 1` and `|t| <= Phi(v)`.
fn inside(g: &Polygon, p: HeisPoint) -> bool {
    let v = p.project();
    if g.gauge(v) > 1.0 {
        return false;
    }
    match sphere::ceiling_height(g, v) {
        Ok(h) => p.z.abs() <= h,
        Err(_) => false,
    }
}

/// `d(e, p)` by bisection on the dilation parameter.
///
/// The lower bracket is the planar gauge only: `Phi` can exceed the pole
/// height (on wall panels), so `sqrt(|t| / A(I_1))` is not a lower bound.
pub fn d_e(g: &Polygon, p: HeisPoint) -> f64 {
    if p.is_identity() {
        return 0.0;
    }
    let gam = g.gauge(p.project());
    let zr = (p.z.abs() / g.unit_iso_area).sqrt();
    let mut lo = gam;
    let mut hi = gam + 2.0 * zr + 1.0;
    while !inside(g, p.scaled(1.0 / hi)) {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if inside(g, p.scaled(1.0 / mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `d(p, q) = d_e(p^{-1} q)`.
pub fn distance(g: &Polygon, p: HeisPoint, q: HeisPoint) -> f64 {
    d_e(g, p.inv() * q)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeodesicKind {
    Beeline,
    Trace,
    /// Wall points at full wall height, where beeline and trace both apply.
    MixedDegenerate,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeodesicPath {
    pub planar: Vec<Vec2>,
    pub lifted: Vec<HeisPoint>,
    pub length: f64,
    pub kind: GeodesicKind,
}

/// A length-minimizing admissible polyline from `e` to `p`.
pub fn geodesic(g: &Polygon, p: HeisPoint) -> Result<GeodesicPath> {
    if p.is_identity() {
        return Err(Error::OriginPoint);
    }
    let lam = d_e(g, p);
    let q = p.scaled(1.0 / lam);
    let v = q.project();
    let gam = g.gauge(v);
    let (unit, kind) = if gam >= 1.0 - g.tol() {
        beeline(g, v / gam, q.z)
    } else {
        let c = locate_panel(g, v)?;
        let (mut vecs, mu) = trace_vectors(g, &c)?;
        if q.z < 0.0 {
            // reversing the traced sequence flips the swept area
            vecs.reverse();
        }
        let mut pts = vec![Vec2::ZERO];
        for u in vecs {
            let last = *pts.last().unwrap();
            pts.push(last + u / mu);
        }
        (pts, GeodesicKind::Trace)
    };
    let planar: Vec<Vec2> = unit.into_iter().map(|u| u * lam).collect();
    let length = planar.windows(2).map(|w| g.gauge(w[1] - w[0])).sum();
    let lifted = lift(&planar, 0.0);
    Ok(GeodesicPath { planar, lifted, length, kind })
}

/// Two-segment beeline to `(w, t)` with `gauge(w) = 1`: first along `v_i` (t > 0) or
/// `v_{i+1}` (t < 0), then straight to `w`, staying in the cone of edge `i`.
fn beeline(g: &Polygon, w: Vec2, t: f64) -> (Vec<Vec2>, GeodesicKind) {
    let i = g.cone_of(w) as isize;
    let (vi, vj) = (g.v(i), g.v(i + 1));
    let den = omega(vi, vj);
    let a = (omega(w, vj) / den).max(0.0);
    let b = (omega(vi, w) / den).max(0.0);
    let top = 0.5 * a * b * den;
    let kind = if top > 1e-12 && (t.abs() - top).abs() <= 1e-9 {
        GeodesicKind::MixedDegenerate
    } else {
        GeodesicKind::Beeline
    };
    let t = t.clamp(-top, top);
    let corner = if t > 0.0 && b > 0.0 {
        Some(vi * (2.0 * t / (b * den)).min(a))
    } else if t < 0.0 && a > 0.0 {
        Some(vj * (-2.0 * t / (a * den)).min(b))
    } else {
        None
    };
    let pts = match corner {
        Some(c) => vec![Vec2::ZERO, c, w],
        None => vec![Vec2::ZERO, w],
    };
    (pts, kind)
}

/// Pansu derivative of `d_e` at `p`, defined off the seams.
pub fn pansu_derivative(g: &Polygon, p: HeisPoint) -> Result<Covector> {
    if p.is_identity() {
        return Err(Error::OriginPoint);
    }
    let q = p.scaled(1.0 / d_e(g, p));
    pansu_on_sphere(g, q)
}

/// Pansu derivative at a point already on the unit sphere.
pub fn pansu_on_sphere(g: &Polygon, q: HeisPoint) -> Result<Covector> {
    let class = classify_on_sphere(g, q);
    match class {
        SphereClass::WallInterior { i } => Ok(g.alpha(i as isize)),
        SphereClass::StarTip { i, north } => {
            Ok(if north { g.alpha(i as isize - 1) } else { g.alpha(i as isize) })
        }
        SphereClass::CeilingInterior | SphereClass::BasementInterior => {
            let c = locate_panel(g, q.project())?;
            if c.side == Side::Star || c.side == Side::Wall {
                return Err(Error::NotSmoothPoint(format!("{} on a {} panel", class.name(), c.side.as_str())));
            }
            let (i, j) = (c.i as isize, c.j as isize);
            Ok(if q.z > 0.0 {
                g.alpha(j - 1).lerp(g.alpha(j), c.s)
            } else {
                g.alpha(i).lerp(g.alpha(i - 1), c.r)
            })
        }
        other => Err(Error::NotSmoothPoint(other.name().to_string())),
    }
}

/// Difference quotient `(d_e(p * delta_eps(v)) - d_e(p)) / eps`.
pub fn fd_directional(g: &Polygon, p: HeisPoint, v: HeisPoint, eps: f64) -> Result<f64> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::NonPositiveLambda(eps));
    }
    Ok((d_e(g, p * v.scaled(eps)) - d_e(g, p)) / eps)
}
