//! Heisenberg group in exponential coordinates with the 1/2-symplectic law
//! `(x,y,z)(x',y',z') = (x+x', y+y', z+z' + (x y' - x' y)/2)`.

use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::{omega, Vec2};
use crate::polygon::Polygon;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HeisPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl HeisPoint {
    pub const IDENTITY: HeisPoint = HeisPoint { x: 0.0, y: 0.0, z: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    #[inline]
    pub fn from_parts(v: Vec2, z: f64) -> Self {
        Self::new(v.x, v.y, z)
    }

    #[inline]
    pub fn horizontal(v: Vec2) -> Self {
        Self::new(v.x, v.y, 0.0)
    }

    #[inline]
    pub fn project(self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    /// Inverse element `-p`.
    #[inline]
    pub fn inv(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }

    #[inline]
    pub fn is_identity(self) -> bool {
        self.x == 0.0 && self.y == 0.0 && self.z == 0.0
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// `delta_lambda` without the positivity check; callers guarantee `lambda > 0`.
    #[inline]
    pub fn scaled(self, lambda: f64) -> Self {
        Self::new(lambda * self.x, lambda * self.y, lambda * lambda * self.z)
    }

    /// Largest coordinate difference, for comparisons in tests and audits.
    #[inline]
    pub fn dist_max(self, o: HeisPoint) -> f64 {
        (self.x - o.x).abs().max((self.y - o.y).abs()).max((self.z - o.z).abs())
    }
}

impl Mul for HeisPoint {
    type Output = HeisPoint;
    #[inline]
    fn mul(self, q: HeisPoint) -> HeisPoint {
        multiply(self, q)
    }
}

#[inline]
pub fn multiply(p: HeisPoint, q: HeisPoint) -> HeisPoint {
    HeisPoint::new(p.x + q.x, p.y + q.y, p.z + q.z + 0.5 * (p.x * q.y - q.x * p.y))
}

/// Dilation `(lambda x, lambda y, lambda^2 z)`.
pub fn dilate(lambda: f64, p: HeisPoint) -> Result<HeisPoint> {
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(Error::NonPositiveLambda(lambda));
    }
    Ok(p.scaled(lambda))
}

#[inline]
pub fn project(p: HeisPoint) -> Vec2 {
    p.project()
}

/// Signed area swept by the polyline against its start point,
/// `1/2 sum_k omega(P_k - P_0, P_{k+1} - P_0)`.
pub fn balayage_area(points: &[Vec2]) -> f64 {
    let Some(&start) = points.first() else { return 0.0 };
    points
        .windows(2)
        .map(|w| 0.5 * omega(w[0] - start, w[1] - start))
        .sum()
}

/// Horizontal lift starting at `(P_0, z0)`.
///
/// Heights are `z0 + running balayage area + omega(P_0, P_k - P_0)/2`; the
/// last term vanishes for paths starting at the origin.
pub fn lift(points: &[Vec2], z0: f64) -> Vec<HeisPoint> {
    let Some(&start) = points.first() else { return Vec::new() };
    let mut out = Vec::with_capacity(points.len());
    let mut area = 0.0;
    out.push(HeisPoint::from_parts(start, z0));
    for w in points.windows(2) {
        area += 0.5 * omega(w[0] - start, w[1] - start);
        let shift = if start == Vec2::ZERO { 0.0 } else { 0.5 * omega(start, w[1] - start) };
        out.push(HeisPoint::from_parts(w[1], z0 + area + shift));
    }
    out
}

/// Planar part of the involution: reflection fixing `v_{2N}`.
pub fn theta_plane(g: &Polygon, v: Vec2) -> Vec2 {
    let axis = g.v(-1);
    let u = axis / axis.norm2();
    2.0 * v.dot(u) * u - v
}

/// The involutive automorphism `(v, t) -> (Theta v, -t)`.
pub fn theta(p: HeisPoint, g: &Polygon) -> HeisPoint {
    HeisPoint::from_parts(theta_plane(g, p.project()), -p.z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::fixtures::hexagon;

    #[test]
    fn product_example() {
        let p = HeisPoint::new(1.0, 0.0, 0.0) * HeisPoint::new(0.0, 1.0, 0.0);
        assert_eq!(p, HeisPoint::new(1.0, 1.0, 0.5));
    }

    #[test]
    fn identity_and_inverse() {
        let p = HeisPoint::new(0.3, -1.2, 2.5);
        assert_eq!(p * HeisPoint::IDENTITY, p);
        assert_eq!(p * p.inv(), HeisPoint::IDENTITY);
    }

    #[test]
    fn dilation_examples() {
        assert_eq!(dilate(2.0, HeisPoint::new(1.0, 1.0, 1.0)).unwrap(), HeisPoint::new(2.0, 2.0, 4.0));
        let p = HeisPoint::new(0.7, 0.1, -0.4);
        assert_eq!(dilate(1.0, p).unwrap(), p);
        assert!(matches!(dilate(0.0, p), Err(Error::NonPositiveLambda(_))));
        assert!(matches!(dilate(-1.0, p), Err(Error::NonPositiveLambda(_))));
    }

    #[test]
    fn area_examples() {
        let square: Vec<Vec2> = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.0, 0.0)]
            .into_iter()
            .map(|(x, y)| Vec2::new(x, y))
            .collect();
        assert_eq!(balayage_area(&square), 1.0);
        let mut rev = square.clone();
        rev.reverse();
        assert_eq!(balayage_area(&rev), -1.0);
        assert_eq!(balayage_area(&[Vec2::ZERO, Vec2::new(2.0, -3.0)]), 0.0);
        assert_eq!(lift(&square, 0.0).last().copied(), Some(HeisPoint::new(0.0, 0.0, 1.0)));
        assert_eq!(lift(&[Vec2::ZERO, Vec2::new(2.0, -3.0)], 0.0)[1], HeisPoint::new(2.0, -3.0, 0.0));
    }

    #[test]
    fn lift_from_offset_start_is_admissible() {
        let pts = [Vec2::new(1.0, 2.0), Vec2::new(1.5, 2.0), Vec2::new(1.5, 3.0)];
        let lifted = lift(&pts, 0.25);
        for k in 1..pts.len() {
            let step = HeisPoint::horizontal(pts[k] - pts[k - 1]);
            assert!((lifted[k - 1] * step).dist_max(lifted[k]) < 1e-15);
        }
    }

    #[test]
    fn theta_fixes_last_vertex() {
        let g = hexagon();
        let p = HeisPoint::from_parts(g.v(-1), 0.0);
        assert!(theta(p, &g).dist_max(p) < 1e-15);
        let q = HeisPoint::new(0.3, 0.9, 0.2);
        assert!(theta(theta(q, &g), &g).dist_max(q) < 1e-15);
    }
}
