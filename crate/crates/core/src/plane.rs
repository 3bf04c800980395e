//! Planar vectors, covectors and the standard symplectic form.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

/// A vector of the horizontal plane. Serialized as `[x, y]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

/// A linear functional `(x, y) -> a*x + b*y`. Serialized as `[a, b]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Covector {
    pub a: f64,
    pub b: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn norm2(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Covector {
    pub const ZERO: Covector = Covector { a: 0.0, b: 0.0 };

    #[inline]
    pub const fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    #[inline]
    pub fn apply(self, v: Vec2) -> f64 {
        self.a * v.x + self.b * v.y
    }

    /// `(1 - t) * self + t * other`.
    #[inline]
    pub fn lerp(self, other: Covector, t: f64) -> Covector {
        Covector::new(
            (1.0 - t) * self.a + t * other.a,
            (1.0 - t) * self.b + t * other.b,
        )
    }

    #[inline]
    pub fn dist_max(self, o: Covector) -> f64 {
        (self.a - o.a).abs().max((self.b - o.b).abs())
    }
}

/// `omega(a, b) = a.x * b.y - a.y * b.x`.
#[inline]
pub fn omega(a: Vec2, b: Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// The covector `omega(u, .)`.
#[inline]
pub fn omega_covector(u: Vec2) -> Covector {
    Covector::new(-u.y, u.x)
}

/// The unique `u` with `omega(u, w) = c(w)` for all `w`.
#[inline]
pub fn symplectic_dual(c: Covector) -> Vec2 {
    Vec2::new(c.b, -c.a)
}

impl From<[f64; 2]> for Vec2 {
    fn from(v: [f64; 2]) -> Self {
        Vec2::new(v[0], v[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl From<[f64; 2]> for Covector {
    fn from(v: [f64; 2]) -> Self {
        Covector::new(v[0], v[1])
    }
}

impl From<Covector> for [f64; 2] {
    fn from(c: Covector) -> Self {
        [c.a, c.b]
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    #[inline]
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl SubAssign for Vec2 {
    #[inline]
    fn sub_assign(&mut self, o: Vec2) {
        self.x -= o.x;
        self.y -= o.y;
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    #[inline]
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn div(self, k: f64) -> Vec2 {
        Vec2::new(self.x / k, self.y / k)
    }
}

impl Add for Covector {
    type Output = Covector;
    #[inline]
    fn add(self, o: Covector) -> Covector {
        Covector::new(self.a + o.a, self.b + o.b)
    }
}

impl Sub for Covector {
    type Output = Covector;
    #[inline]
    fn sub(self, o: Covector) -> Covector {
        Covector::new(self.a - o.a, self.b - o.b)
    }
}

impl Neg for Covector {
    type Output = Covector;
    #[inline]
    fn neg(self) -> Covector {
        Covector::new(-self.a, -self.b)
    }
}

impl Mul<f64> for Covector {
    type Output = Covector;
    #[inline]
    fn mul(self, k: f64) -> Covector {
        Covector::new(self.a * k, self.b * k)
    }
}
