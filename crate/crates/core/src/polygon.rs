//! Generating polygon Q and its derived covector and isoperimetrix data.
//!
//! Conventions:
//! - `2N` vertices, anticlockwise, indices taken mod `2N` (0-based here).
//! - `e_k = v_{k+1} - v_k`, `alpha_k = omega(e_k, .) / omega(e_k, v_k)`.
//! - Isoperimetrix vertices `alpha_k^w = e_k / omega(e_k, v_k)`, edges
//!   `sigma_k = alpha_k^w - alpha_{k-1}^w = |sigma_k| v_k`.
//! - Predicates use an absolute tolerance on O(1) coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::plane::{omega, omega_covector, Covector, Vec2};

/// Default absolute tolerance for geometric predicates.
pub const GEOM_TOL: f64 = 1e-9;

/// Validated polygon together with everything derived from it.
#[derive(Clone, Debug, Serialize)]
pub struct Polygon {
    pub vertices: Vec<Vec2>,
    pub edges: Vec<Vec2>,
    pub alphas: Vec<Covector>,
    pub iso_vertices: Vec<Vec2>,
    pub sigmas: Vec<Vec2>,
    pub sigma_norms: Vec<f64>,
    pub iso_area: f64,
    pub iso_perimeter: f64,
    pub unit_iso_area: f64,
    #[serde(skip)]
    tol: f64,
    /// `alpha_k - alpha_{k-1} = kappa_k * omega(v_k, .)`.
    #[serde(skip)]
    kappas: Vec<f64>,
    /// Prefix sums of `sigma` over two laps: `sig_prefix[m] = sum_{k<m} sigma_{k mod 2N}`.
    #[serde(skip)]
    sig_prefix: Vec<Vec2>,
    #[serde(skip)]
    norm_prefix: Vec<f64>,
}

#[derive(Deserialize)]
struct PolygonFile {
    vertices: Vec<[f64; 2]>,
}

impl Polygon {
    /// Validates `raw` (all `2N` vertices, anticlockwise) and derives the geometry.
    pub fn build(raw: &[Vec2]) -> std::result::Result<Self, GeometryError> {
        Self::build_with_tol(raw, GEOM_TOL)
    }

    pub fn build_with_tol(raw: &[Vec2], tol: f64) -> std::result::Result<Self, GeometryError> {
        let m = raw.len();
        if m < 4 || m % 2 != 0 {
            return Err(GeometryError::TooFewVertices { count: m });
        }
        if let Some(index) = raw.iter().position(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite { index });
        }
        let edges: Vec<Vec2> = (0..m).map(|k| raw[(k + 1) % m] - raw[k]).collect();
        if let Some(index) = edges.iter().position(|e| e.norm2() <= tol) {
            return Err(GeometryError::DegenerateEdge { index });
        }
        let half = m / 2;
        for k in 0..half {
            let s = raw[k] + raw[k + half];
            if s.x.abs() > tol || s.y.abs() > tol {
                return Err(GeometryError::NotCentrallySymmetric { index: k, opposite: k + half });
            }
        }
        let signed_area: f64 = (0..m).map(|k| omega(raw[k], raw[(k + 1) % m])).sum::<f64>() / 2.0;
        if signed_area < 0.0 {
            return Err(GeometryError::WrongOrientation);
        }
        let mut turning = 0.0;
        for k in 0..m {
            let (a, b) = (edges[k], edges[(k + 1) % m]);
            let cross = omega(a, b);
            if cross <= tol {
                return Err(GeometryError::NotConvex { index: (k + 1) % m });
            }
            turning += cross.atan2(a.dot(b));
        }
        if (turning - std::f64::consts::TAU).abs() > 1e-6 {
            return Err(GeometryError::NotConvex { index: 0 });
        }
        Ok(Self::derive(raw.to_vec(), edges, tol))
    }

    /// Parses `{"vertices": [[x, y], ...]}` and validates it.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: PolygonFile = serde_json::from_str(text)
            .map_err(|e| crate::Error::InvalidArgument(format!("geometry file: {e}")))?;
        let raw: Vec<Vec2> = file.vertices.into_iter().map(Vec2::from).collect();
        Ok(Self::build(&raw)?)
    }

    fn derive(vertices: Vec<Vec2>, edges: Vec<Vec2>, tol: f64) -> Self {
        let m = vertices.len();
        let mut alphas = Vec::with_capacity(m);
        let mut iso_vertices = Vec::with_capacity(m);
        for k in 0..m {
            let den = omega(edges[k], vertices[k]);
            alphas.push(omega_covector(edges[k]) * (1.0 / den));
            iso_vertices.push(edges[k] / den);
        }
        let sigmas: Vec<Vec2> = (0..m).map(|k| iso_vertices[k] - iso_vertices[(k + m - 1) % m]).collect();
        let sigma_norms: Vec<f64> = (0..m).map(|k| alphas[k].apply(sigmas[k])).collect();
        let iso_area = (0..m).map(|k| omega(iso_vertices[k], iso_vertices[(k + 1) % m])).sum::<f64>() / 2.0;
        let iso_perimeter: f64 = sigma_norms.iter().sum();
        let kappas = (0..m)
            .map(|k| {
                let next = vertices[(k + 1) % m];
                (alphas[k] - alphas[(k + m - 1) % m]).apply(next) / omega(vertices[k], next)
            })
            .collect();
        let mut sig_prefix = vec![Vec2::ZERO; 2 * m + 1];
        let mut norm_prefix = vec![0.0; 2 * m + 1];
        for t in 0..2 * m {
            sig_prefix[t + 1] = sig_prefix[t] + sigmas[t % m];
            norm_prefix[t + 1] = norm_prefix[t] + sigma_norms[t % m];
        }
        Polygon {
            vertices,
            edges,
            alphas,
            iso_vertices,
            sigmas,
            sigma_norms,
            iso_area,
            iso_perimeter,
            unit_iso_area: iso_area / (iso_perimeter * iso_perimeter),
            tol,
            kappas,
            sig_prefix,
            norm_prefix,
        }
    }

    /// Number of vertices `2N`.
    #[inline]
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// `N`.
    #[inline]
    pub fn half(&self) -> usize {
        self.vertices.len() / 2
    }

    #[inline]
    pub fn tol(&self) -> f64 {
        self.tol
    }

    #[inline]
    pub fn wrap(&self, k: isize) -> usize {
        k.rem_euclid(self.len() as isize) as usize
    }

    #[inline]
    pub fn v(&self, k: isize) -> Vec2 {
        self.vertices[self.wrap(k)]
    }

    #[inline]
    pub fn alpha(&self, k: isize) -> Covector {
        self.alphas[self.wrap(k)]
    }

    #[inline]
    pub fn sigma(&self, k: isize) -> Vec2 {
        self.sigmas[self.wrap(k)]
    }

    #[inline]
    pub fn sigma_norm(&self, k: isize) -> f64 {
        self.sigma_norms[self.wrap(k)]
    }

    /// `kappa_k` with `alpha_k - alpha_{k-1} = kappa_k * omega(v_k, .)`; always positive.
    #[inline]
    pub fn kappa(&self, k: isize) -> f64 {
        self.kappas[self.wrap(k)]
    }

    /// `(sum sigma_k, sum |sigma_k|)` over `k = i+1, ..., i+m-1`.
    pub fn middle_sums(&self, i: usize, m: usize) -> (Vec2, f64) {
        debug_assert!(i < self.len() && m >= 1 && m <= self.len());
        let (lo, hi) = (i + 1, i + m);
        (
            self.sig_prefix[hi] - self.sig_prefix[lo],
            self.norm_prefix[hi] - self.norm_prefix[lo],
        )
    }

    /// Minkowski gauge of Q: `max_k alpha_k(v)`.
    pub fn gauge(&self, v: Vec2) -> f64 {
        self.alphas.iter().map(|a| a.apply(v)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Gauge of the dual ball Q*: `max_k c(v_k)`.
    pub fn dual_gauge(&self, c: Covector) -> f64 {
        self.vertices.iter().map(|&v| c.apply(v)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Index of the edge whose cone `C_k^+ = cone(v_k, v_{k+1})` contains `v`.
    pub fn cone_of(&self, v: Vec2) -> usize {
        let m = self.len();
        (0..m)
            .find(|&k| omega(self.vertices[k], v) >= 0.0 && omega(v, self.vertices[(k + 1) % m]) >= 0.0)
            .unwrap_or_else(|| {
                (0..m)
                    .max_by(|&a, &b| self.alphas[a].apply(v).total_cmp(&self.alphas[b].apply(v)))
                    .unwrap_or(0)
            })
    }

    /// The segment of planar horofunctions between `alpha_{i-1}` and `alpha_i`.
    #[inline]
    pub fn mix(&self, i: isize, s: f64) -> Covector {
        self.alpha(i - 1).lerp(self.alpha(i), s)
    }
}

/// Ready-made polygons used in examples and tests.
pub mod fixtures {
    use super::Polygon;
    use crate::plane::Vec2;

    pub fn hexagon_vertices() -> Vec<Vec2> {
        [(1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (-1.0, 0.0), (-1.0, -1.0), (0.0, -1.0)]
            .into_iter()
            .map(|(x, y)| Vec2::new(x, y))
            .collect()
    }

    pub fn square_vertices() -> Vec<Vec2> {
        [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)]
            .into_iter()
            .map(|(x, y)| Vec2::new(x, y))
            .collect()
    }

    pub fn hexagon() -> Polygon {
        Polygon::build(&hexagon_vertices()).expect("hexagon fixture is valid")
    }

    pub fn square() -> Polygon {
        Polygon::build(&square_vertices()).expect("square fixture is valid")
    }

    /// A regular `2n`-gon with a vertex on the positive x-axis.
    pub fn regular(n: usize) -> Polygon {
        let m = 2 * n;
        let raw: Vec<Vec2> = (0..m)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / m as f64;
                Vec2::new(t.cos(), t.sin())
            })
            .collect();
        Polygon::build(&raw).expect("regular polygon is valid")
    }
}
