//! Brute-force distance oracle for the isoperimetric problem behind `d_e`:
//! the shortest planar polyline from the origin to `pi(p)` sweeping balayage
//! area `t(p)`.
//!
//! Polylines follow a fixed cyclic sequence of vertex directions of `Q`
//! (anticlockwise for positive area, clockwise otherwise) with free lengths
//! `t_k = y_k^2`. Gauge length is then `sum t_k`, the endpoint is linear and
//! the area quadratic in `t`. An augmented Lagrangian with BFGS inner solves
//! drives the constraints to zero from random starts. Nothing here refers to
//! panels or trace paths.
//!
//! The returned value is the length of an exactly feasible polyline (endpoint
//! and area are repaired after the solve), hence an upper bound for `d_e`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::heisenberg::HeisPoint;
use crate::plane::{omega, Vec2};
use crate::polygon::Polygon;

pub const DEFAULT_RESTARTS: usize = 32;

const RHO_START: f64 = 10.0;
const RHO_MAX: f64 = 1e8;
const OUTER_ITERS: usize = 60;
const INNER_ITERS: usize = 500;
/// Rounds of waking up slots that the KKT conditions want active.
const REACTIVATIONS: usize = 8;

/// Default slot count: two laps of vertex directions.
pub fn default_segments(g: &Polygon) -> usize {
    2 * g.len()
}

struct Problem {
    dirs: Vec<Vec2>,
    target: Vec2,
    z: f64,
}

fn lengths(y: &[f64]) -> Vec<f64> {
    y.iter().map(|v| v * v).collect()
}

impl Problem {
    /// Constraint residuals `(endpoint - pi(p), area - t(p))`.
    fn residuals(&self, t: &[f64]) -> [f64; 3] {
        let mut end = Vec2::ZERO;
        let mut twice_area = 0.0;
        for (&tk, &d) in t.iter().zip(&self.dirs) {
            let step = d * tk;
            twice_area += omega(end, step);
            end += step;
        }
        [end.x - self.target.x, end.y - self.target.y, 0.5 * twice_area - self.z]
    }

    /// Derivatives in `t` of the Lagrangian `sum t - lam . c(t)`.
    fn reduced_costs(&self, t: &[f64], lam: &[f64; 3]) -> Vec<f64> {
        let total = t.iter().zip(&self.dirs).fold(Vec2::ZERO, |acc, (&tk, &d)| acc + d * tk);
        let mut before = Vec2::ZERO;
        let mut out = Vec::with_capacity(t.len());
        for (&tk, &d) in t.iter().zip(&self.dirs) {
            let da = 0.5 * omega(d, total - before - d * tk - before);
            out.push(1.0 - lam[0] * d.x - lam[1] * d.y - lam[2] * da);
            before += d * tk;
        }
        out
    }

    /// Augmented Lagrangian value, gradient in `y` written to `grad`.
    fn lagrangian(&self, y: &[f64], lam: &[f64; 3], rho: f64, grad: &mut [f64]) -> f64 {
        let t = lengths(y);
        let c = self.residuals(&t);
        let mut val: f64 = t.iter().sum();
        let mut w = [0.0; 3];
        for j in 0..3 {
            val += -lam[j] * c[j] + 0.5 * rho * c[j] * c[j];
            w[j] = rho * c[j] - lam[j];
        }
        let total = t.iter().zip(&self.dirs).fold(Vec2::ZERO, |acc, (&tk, &d)| acc + d * tk);
        let mut before = Vec2::ZERO;
        for k in 0..y.len() {
            let d = self.dirs[k];
            let after = total - before - d * t[k];
            // d area / d t_k
            let da = 0.5 * omega(d, after - before);
            grad[k] = 2.0 * y[k] * (1.0 + w[0] * d.x + w[1] * d.y + w[2] * da);
            before += d * t[k];
        }
        val
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// BFGS with Armijo backtracking on the augmented Lagrangian.
fn bfgs(p: &Problem, y: &mut [f64], lam: &[f64; 3], rho: f64) {
    let n = y.len();
    let reset = |h: &mut Vec<f64>| {
        h.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n {
            h[i * n + i] = 1.0 / rho;
        }
    };
    let mut h = vec![0.0; n * n];
    reset(&mut h);
    let mut g = vec![0.0; n];
    let mut f = p.lagrangian(y, lam, rho, &mut g);
    let (mut g_new, mut y_new, mut dir) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let (mut s, mut u, mut hu) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for _ in 0..INNER_ITERS {
        if dot(&g, &g).sqrt() < 1e-13 {
            break;
        }
        for i in 0..n {
            dir[i] = -dot(&h[i * n..(i + 1) * n], &g);
        }
        let mut slope = dot(&dir, &g);
        if slope >= 0.0 {
            reset(&mut h);
            for i in 0..n {
                dir[i] = -g[i] / rho;
            }
            slope = dot(&dir, &g);
        }
        let mut step = 1.0;
        let f_new = loop {
            for i in 0..n {
                y_new[i] = y[i] + step * dir[i];
            }
            let f_try = p.lagrangian(&y_new, lam, rho, &mut g_new);
            if f_try <= f + 1e-4 * step * slope {
                break Some(f_try);
            }
            step *= 0.5;
            if step < 1e-14 {
                break None;
            }
        };
        let Some(f_new) = f_new else { break };
        for i in 0..n {
            s[i] = y_new[i] - y[i];
            u[i] = g_new[i] - g[i];
        }
        let su = dot(&s, &u);
        if su > 1e-300 {
            for i in 0..n {
                hu[i] = dot(&h[i * n..(i + 1) * n], &u);
            }
            let r = 1.0 / su;
            let c = (1.0 + dot(&u, &hu) * r) * r;
            for i in 0..n {
                for j in 0..n {
                    h[i * n + j] += c * s[i] * s[j] - r * (hu[i] * s[j] + s[i] * hu[j]);
                }
            }
        }
        y.copy_from_slice(&y_new);
        g.copy_from_slice(&g_new);
        let stalled = f - f_new <= 1e-16 * (1.0 + f.abs());
        f = f_new;
        if stalled {
            break;
        }
    }
}

/// Exactly feasible polyline built from slot lengths; returns its gauge length.
fn repair(g: &Polygon, p: &Problem, t: &[f64]) -> f64 {
    let mut pts = vec![Vec2::ZERO];
    for (&tk, &d) in t.iter().zip(&p.dirs) {
        let last = *pts.last().unwrap();
        pts.push(last + d * tk);
    }
    // close any endpoint gap with one more segment
    pts.push(p.target);
    let area = 0.5 * pts.windows(2).map(|w| omega(w[0], w[1])).sum::<f64>();
    let defect = p.z - area;
    if defect != 0.0 {
        // one vertex moved across its chord changes the area by omega(d, chord) / 2
        let last = pts.len() - 1;
        let mut best: Option<(f64, usize, Vec2)> = None;
        for k in 1..last {
            let chord = pts[k + 1] - pts[k - 1];
            let len2 = chord.dot(chord);
            if len2 < 1e-24 {
                continue;
            }
            let d = Vec2::new(chord.y, -chord.x) * (2.0 * defect / len2);
            let moved = pts[k] + d;
            let cost = g.gauge(moved - pts[k - 1]) + g.gauge(pts[k + 1] - moved)
                - g.gauge(pts[k] - pts[k - 1])
                - g.gauge(pts[k + 1] - pts[k]);
            if best.map_or(true, |(c, _, _)| cost < c) {
                best = Some((cost, k, d));
            }
        }
        match best {
            Some((_, k, d)) => pts[k] += d,
            None => return f64::INFINITY,
        }
    }
    pts.windows(2).map(|w| g.gauge(w[1] - w[0])).sum()
}

fn one_restart(g: &Polygon, p: &Problem, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = p.dirs.len();
    let scale = g.gauge(p.target) + (p.z.abs() / g.unit_iso_area).sqrt();
    // random window of active slots; the rest start tiny but can still grow
    let start = rng.gen_range(0..k);
    let width = rng.gen_range(1..=k);
    let mut y: Vec<f64> = vec![1e-4 * scale.sqrt(); k];
    for m in 0..width {
        y[(start + m) % k] = (rng.gen_range(0.05..1.0) * 2.0 * scale / width as f64).sqrt();
    }
    let mut lam = [0.0; 3];
    let mut best = f64::INFINITY;
    for _ in 0..REACTIVATIONS {
        solve(p, &mut y, &mut lam, scale);
        let t = lengths(&y);
        best = best.min(repair(g, p, &t));
        // zero slots whose reduced cost is negative would shorten the path
        let costs = p.reduced_costs(&t, &lam);
        let mut woke = false;
        for k in 0..y.len() {
            if t[k] < 1e-8 * scale && costs[k] < -1e-9 {
                y[k] = (0.05 * scale).sqrt();
                woke = true;
            }
        }
        if !woke {
            break;
        }
    }
    best
}

/// Augmented Lagrangian outer loop from the current `y` and multipliers.
fn solve(p: &Problem, y: &mut [f64], lam: &mut [f64; 3], scale: f64) {
    let mut rho = RHO_START;
    let mut last = f64::INFINITY;
    for _ in 0..OUTER_ITERS {
        bfgs(p, y, lam, rho);
        let c = p.residuals(&lengths(y));
        let viol = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if viol < 1e-14 * (1.0 + scale * scale) {
            break;
        }
        for j in 0..3 {
            lam[j] -= rho * c[j];
        }
        if viol > 0.25 * last && rho < RHO_MAX {
            rho *= 10.0;
        }
        last = viol;
    }
}

/// Per-restart seed derivation, independent of scheduling.
fn restart_seed(seed: u64, k: usize) -> u64 {
    seed ^ (k as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Shortest feasible polyline length found with `segments` direction slots
/// over `restarts` independent solves.
pub fn oracle_distance(g: &Polygon, p: HeisPoint, segments: usize, restarts: usize, seed: u64) -> f64 {
    if p.z == 0.0 {
        // the straight segment is feasible and optimal
        return g.gauge(p.project());
    }
    let turn = if p.z > 0.0 { 1 } else { -1 };
    let prob = Problem {
        dirs: (0..segments.max(4) as isize).map(|k| g.v(turn * k)).collect(),
        target: p.project(),
        z: p.z,
    };
    (0..restarts.max(1))
        .into_par_iter()
        .map(|k| one_restart(g, &prob, restart_seed(seed, k)))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::fixtures::hexagon;

    #[test]
    fn horizontal_point_is_straight() {
        let g = hexagon();
        assert!((oracle_distance(&g, HeisPoint::new(2.0, 0.0, 0.0), 12, 4, 1) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn restart_seeds_differ() {
        assert_ne!(restart_seed(42, 0), restart_seed(42, 1));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let g = hexagon();
        let p = Problem { dirs: (0..12).map(|k| g.v(k)).collect(), target: Vec2::new(0.3, -0.2), z: 0.4 };
        let y: Vec<f64> = (0..12).map(|k| 0.2 + 0.05 * k as f64).collect();
        let lam = [0.3, -0.1, 0.7];
        let mut grad = vec![0.0; 12];
        p.lagrangian(&y, &lam, 5.0, &mut grad);
        let mut scratch = vec![0.0; 12];
        for k in 0..12 {
            let (mut a, mut b) = (y.clone(), y.clone());
            a[k] += 1e-6;
            b[k] -= 1e-6;
            let fd = (p.lagrangian(&a, &lam, 5.0, &mut scratch) - p.lagrangian(&b, &lam, 5.0, &mut scratch)) / 2e-6;
            assert!((fd - grad[k]).abs() < 1e-6, "slot {k}: {fd} vs {}", grad[k]);
        }
    }
}
