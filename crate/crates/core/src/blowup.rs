//! Numerical harness for blow-up limits: empirical horofunctions along
//! sequences `p_n -> p`, vertical sequences, Kuratowski limits of rescaled
//! sets, and finite-difference audits of the Pansu derivative.
//!
//! Grid sweeps run in parallel; results are collected in grid order so every
//! report is bit-stable.

use std::fmt::Write as _;
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distance::{d_e, distance, fd_directional, pansu_on_sphere};
use crate::error::{Error, Result};
use crate::format::fmt_num;
use crate::heisenberg::HeisPoint;
use crate::horo::{blow_up_family_at, BlowUpFamily, Horofunction, Member};
use crate::plane::Vec2;
use crate::polygon::Polygon;
use crate::sphere::classify_on_sphere;

/// Distance tolerance for "on the unit sphere".
pub const SPHERE_TOL: f64 = 1e-7;

/// Relative accuracy assumed for `d_e` by the Lipschitz check.
pub const D_E_REL_ACCURACY: f64 = 1e-12;

/// `eps_n = 2^-n` for `n = 4..=16`.
pub fn default_eps_schedule() -> Vec<f64> {
    (4..=16).map(|n| 0.5f64.powi(n)).collect()
}

/// Geometric schedule from `first` down to `last` by halving.
pub fn halving_schedule(first: f64, last: f64) -> Result<Vec<f64>> {
    if !(first > 0.0 && last > 0.0 && last <= first) {
        return Err(Error::InvalidArgument(format!("bad schedule bounds {first}, {last}")));
    }
    let mut out = vec![first];
    while *out.last().unwrap() * 0.5 >= last * (1.0 - 1e-12) {
        out.push(out.last().unwrap() * 0.5);
    }
    Ok(out)
}

/// `p_n = p * delta_{eps^(3/4)}(w2) * delta_eps(w1)` along a schedule `eps_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceSpec {
    pub base: HeisPoint,
    pub w1: HeisPoint,
    pub w2: HeisPoint,
    pub eps_schedule: Vec<f64>,
}

impl SequenceSpec {
    pub fn new(g: &Polygon, base: HeisPoint, w1: HeisPoint, w2: HeisPoint, eps_schedule: Vec<f64>) -> Result<Self> {
        validate_schedule(&eps_schedule)?;
        let d = d_e(g, base);
        if (d - 1.0).abs() > SPHERE_TOL {
            return Err(Error::NotOnSphere(d));
        }
        if !(w1.is_finite() && w2.is_finite()) {
            return Err(Error::InvalidArgument("non-finite sequence offset".into()));
        }
        Ok(SequenceSpec { base, w1, w2, eps_schedule })
    }

    pub fn len(&self) -> usize {
        self.eps_schedule.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eps_schedule.is_empty()
    }

    pub fn point(&self, n: usize) -> HeisPoint {
        let e = self.eps_schedule[n];
        self.base * self.w2.scaled(e.powf(0.75)) * self.w1.scaled(e)
    }

    /// `q_n = delta_{1/eps_n}(p_n^{-1})`, the escaping sequence.
    pub fn observer(&self, n: usize) -> HeisPoint {
        self.point(n).inv().scaled(1.0 / self.eps_schedule[n])
    }
}

fn validate_schedule(eps: &[f64]) -> Result<()> {
    if eps.is_empty() {
        return Err(Error::InvalidArgument("empty eps schedule".into()));
    }
    if eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(Error::InvalidArgument("eps values must be positive".into()));
    }
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("eps schedule must be strictly decreasing".into()));
    }
    Ok(())
}

/// Box `[-R, R]^2` sampled at `spacing`, at each vertical slice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridWindow {
    pub half_width: f64,
    pub spacing: f64,
    pub z_slices: Vec<f64>,
}

impl Default for GridWindow {
    fn default() -> Self {
        GridWindow { half_width: 3.0, spacing: 0.1, z_slices: vec![-1.0, 0.0, 1.0] }
    }
}

impl GridWindow {
    pub fn new(half_width: f64, spacing: f64, z_slices: Option<Vec<f64>>) -> Result<Self> {
        if !(half_width > 0.0 && spacing > 0.0 && spacing < half_width) {
            return Err(Error::InvalidArgument(format!(
                "grid needs 0 < spacing < R, got R = {half_width}, spacing = {spacing}"
            )));
        }
        let z_slices = z_slices.unwrap_or_else(|| vec![-1.0, 0.0, 1.0]);
        if z_slices.is_empty() || z_slices.iter().any(|z| !z.is_finite()) {
            return Err(Error::InvalidArgument("z slices must be finite and nonempty".into()));
        }
        Ok(GridWindow { half_width, spacing, z_slices })
    }

    /// Kuratowski inclusion radius.
    pub fn eta(&self) -> f64 {
        2.0 * self.spacing
    }

    /// Samples per horizontal axis.
    pub fn side(&self) -> usize {
        (self.half_width / self.spacing + 1e-9).floor() as usize * 2 + 1
    }

    fn coord(&self, k: usize) -> f64 {
        let half = (self.side() / 2) as f64;
        (k as f64 - half) * self.spacing
    }

    /// Points in slice-major, then x, then y order.
    pub fn points(&self) -> Vec<HeisPoint> {
        let m = self.side();
        let mut out = Vec::with_capacity(m * m * self.z_slices.len());
        for &z in &self.z_slices {
            for a in 0..m {
                for b in 0..m {
                    out.push(HeisPoint::new(self.coord(a), self.coord(b), z));
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.side() * self.side() * self.z_slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One step of an empirical horofunction run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalStep {
    pub n: usize,
    pub eps: f64,
    /// Grid sup of `|f_n - h|` when a prediction was supplied.
    pub deviation: Option<f64>,
    /// `|f_n(x)| <= d_e(x)` holds on the whole grid.
    pub lipschitz_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalTable {
    pub steps: Vec<EmpiricalStep>,
    /// Grid points with `f_N` at the last schedule entry.
    pub final_values: Vec<(HeisPoint, f64)>,
}

impl EmpiricalTable {
    pub fn final_deviation(&self) -> Option<f64> {
        self.steps.last().and_then(|s| s.deviation)
    }

    pub fn deviations(&self) -> Vec<f64> {
        self.steps.iter().filter_map(|s| s.deviation).collect()
    }

    /// CSV: one row per step.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,eps,deviation,lipschitz_ok\n");
        for st in &self.steps {
            let dev = st.deviation.map(fmt_num).unwrap_or_default();
            let _ = writeln!(s, "{},{},{},{}", st.n, fmt_num(st.eps), dev, st.lipschitz_ok);
        }
        s
    }
}

/// Trend verdict: every step stays below `slack` times its predecessor
/// (plus a rounding floor), and the last value is at most `threshold`.
pub fn trend_verdict(devs: &[f64], threshold: f64, slack: f64) -> bool {
    let Some(&last) = devs.last() else { return false };
    let monotone = devs.windows(2).all(|w| w[1] <= w[0] * slack + 1e-9);
    monotone && last <= threshold
}

/// `f_n(x) = (d_e(p_n delta_eps(x)) - d_e(p_n)) / eps`, i.e. `d(q_n, x) - d(q_n, e)`.
pub fn empirical_horofunction(
    g: &Polygon,
    seq: &SequenceSpec,
    grid: &GridWindow,
    predicted: Option<&Horofunction>,
) -> EmpiricalTable {
    let pts = grid.points();
    let norms: Vec<f64> = pts.par_iter().map(|&x| d_e(g, x)).collect();
    let mut steps = Vec::with_capacity(seq.len());
    let mut final_values = Vec::new();
    for n in 0..seq.len() {
        let eps = seq.eps_schedule[n];
        let pn = seq.point(n);
        let d0 = d_e(g, pn);
        let vals: Vec<f64> = pts
            .par_iter()
            .map(|&x| if x.is_identity() { 0.0 } else { (d_e(g, pn * x.scaled(eps)) - d0) / eps })
            .collect();
        // d_e is good to about 1e-12 relative (the ceiling height comes from a
        // panel inversion); that error is amplified by 1/eps
        let slop = 1e-9 + D_E_REL_ACCURACY * (1.0 + d0) / eps;
        let lipschitz_ok = vals.iter().zip(&norms).all(|(f, d)| f.abs() <= d + slop);
        let deviation = predicted.map(|h| {
            vals.iter().zip(&pts).fold(0.0f64, |m, (f, &x)| m.max((f - h.eval(x, g)).abs()))
        });
        steps.push(EmpiricalStep { n, eps, deviation, lipschitz_ok });
        if n + 1 == seq.len() {
            final_values = pts.iter().copied().zip(vals).collect();
        }
    }
    EmpiricalTable { steps, final_values }
}

/// `(x, y)` with `omega(v_i, (x, y)) = 1`.
fn crease_normal(g: &Polygon, i: usize) -> Vec2 {
    let v = g.v(i as isize);
    Vec2::new(-v.y, v.x) / v.dot(v)
}

/// A sequence toward `p` whose blow-up is the requested member of the family at `p`.
///
/// Finite creases `C` shift the base by `delta_eps(a)` with `omega(v_i, a) = -C`;
/// infinite ones use the `eps^(3/4)` offset so the crease leaves every compact set.
/// At the poles `NormType{w}` comes from the offset `-w`, and crease members from
/// sending the offset to infinity along `v_i`.
pub fn build_blowup_sequence(g: &Polygon, p: HeisPoint, member: &Member, eps: Vec<f64>) -> Result<SequenceSpec> {
    let family = blow_up_family_at(g, p)?;
    // rejects members outside the family
    family.instantiate(g, member)?;
    let h = HeisPoint::horizontal;
    let e = HeisPoint::IDENTITY;
    let (w1, w2) = match (family, *member) {
        (BlowUpFamily::Singleton { .. }, Member::Only) => (e, e),
        (BlowUpFamily::Crease { .. }, Member::Crease { i, c }) => {
            let perp = crease_normal(g, i);
            if c.is_finite() {
                (h(perp * -c), e)
            } else {
                (e, h(perp * -c.signum()))
            }
        }
        (BlowUpFamily::Pole { .. }, Member::Norm { w }) => (h(-w), e),
        (BlowUpFamily::Pole { .. }, Member::Crease { i, c }) => {
            let ii = i as isize;
            if c.is_finite() {
                (h(crease_normal(g, i) * -c), h(-g.v(ii)))
            } else {
                // escape inside the cone whose linear piece is the limit
                let side = if c > 0.0 { g.v(ii + 1) } else { g.v(ii - 1) };
                (e, h(-(g.v(ii) + side) * 0.5))
            }
        }
        (fam, m) => return Err(Error::UnreachableTarget(format!("{m:?} for {fam:?}"))),
    };
    SequenceSpec::new(g, p, w1, w2, eps)
}

/// Per-`s` sup over probes of `|d(p_s, x) - d(p_s, e) - (|w| - |w - pi(x)|)|` with `p_s = (w, s)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerticalReport {
    pub s_values: Vec<f64>,
    pub deviations: Vec<f64>,
    /// Deviations never increase by more than `1e-3` from one `s` to the next.
    pub monotone: bool,
}

pub fn vertical_sequence_deviation(g: &Polygon, w: Vec2, s_values: &[f64], probes: &[HeisPoint]) -> Result<VerticalReport> {
    if s_values.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::InvalidArgument("s values must increase".into()));
    }
    let h = Horofunction::NormType { w };
    let deviations: Vec<f64> = s_values
        .iter()
        .map(|&s| {
            let q = HeisPoint::from_parts(w, s);
            let d0 = distance(g, q, HeisPoint::IDENTITY);
            probes
                .par_iter()
                .map(|&x| (distance(g, q, x) - d0 - h.eval(x, g)).abs())
                .collect::<Vec<_>>()
                .into_iter()
                .fold(0.0, f64::max)
        })
        .collect();
    let monotone = deviations.windows(2).all(|d| d[1] <= d[0] + 1e-3);
    Ok(VerticalReport { s_values: s_values.to_vec(), deviations, monotone })
}

/// Grid points inside the closed ball of radius `r` about the identity.
pub fn ball_probes(g: &Polygon, grid: &GridWindow, r: f64) -> Vec<HeisPoint> {
    grid.points().into_par_iter().filter(|&x| d_e(g, x) <= r).collect()
}

/// A subset of a grid window, stored as a membership mask in grid order.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSet {
    pub grid: GridWindow,
    pub mask: Vec<bool>,
}

impl GridSet {
    pub fn points(&self) -> Vec<HeisPoint> {
        self.grid.points().into_iter().zip(&self.mask).filter(|(_, &m)| m).map(|(p, _)| p).collect()
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn is_subset(&self, other: &GridSet) -> bool {
        self.mask.iter().zip(&other.mask).all(|(&a, &b)| !a || b)
    }
}

/// Per grid point, the Chebyshev grid distance to the nearest member of `mask`,
/// capped at `reach` cells (`usize::MAX` beyond).
fn cell_distances(grid: &GridWindow, mask: &[bool], reach: usize) -> Vec<usize> {
    let m = grid.side();
    let slices = grid.z_slices.len();
    let spacing = grid.spacing;
    let idx = |k: usize, a: usize, b: usize| (k * m + a) * m + b;
    let mut out = vec![usize::MAX; mask.len()];
    for k in 0..slices {
        // vertical neighbours count only when slices are within the reach
        let near: Vec<usize> = (0..slices)
            .filter(|&l| (grid.z_slices[l] - grid.z_slices[k]).abs() <= reach as f64 * spacing + 1e-12)
            .collect();
        for a in 0..m {
            for b in 0..m {
                let mut best = usize::MAX;
                for &l in &near {
                    let dz = ((grid.z_slices[l] - grid.z_slices[k]).abs() / spacing - 1e-9).ceil().max(0.0) as usize;
                    for da in a.saturating_sub(reach)..=(a + reach).min(m - 1) {
                        for db in b.saturating_sub(reach)..=(b + reach).min(m - 1) {
                            if mask[idx(l, da, db)] {
                                let d = dz.max(da.abs_diff(a)).max(db.abs_diff(b));
                                best = best.min(d);
                            }
                        }
                    }
                }
                out[idx(k, a, b)] = best;
            }
        }
    }
    out
}

fn kuratowski(
    sets: &[&(dyn Fn(HeisPoint) -> bool + Sync)],
    grid: &GridWindow,
    tail: Range<usize>,
    inferior: bool,
) -> Result<GridSet> {
    if tail.is_empty() || tail.end > sets.len() {
        return Err(Error::InvalidArgument(format!("tail {tail:?} invalid for {} sets", sets.len())));
    }
    let pts = grid.points();
    let reach = (grid.eta() / grid.spacing + 1e-9).floor() as usize;
    let mut acc: Option<Vec<bool>> = None;
    for n in tail {
        let mask: Vec<bool> = pts.par_iter().map(|&x| sets[n](x)).collect();
        let near: Vec<bool> = cell_distances(grid, &mask, reach).into_iter().map(|d| d <= reach).collect();
        acc = Some(match acc {
            None => near,
            Some(prev) => prev
                .into_iter()
                .zip(near)
                .map(|(a, b)| if inferior { a && b } else { a || b })
                .collect(),
        });
    }
    Ok(GridSet { grid: grid.clone(), mask: acc.unwrap_or_default() })
}

/// Grid points within `eta` of every `C_n` in the tail.
pub fn kuratowski_li(
    sets: &[&(dyn Fn(HeisPoint) -> bool + Sync)],
    grid: &GridWindow,
    tail: Range<usize>,
) -> Result<GridSet> {
    kuratowski(sets, grid, tail, true)
}

/// Grid points within `eta` of some `C_n` in the tail.
pub fn kuratowski_ls(
    sets: &[&(dyn Fn(HeisPoint) -> bool + Sync)],
    grid: &GridWindow,
    tail: Range<usize>,
) -> Result<GridSet> {
    kuratowski(sets, grid, tail, false)
}

/// Li and Ls estimates of the rescaled sets `C_n = delta_{1/eps_n}(p_n^{-1} Omega)`.
pub fn blow_up_set(
    omega: &(dyn Fn(HeisPoint) -> bool + Sync),
    seq: &SequenceSpec,
    grid: &GridWindow,
    tail: Range<usize>,
) -> Result<(GridSet, GridSet)> {
    let rescaled: Vec<Box<dyn Fn(HeisPoint) -> bool + Sync + '_>> = (0..seq.len())
        .map(|n| {
            let pn = seq.point(n);
            let eps = seq.eps_schedule[n];
            Box::new(move |x: HeisPoint| omega(pn * x.scaled(eps))) as Box<dyn Fn(HeisPoint) -> bool + Sync>
        })
        .collect();
    let refs: Vec<&(dyn Fn(HeisPoint) -> bool + Sync)> = rescaled.iter().map(|b| b.as_ref()).collect();
    Ok((kuratowski_li(&refs, grid, tail.clone())?, kuratowski_ls(&refs, grid, tail)?))
}

/// Probe directions of the audit: six horizontal unit vectors and the two vertical ones.
pub fn audit_directions() -> Vec<HeisPoint> {
    let mut out: Vec<HeisPoint> = (0..6)
        .map(|k| {
            let t = std::f64::consts::PI * (k as f64 / 3.0 + 1.0 / 12.0);
            HeisPoint::new(t.cos(), t.sin(), 0.0)
        })
        .collect();
    out.push(HeisPoint::new(0.0, 0.0, 1.0));
    out.push(HeisPoint::new(0.0, 0.0, -1.0));
    out
}

/// Neighbourhood radius on the sphere inside which an audit sample must stay
/// on a single smooth piece; a finite difference straddling a seam measures the
/// kink, not the derivative.
pub const AUDIT_CLEARANCE: f64 = 1e-3;

/// Random unit-sphere points whose `AUDIT_CLEARANCE` neighbourhood is smooth and of one class.
pub fn smooth_samples(g: &Polygon, count: usize, seed: u64) -> Vec<HeisPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let dirs = audit_directions();
    let mut tries = 0usize;
    while out.len() < count && tries < 1000 * count.max(1) {
        tries += 1;
        let raw = HeisPoint::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-0.2..0.2));
        if raw.is_identity() {
            continue;
        }
        let p = raw.scaled(1.0 / d_e(g, raw));
        let class = classify_on_sphere(g, p);
        if !class.is_smooth() || pansu_on_sphere(g, p).is_err() {
            continue;
        }
        let stable = dirs.iter().all(|&v| {
            let q = p * v.scaled(AUDIT_CLEARANCE);
            let q = q.scaled(1.0 / d_e(g, q));
            classify_on_sphere(g, q) == class
                && pansu_on_sphere(g, q).is_ok_and(|c| c.dist_max(pansu_on_sphere(g, p).unwrap()) < 1e-2)
        });
        if stable {
            out.push(p);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub sample: usize,
    pub point: HeisPoint,
    pub class: String,
    pub direction: HeisPoint,
    pub analytic: f64,
    /// Finite-difference value per ladder entry.
    pub fd: Vec<f64>,
    pub errors: Vec<f64>,
    /// Errors fail to decrease along the ladder (above the rounding floor).
    pub non_decreasing: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub eps_ladder: Vec<f64>,
    pub rows: Vec<AuditRow>,
}

/// Errors below this are rounding, not truncation.
pub const AUDIT_NOISE_FLOOR: f64 = 1e-8;

impl AuditReport {
    pub fn max_error_at(&self, k: usize) -> f64 {
        self.rows.iter().map(|r| r.errors[k]).fold(0.0, f64::max)
    }

    pub fn flagged(&self) -> usize {
        self.rows.iter().filter(|r| r.non_decreasing).count()
    }

    /// Ratios `err(eps_k) / err(eps_{k+1})` for rows above the noise floor.
    pub fn ratios(&self, k: usize) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.errors[k] > AUDIT_NOISE_FLOOR && r.errors[k + 1] > 0.0)
            .map(|r| r.errors[k] / r.errors[k + 1])
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("sample,x,y,z,class,dx,dy,dz,analytic");
        for e in &self.eps_ladder {
            let _ = write!(s, ",fd_{0},err_{0}", fmt_num(*e));
        }
        s.push_str(",non_decreasing\n");
        for r in &self.rows {
            let _ = write!(
                s,
                "{},{},{},{},{},{},{},{},{}",
                r.sample,
                fmt_num(r.point.x),
                fmt_num(r.point.y),
                fmt_num(r.point.z),
                r.class,
                fmt_num(r.direction.x),
                fmt_num(r.direction.y),
                fmt_num(r.direction.z),
                fmt_num(r.analytic)
            );
            for (f, e) in r.fd.iter().zip(&r.errors) {
                let _ = write!(s, ",{},{}", fmt_num(*f), fmt_num(*e));
            }
            let _ = writeln!(s, ",{}", r.non_decreasing);
        }
        s
    }
}

/// Finite-difference versus analytic Pansu derivatives on random smooth sphere points.
pub fn pansu_audit(g: &Polygon, sample_count: usize, eps_ladder: &[f64], seed: u64) -> Result<AuditReport> {
    validate_schedule(eps_ladder)?;
    let samples = smooth_samples(g, sample_count, seed);
    let dirs = audit_directions();
    let rows: Vec<Vec<AuditRow>> = samples
        .par_iter()
        .enumerate()
        .map(|(k, &p)| {
            let cov = pansu_on_sphere(g, p)?;
            let class = classify_on_sphere(g, p).name().to_string();
            dirs.iter()
                .map(|&v| {
                    let analytic = cov.apply(v.project());
                    let fd = eps_ladder.iter().map(|&e| fd_directional(g, p, v, e)).collect::<Result<Vec<_>>>()?;
                    let errors: Vec<f64> = fd.iter().map(|f| (f - analytic).abs()).collect();
                    let non_decreasing = errors.windows(2).any(|w| w[0] > AUDIT_NOISE_FLOOR && w[1] >= w[0]);
                    Ok(AuditRow { sample: k, point: p, class: class.clone(), direction: v, analytic, fd, errors, non_decreasing })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(AuditReport { eps_ladder: eps_ladder.to_vec(), rows: rows.into_iter().flatten().collect() })
}
