//! Verification suites: eikonal residuals, the blow-up catalogue, vertical
//! sequences and the group action. The command line and the acceptance tests
//! both drive these.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blowup::{
    ball_probes, build_blowup_sequence, empirical_horofunction, trend_verdict, vertical_sequence_deviation, GridWindow,
    VerticalReport,
};
use crate::distance::{d_e, pansu_on_sphere};
use crate::error::Result;
use crate::heisenberg::HeisPoint;
use crate::horo::{
    act, act_direct, blow_up_family_at, bounded_difference, has_finite_orbit, orbit_class, BlowUpFamily, Family,
    Horofunction, Member,
};
use crate::plane::Vec2;
use crate::polygon::Polygon;
use crate::sphere::{classify_on_sphere, sphere_point_over, star_reach, wall_bound, SphereClass};

/// Random unit-sphere points in smooth classes with a Pansu derivative.
pub fn random_smooth_points(g: &Polygon, count: usize, seed: u64) -> Vec<HeisPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let raw = HeisPoint::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-0.3..0.3));
        if raw.is_identity() {
            continue;
        }
        let p = raw.scaled(1.0 / d_e(g, raw));
        if classify_on_sphere(g, p).is_smooth() && pansu_on_sphere(g, p).is_ok() {
            out.push(p);
        }
    }
    out
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EikonalReport {
    pub points: Vec<HeisPoint>,
    /// `|dual_gauge(Pd) - 1|` per point.
    pub residuals: Vec<f64>,
}

impl EikonalReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// The Pansu covector has unit dual norm at smooth sphere points.
pub fn eikonal_suite(g: &Polygon, count: usize, seed: u64) -> Result<EikonalReport> {
    let points = random_smooth_points(g, count, seed);
    let residuals = points
        .par_iter()
        .map(|&p| pansu_on_sphere(g, p).map(|c| (g.dual_gauge(c) - 1.0).abs()))
        .collect::<Result<Vec<_>>>()?;
    Ok(EikonalReport { points, residuals })
}

/// One sphere point for each non-smooth class: vertex `0`, star seams of
/// index `1` at mid-segment, wall seams over the midpoint of edge `0`, poles.
pub fn nonsmooth_representatives(g: &Polygon) -> Result<Vec<(SphereClass, HeisPoint)>> {
    let v0 = g.v(0);
    let mid = (g.v(0) + g.v(1)) * 0.5;
    let top = wall_bound(g, 0, mid)?;
    let star = g.v(1) * (-0.5 * star_reach(g, 1));
    let pts = [
        HeisPoint::from_parts(v0, 0.0),
        sphere_point_over(g, star, true)?,
        sphere_point_over(g, star, false)?,
        HeisPoint::from_parts(mid, top),
        HeisPoint::from_parts(mid, -top),
        HeisPoint::new(0.0, 0.0, g.unit_iso_area),
        HeisPoint::new(0.0, 0.0, -g.unit_iso_area),
    ];
    Ok(pts.iter().map(|&p| (classify_on_sphere(g, p), p)).collect())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CatalogueCase {
    pub class: SphereClass,
    pub point: HeisPoint,
    pub member: Member,
    pub predicted: Horofunction,
}

/// Blow-up targets: five creases (three finite, both infinite) per seam class,
/// two norm-type and four crease members per pole.
pub fn catalogue_cases(g: &Polygon) -> Result<Vec<CatalogueCase>> {
    let mut out = Vec::new();
    for (class, point) in nonsmooth_representatives(g)? {
        let fam = blow_up_family_at(g, point)?;
        let members: Vec<Member> = match fam {
            BlowUpFamily::Crease { i, .. } => [-1.0, 0.0, 1.0, f64::INFINITY, f64::NEG_INFINITY]
                .into_iter()
                .map(|c| Member::Crease { i, c })
                .collect(),
            BlowUpFamily::Pole { .. } => vec![
                Member::Norm { w: Vec2::new(0.3, 0.2) },
                Member::Norm { w: Vec2::new(-1.0, 0.5) },
                Member::Crease { i: 1, c: 0.5 },
                Member::Crease { i: 1, c: -1.0 },
                Member::Crease { i: 2, c: f64::INFINITY },
                Member::Crease { i: 2, c: f64::NEG_INFINITY },
            ],
            BlowUpFamily::Singleton { .. } => vec![Member::Only],
        };
        for member in members {
            let predicted = fam.instantiate(g, &member)?;
            out.push(CatalogueCase { class, point, member, predicted });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CatalogueOutcome {
    pub case: CatalogueCase,
    pub eps: Vec<f64>,
    pub deviations: Vec<f64>,
    pub trend_ok: bool,
    pub lipschitz_ok: bool,
}

impl CatalogueOutcome {
    pub fn final_deviation(&self) -> f64 {
        *self.deviations.last().unwrap_or(&f64::INFINITY)
    }

    pub fn passed(&self) -> bool {
        self.trend_ok && self.lipschitz_ok
    }
}

/// Trend over the second half of a run: non-increasing, and the last value at
/// most `threshold`. Escaping creases sweep the window early on, so the first
/// half is transient.
pub fn tail_trend(devs: &[f64], threshold: f64) -> bool {
    trend_verdict(&devs[devs.len() / 2..], threshold, 1.0)
}

pub fn run_catalogue(g: &Polygon, grid: &GridWindow, eps: &[f64], threshold: f64) -> Result<Vec<CatalogueOutcome>> {
    catalogue_cases(g)?
        .into_iter()
        .map(|case| {
            let seq = build_blowup_sequence(g, case.point, &case.member, eps.to_vec())?;
            let table = empirical_horofunction(g, &seq, grid, Some(&case.predicted));
            let deviations = table.deviations();
            Ok(CatalogueOutcome {
                trend_ok: tail_trend(&deviations, threshold),
                lipschitz_ok: table.steps.iter().all(|s| s.lipschitz_ok),
                eps: eps.to_vec(),
                deviations,
                case,
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerticalCase {
    pub w: Vec2,
    pub report: VerticalReport,
}

/// Grid points of the closed `d_e`-ball of radius `r`, with horizontal and
/// vertical step `spacing`. Closing a curve with its chord bounds the height
/// of the unit ball by `4 A(I_1)`.
pub fn ball_grid_probes(g: &Polygon, r: f64, spacing: f64) -> Result<Vec<HeisPoint>> {
    let top = 4.0 * g.unit_iso_area * r * r;
    let k = (top / spacing).floor() as i64;
    let slices = (-k..=k).map(|j| j as f64 * spacing).collect();
    let grid = GridWindow::new(r, spacing, Some(slices))?;
    Ok(ball_probes(g, &grid, r))
}

/// `count` seeded offsets `w` with `|w| <= 1`, each swept over `s_values`.
pub fn vertical_suite(
    g: &Polygon,
    count: usize,
    seed: u64,
    s_values: &[f64],
    probes: &[HeisPoint],
) -> Result<Vec<VerticalCase>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ws = Vec::with_capacity(count);
    while ws.len() < count {
        let w = Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if g.gauge(w) <= 1.0 {
            ws.push(w);
        }
    }
    ws.into_iter()
        .map(|w| Ok(VerticalCase { w, report: vertical_sequence_deviation(g, w, s_values, probes)? }))
        .collect()
}

/// Seeded horofunction sample: linear members of the dual boundary, norm types
/// and two-piece members on a coarse `s` lattice so classes repeat.
pub fn sample_catalogue(g: &Polygon, count: usize, seed: u64) -> Result<Vec<Horofunction>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.len();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let i = rng.gen_range(0..n);
        let h = match rng.gen_range(0..3) {
            0 => Horofunction::Linear { beta: g.mix(i as isize, [0.0, 0.5, 1.0][rng.gen_range(0..3)]) },
            1 => Horofunction::NormType { w: Vec2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)) },
            _ => {
                let family = Family::ALL[rng.gen_range(0..4)];
                let s = [0.25, 0.5, 1.0][rng.gen_range(0..3)];
                Horofunction::two_piece(g, i, family, s, rng.gen_range(-2.0..2.0))?
            }
        };
        out.push(h);
    }
    Ok(out)
}

fn probe_plane() -> Vec<Vec2> {
    (-6..=6)
        .flat_map(|a| (-6..=6).map(move |b| Vec2::new(0.5 * a as f64, 0.5 * b as f64)))
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ActionReport {
    /// `sup |g.h - h|` over linear members.
    pub linear_fixed: f64,
    /// `sup |g.NormType{w} - NormType{w + pi(g)}|`.
    pub norm_translate: f64,
    /// `sup |g1.(g2.h) - (g1 g2).h|` over the catalogue.
    pub composition: f64,
    /// Distinct Busemann functions with a finite orbit.
    pub busemann_finite_orbits: usize,
    pub catalogue_size: usize,
    /// Pairs on which the bounded-difference and orbit-class partitions disagree.
    pub partition_mismatches: usize,
}

pub fn action_suite(g: &Polygon, seed: u64) -> Result<ActionReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let elems: Vec<HeisPoint> = (0..8)
        .map(|_| HeisPoint::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
        .collect();
    let plane = probe_plane();
    let catalogue = sample_catalogue(g, 200, seed ^ 0x5eed)?;

    let mut linear_fixed = 0.0f64;
    let mut norm_translate = 0.0f64;
    let mut composition = 0.0f64;
    for h in &catalogue {
        for (k, &a) in elems.iter().enumerate() {
            match *h {
                Horofunction::Linear { .. } => {
                    for &v in &plane {
                        linear_fixed = linear_fixed.max((act_direct(a, h, g, v) - h.eval_plane(v, g)).abs());
                    }
                }
                Horofunction::NormType { w } => {
                    let moved = Horofunction::NormType { w: w + a.project() };
                    for &v in &plane {
                        norm_translate = norm_translate.max((act_direct(a, h, g, v) - moved.eval_plane(v, g)).abs());
                    }
                }
                Horofunction::TwoPiece { .. } => {}
            }
            let b = elems[(k + 1) % elems.len()];
            let nested = act(a, &act(b, h, g)?, g)?;
            let joint = act(a * b, h, g)?;
            for &v in &plane {
                composition = composition.max((nested.eval_plane(v, g) - joint.eval_plane(v, g)).abs());
            }
        }
    }

    // Busemann functions: linear at the dual vertices and the vertex families
    let mut busemann: Vec<Horofunction> = g.alphas.iter().map(|&beta| Horofunction::Linear { beta }).collect();
    for i in 0..g.len() {
        for a in [-1.0, 0.5] {
            busemann.push(Horofunction::two_piece(g, i, Family::PsiVee, 1.0, a)?);
        }
    }
    let mut finite: Vec<Horofunction> = Vec::new();
    for h in &busemann {
        if has_finite_orbit(h, g, &elems)? && !finite.iter().any(|f| same_function(f, h, g)) {
            finite.push(*h);
        }
    }

    let classes: Vec<_> = catalogue.iter().map(|h| orbit_class(h, g)).collect();
    let partition_mismatches = (0..catalogue.len())
        .into_par_iter()
        .map(|a| {
            (a + 1..catalogue.len())
                .filter(|&b| bounded_difference(&catalogue[a], &catalogue[b], g) != classes[a].same(&classes[b]))
                .count()
        })
        .sum();

    Ok(ActionReport {
        linear_fixed,
        norm_translate,
        composition,
        busemann_finite_orbits: finite.len(),
        catalogue_size: catalogue.len(),
        partition_mismatches,
    })
}

fn same_function(a: &Horofunction, b: &Horofunction, g: &Polygon) -> bool {
    probe_plane().iter().all(|&v| (a.eval_plane(v, g) - b.eval_plane(v, g)).abs() <= 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::fixtures::{hexagon, square};
    use crate::sphere::SphereClass as C;

    #[test]
    fn representatives_cover_every_nonsmooth_class() {
        for g in [hexagon(), square()] {
            let reps = nonsmooth_representatives(&g).unwrap();
            let names: Vec<&str> = reps.iter().map(|(c, _)| c.name()).collect();
            assert!(matches!(reps[0].0, C::Vertex { i: 0 }), "{names:?}");
            assert!(matches!(reps[1].0, C::NorthStarSeam { i: 1, .. }), "{names:?}");
            assert!(matches!(reps[2].0, C::SouthStarSeam { i: 1, .. }), "{names:?}");
            assert!(matches!(reps[3].0, C::WallCeilingSeam { i: 0, .. }), "{names:?}");
            assert!(matches!(reps[4].0, C::WallBasementSeam { i: 0, .. }), "{names:?}");
            assert_eq!(reps[5].0, C::NorthPole);
            assert_eq!(reps[6].0, C::SouthPole);
            assert!(reps.iter().all(|(c, _)| !c.is_smooth()));
        }
    }

    #[test]
    fn catalogue_has_at_least_three_members_per_class() {
        let cases = catalogue_cases(&hexagon()).unwrap();
        assert_eq!(cases.len(), 5 * 5 + 2 * 6);
    }

    #[test]
    fn tail_trend_ignores_the_transient() {
        assert!(tail_trend(&[1.0, 2.0, 0.5, 0.1, 0.05, 0.01], 1e-2));
        assert!(!tail_trend(&[1.0, 0.5, 0.1, 0.05, 0.2, 0.01], 1e-2));
        assert!(!tail_trend(&[1.0, 0.5, 0.1, 0.05], 1e-2));
    }

    #[test]
    fn eikonal_on_a_few_points() {
        let rep = eikonal_suite(&square(), 50, 1).unwrap();
        assert_eq!(rep.residuals.len(), 50);
        assert!(rep.max_residual() < 1e-9);
    }
}
