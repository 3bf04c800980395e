//! Reference values recomputed here from raw vertices, without the library's
//! geometry, then compared with what the library reports.

use subfinsler::blowup::vertical_sequence_deviation;
use subfinsler::distance::d_e;
use subfinsler::heisenberg::HeisPoint;
use subfinsler::oracle::oracle_distance;
use subfinsler::plane::Vec2;
use subfinsler::polygon::fixtures::{hexagon, hexagon_vertices, square, square_vertices};
use subfinsler::sphere::{ceiling_height, classify_sphere_point, unit_ball_contains, SphereClass};

type P = (f64, f64);

fn raw(vs: &[Vec2]) -> Vec<P> {
    vs.iter().map(|v| (v.x, v.y)).collect()
}

/// Covector equal to 1 on both endpoints of edge `k`.
fn support(vs: &[P], k: usize) -> P {
    let (a, b) = (vs[k], vs[(k + 1) % vs.len()]);
    let det = a.0 * b.1 - a.1 * b.0;
    ((b.1 - a.1) / det, (a.0 - b.0) / det)
}

fn gauge(vs: &[P], v: P) -> f64 {
    (0..vs.len()).map(|k| support(vs, k)).map(|c| c.0 * v.0 + c.1 * v.1).fold(f64::MIN, f64::max)
}

fn shoelace(pts: &[P]) -> f64 {
    let n = pts.len();
    0.5 * (0..n).map(|k| pts[k].0 * pts[(k + 1) % n].1 - pts[(k + 1) % n].0 * pts[k].1).sum::<f64>()
}

/// Isoperimetrix: the dual polygon turned a quarter. Returns (area, perimeter in the gauge).
fn isoperimetrix(vs: &[P]) -> (f64, f64) {
    let iso: Vec<P> = (0..vs.len()).map(|k| support(vs, k)).map(|(a, b)| (-b, a)).collect();
    let n = iso.len();
    let per = (0..n)
        .map(|k| gauge(vs, (iso[(k + 1) % n].0 - iso[k].0, iso[(k + 1) % n].1 - iso[k].1)))
        .sum();
    (shoelace(&iso).abs(), per)
}

#[test]
fn isoperimetrix_constants_match_the_reference() {
    for (g, vs) in [(hexagon(), raw(&hexagon_vertices())), (square(), raw(&square_vertices()))] {
        let (area, per) = isoperimetrix(&vs);
        assert!((g.iso_area - area).abs() < 1e-12);
        assert!((g.iso_perimeter - per).abs() < 1e-12);
        assert!((g.unit_iso_area - area / (per * per)).abs() < 1e-12);
    }
    let (area, per) = isoperimetrix(&raw(&hexagon_vertices()));
    assert_eq!((area, per), (3.0, 6.0));
}

#[test]
fn pole_distance_is_the_isoperimetrix_loop() {
    // the scaled isoperimetrix loop enclosing area 1 has length l / sqrt(A)
    for (g, vs) in [(hexagon(), raw(&hexagon_vertices())), (square(), raw(&square_vertices()))] {
        let (area, per) = isoperimetrix(&vs);
        let expect = per / area.sqrt();
        assert!((d_e(&g, HeisPoint::new(0.0, 0.0, 1.0)) - expect).abs() < 1e-9);
        assert!((d_e(&g, HeisPoint::new(0.0, 0.0, -1.0)) - expect).abs() < 1e-9);
    }
    assert!((d_e(&hexagon(), HeisPoint::new(0.0, 0.0, 1.0)) - 12f64.sqrt()).abs() < 1e-9);
}

#[test]
fn horizontal_distance_is_the_reference_gauge() {
    let g = hexagon();
    let vs = raw(&hexagon_vertices());
    for k in 0..48 {
        let t = k as f64 * std::f64::consts::TAU / 48.0;
        let v = (1.7 * t.cos(), 1.7 * t.sin());
        assert!((d_e(&g, HeisPoint::new(v.0, v.1, 0.0)) - gauge(&vs, v)).abs() < 1e-9);
    }
}

#[test]
fn wall_top_is_the_two_segment_area() {
    // over the midpoint of an edge, the highest unit path runs along v_i then v_{i+1}
    let g = hexagon();
    let vs = raw(&hexagon_vertices());
    let (a, b) = (vs[0], vs[1]);
    let top = 0.5 * 0.5 * 0.5 * (a.0 * b.1 - a.1 * b.0);
    assert_eq!(top, 0.125);
    let mid = Vec2::new(0.5 * (a.0 + b.0), 0.5 * (a.1 + b.1));
    assert!((d_e(&g, HeisPoint::from_parts(mid, top)) - 1.0).abs() < 1e-9);
    assert!(d_e(&g, HeisPoint::from_parts(mid, top + 0.01)) > 1.0);
    assert!(top > g.unit_iso_area);
}

#[test]
fn ceiling_height_at_the_centre_and_vertices() {
    for g in [hexagon(), square()] {
        assert!((ceiling_height(&g, Vec2::ZERO).unwrap() - g.unit_iso_area).abs() < 1e-12);
        for k in 0..g.len() {
            assert!(ceiling_height(&g, g.v(k as isize)).unwrap().abs() < 1e-12);
        }
    }
}

#[test]
fn pole_membership_and_classes() {
    let g = hexagon();
    let pole = HeisPoint::new(0.0, 0.0, 1.0 / 12.0);
    assert!(unit_ball_contains(&g, pole));
    assert!(!unit_ball_contains(&g, HeisPoint::new(0.0, 0.0, 1.0 / 12.0 + 0.01)));
    assert_eq!(classify_sphere_point(&g, pole, 1e-9).unwrap(), SphereClass::NorthPole);
    let wall = classify_sphere_point(&g, HeisPoint::new(1.0, 0.5, 0.05), 1e-9).unwrap();
    assert!(matches!(wall, SphereClass::WallInterior { i: 0 }), "{wall:?}");
}

#[test]
fn mixed_covector_is_the_midpoint_of_neighbouring_supports() {
    let g = hexagon();
    let vs = raw(&hexagon_vertices());
    let (p, q) = (support(&vs, 5), support(&vs, 0));
    assert_eq!((p, q), ((1.0, -1.0), (1.0, 0.0)));
    let m = g.mix(0, 0.5);
    assert!((m.a - 1.0).abs() < 1e-15 && (m.b + 0.5).abs() < 1e-15);
}

#[test]
fn oracle_reproduces_straight_line_and_pole_optima() {
    let g = hexagon();
    let line = oracle_distance(&g, HeisPoint::new(2.0, 0.0, 0.0), 12, 16, 42);
    assert!((line - 2.0).abs() < 1e-3, "{line}");
    let pole = oracle_distance(&g, HeisPoint::new(0.0, 0.0, 1.0), 12, 16, 42);
    assert!((pole - 12f64.sqrt()).abs() < 1e-2, "{pole}");
}

#[test]
fn vertical_sequence_on_horizontal_probes() {
    let g = hexagon();
    let vs = raw(&hexagon_vertices());
    let probes: Vec<HeisPoint> = (-8..=8)
        .flat_map(|a| (-8..=8).map(move |b| (0.25 * a as f64, 0.25 * b as f64)))
        .filter(|&v| gauge(&vs, v) <= 2.0)
        .map(|(x, y)| HeisPoint::new(x, y, 0.0))
        .collect();
    let w = Vec2::new(0.3, 0.2);
    let rep = vertical_sequence_deviation(&g, w, &[1e2, 1e3, 1e4, 1e6], &probes).unwrap();
    assert!(rep.monotone, "{rep:?}");
    // worst probe (-0.75, 1.25); the brute-force oracle gives 0.0139211 there
    assert!((rep.deviations[2] - 0.0139211).abs() < 1e-6, "{rep:?}");
    for k in 0..2 {
        let ratio = rep.deviations[k] / rep.deviations[k + 1];
        assert!((ratio - 10f64.sqrt()).abs() < 0.05, "{rep:?}");
    }
    assert!(rep.deviations[3] <= 1e-2, "{rep:?}");
    let origin = vertical_sequence_deviation(&g, Vec2::ZERO, &[1e4], &[HeisPoint::IDENTITY]).unwrap();
    assert!(origin.deviations[0] <= 1e-6);
}
