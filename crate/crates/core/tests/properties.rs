//! Invariants over random inputs.

use proptest::prelude::*;
use subfinsler::blowup::{
    build_blowup_sequence, empirical_horofunction, kuratowski_li, kuratowski_ls, GridWindow,
};
use subfinsler::distance::{d_e, distance, pansu_on_sphere};
use subfinsler::format::fmt_num;
use subfinsler::heisenberg::{dilate, lift, theta, HeisPoint};
use subfinsler::horo::{act, Family, Horofunction, Member};
use subfinsler::oracle::oracle_distance;
use subfinsler::plane::{omega, omega_covector, Vec2};
use subfinsler::polygon::fixtures::{hexagon, square};
use subfinsler::polygon::Polygon;
use subfinsler::sphere::{classify_on_sphere, unit_ball_contains_tol};

fn coord(r: f64) -> impl Strategy<Value = f64> {
    -r..r
}

fn point(r: f64) -> impl Strategy<Value = HeisPoint> {
    (coord(r), coord(r), coord(r)).prop_map(|(x, y, z)| HeisPoint::new(x, y, z))
}

fn vec2(r: f64) -> impl Strategy<Value = Vec2> {
    (coord(r), coord(r)).prop_map(|(x, y)| Vec2::new(x, y))
}

fn fixture() -> impl Strategy<Value = Polygon> {
    prop_oneof![Just(hexagon()), Just(square())]
}

/// Centrally symmetric polygons from sorted angles in `(0, pi)` and radii in `[0.5, 1.5]`.
fn random_polygon() -> impl Strategy<Value = Polygon> {
    (2usize..=5)
        .prop_flat_map(|n| (prop::collection::vec(0.0..1.0f64, n), prop::collection::vec(0.5..1.5f64, n)))
        .prop_filter_map("strictly convex", |(gaps, radii)| {
            let total: f64 = gaps.iter().map(|g| g + 0.2).sum();
            let mut t = 0.0f64;
            let half: Vec<Vec2> = gaps
                .iter()
                .zip(&radii)
                .map(|(g, r)| {
                    let v = Vec2::new(r * t.cos(), r * t.sin());
                    t += (g + 0.2) / total * std::f64::consts::PI;
                    v
                })
                .collect();
            let full: Vec<Vec2> = half.iter().copied().chain(half.iter().map(|&v| -v)).collect();
            Polygon::build(&full).ok()
        })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_law_is_associative_with_inverses(p in point(3.0), q in point(3.0), r in point(3.0)) {
        let (a, b) = ((p * q) * r, p * (q * r));
        prop_assert!(a.dist_max(b) < 1e-12);
        prop_assert!((p * p.inv()).dist_max(HeisPoint::IDENTITY) < 1e-15);
    }

    #[test]
    fn dilations_are_automorphisms(p in point(3.0), q in point(3.0), lam in 0.1..5.0f64) {
        let lhs = dilate(lam, p * q).unwrap();
        let rhs = dilate(lam, p).unwrap() * dilate(lam, q).unwrap();
        prop_assert!(lhs.dist_max(rhs) < 1e-11);
    }

    #[test]
    fn theta_is_an_anti_symplectic_involution(g in fixture(), p in point(3.0), a in vec2(2.0), b in vec2(2.0)) {
        prop_assert!(theta(theta(p, &g), &g).dist_max(p) < 1e-12);
        let ta = theta(HeisPoint::horizontal(a), &g).project();
        let tb = theta(HeisPoint::horizontal(b), &g).project();
        prop_assert!(close(omega(ta, tb), -omega(a, b), 1e-12));
    }

    #[test]
    fn lifting_in_two_stages_matches_one_shot(pts in prop::collection::vec(vec2(2.0), 3..10), split in 1usize..8, z0 in coord(1.0)) {
        let k = split.min(pts.len() - 2);
        let whole = lift(&pts, z0);
        let head = lift(&pts[..=k], z0);
        let tail = lift(&pts[k..], head[k].z);
        prop_assert!(whole.last().unwrap().dist_max(*tail.last().unwrap()) < 1e-12);
    }

    #[test]
    fn random_polygons_satisfy_the_dual_relations(g in random_polygon()) {
        let n = g.len() as isize;
        for k in 0..n {
            let a = g.alpha(k);
            prop_assert!(close(a.apply(g.v(k)), 1.0, 1e-12));
            prop_assert!(close(a.apply(g.v(k + 1)), 1.0, 1e-12));
            prop_assert!(close(g.dual_gauge(a), 1.0, 1e-12));
            let jump = g.alpha(k) - g.alpha(k - 1);
            let expect = omega_covector(g.v(k)) * g.kappa(k);
            prop_assert!(jump.dist_max(expect) < 1e-12);
        }
        prop_assert!(g.unit_iso_area > 0.0);
    }

    #[test]
    fn distance_is_homogeneous_symmetric_and_left_invariant(
        g in fixture(), p in point(2.0), q in point(2.0), a in point(2.0), lam in 0.2..4.0f64,
    ) {
        prop_assume!(!p.is_identity());
        let d = d_e(&g, p);
        prop_assert!(close(d_e(&g, p.scaled(lam)), lam * d, 1e-11));
        prop_assert!(close(d_e(&g, p.inv()), d, 1e-11));
        prop_assert!(close(distance(&g, a * p, a * q), distance(&g, p, q), 1e-10));
        prop_assert!(d_e(&g, p * q) <= d + d_e(&g, q) + 1e-10);
    }

    #[test]
    fn horizontal_distance_is_the_gauge(g in random_polygon(), v in vec2(2.0)) {
        prop_assert!(close(d_e(&g, HeisPoint::horizontal(v)), g.gauge(v), 1e-11));
    }

    #[test]
    fn normalised_points_land_on_the_sphere(g in random_polygon(), p in point(2.0)) {
        prop_assume!(!p.is_identity());
        let q = p.scaled(1.0 / d_e(&g, p));
        prop_assert!(unit_ball_contains_tol(&g, q, 1e-9));
        prop_assert!(!unit_ball_contains_tol(&g, q.scaled(1.0 + 1e-6), 0.0));
    }

    #[test]
    fn eikonal_on_random_polygons(g in random_polygon(), p in point(1.0)) {
        prop_assume!(!p.is_identity());
        let q = p.scaled(1.0 / d_e(&g, p));
        prop_assume!(classify_on_sphere(&g, q).is_smooth());
        if let Ok(c) = pansu_on_sphere(&g, q) {
            prop_assert!(close(g.dual_gauge(c), 1.0, 1e-9));
        }
    }

    #[test]
    fn numbers_keep_twelve_significant_digits(x in -1e9..1e9f64) {
        let back: f64 = fmt_num(x).parse().unwrap();
        prop_assert!((back - x).abs() <= 5e-12 * x.abs());
    }
}

fn horofunction(g: &Polygon) -> impl Strategy<Value = Horofunction> {
    let n = g.len();
    let g = g.clone();
    prop_oneof![
        (0..n, 0.0..=1.0f64).prop_map({
            let g = g.clone();
            move |(i, s)| Horofunction::Linear { beta: g.mix(i as isize, s) }
        }),
        vec2(2.0).prop_map(|w| Horofunction::NormType { w }),
        (0..n, 0usize..4, 0.0..=1.0f64, coord(2.0))
            .prop_map(move |(i, f, s, a)| Horofunction::two_piece(&g, i, Family::ALL[f], s, a).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn horofunctions_vanish_at_e_and_are_one_lipschitz(
        (g, h) in fixture().prop_flat_map(|g| (Just(g.clone()), horofunction(&g))),
        x in point(2.0), y in point(2.0),
    ) {
        prop_assert!(h.eval(HeisPoint::IDENTITY, &g).abs() < 1e-12);
        prop_assert!((h.eval(x, &g) - h.eval(y, &g)).abs() <= distance(&g, x, y) + 1e-9);
    }

    #[test]
    fn action_composes(
        (g, h) in fixture().prop_flat_map(|g| (Just(g.clone()), horofunction(&g))),
        a in point(2.0), b in point(2.0), v in vec2(3.0),
    ) {
        let nested = act(a, &act(b, &h, &g).unwrap(), &g).unwrap();
        let joint = act(a * b, &h, &g).unwrap();
        prop_assert!((nested.eval_plane(v, &g) - joint.eval_plane(v, &g)).abs() < 1e-9);
    }

    #[test]
    fn empirical_horofunctions_vanish_at_e_and_are_lipschitz(g in fixture(), c in -2.0..2.0f64, k in 0usize..6) {
        let i = k % g.len();
        let p = HeisPoint::horizontal(g.v(i as isize));
        let seq = build_blowup_sequence(&g, p, &Member::Crease { i, c }, vec![0.25, 0.125, 0.0625]).unwrap();
        let grid = GridWindow::new(1.0, 0.5, Some(vec![-0.5, 0.0, 0.5])).unwrap();
        let table = empirical_horofunction(&g, &seq, &grid, None);
        prop_assert!(table.steps.iter().all(|s| s.lipschitz_ok));
        let at_e = table.final_values.iter().find(|(x, _)| x.is_identity()).unwrap().1;
        prop_assert_eq!(at_e, 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn inferior_limit_is_inside_superior_limit(covs in prop::collection::vec((coord(1.0), coord(1.0), coord(1.0)), 2..6)) {
        let grid = GridWindow::new(1.0, 0.25, Some(vec![0.0])).unwrap();
        let sets: Vec<Box<dyn Fn(HeisPoint) -> bool + Sync>> = covs
            .iter()
            .map(|&(a, b, c)| Box::new(move |x: HeisPoint| a * x.x + b * x.y <= c) as Box<dyn Fn(HeisPoint) -> bool + Sync>)
            .collect();
        let refs: Vec<&(dyn Fn(HeisPoint) -> bool + Sync)> = sets.iter().map(|s| s.as_ref()).collect();
        let li = kuratowski_li(&refs, &grid, 0..refs.len()).unwrap();
        let ls = kuratowski_ls(&refs, &grid, 0..refs.len()).unwrap();
        prop_assert!(li.is_subset(&ls));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn oracle_never_beats_the_distance(g in fixture(), p in point(2.0), seed in any::<u64>()) {
        let o = oracle_distance(&g, p, 2 * g.len(), 4, seed);
        prop_assert!(o >= d_e(&g, p) - 1e-6, "oracle {} below d_e {}", o, d_e(&g, p));
    }
}
