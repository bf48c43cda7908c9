use std::f64::consts::PI;

mod common;

use brownian_hull::geom::{self, Point2};
use brownian_hull::linprog::{self, LinearProgram, LpStatus};
use brownian_hull::quad;
use common::{brute_mec, grid_inradius, random_points};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn welzl_matches_brute_force_on_1000_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for trial in 0..1000 {
        let pts = random_points(&mut rng, 50);
        let w = geom::min_enclosing_circle(&pts).unwrap();
        let b = brute_mec(&pts);
        assert!(
            (w.radius - b).abs() <= 1e-9,
            "set {trial}: {} vs {b}",
            w.radius
        );
        assert!(pts.iter().all(|p| w.contains(*p)));
    }
}

#[test]
fn chebyshev_matches_grid_on_100_hulls() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for trial in 0..100 {
        let n = rng.random_range(3..30);
        let pts = random_points(&mut rng, n);
        let hull = geom::convex_hull(&pts).unwrap();
        if hull.is_degenerate() {
            continue;
        }
        let c = geom::chebyshev_center(&hull).unwrap();
        let g = grid_inradius(&hull);
        assert!(
            (c.radius - g).abs() <= 1e-4,
            "hull {trial}: {} vs {g}",
            c.radius
        );
        assert!(hull.contains(c.center));
    }
}

#[test]
fn calipers_equal_all_pairs_diameter() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..500 {
        let n = rng.random_range(2..60);
        let pts = random_points(&mut rng, n);
        let hull = geom::convex_hull(&pts).unwrap();
        let brute = pts
            .iter()
            .flat_map(|p| pts.iter().map(move |q| p.dist(*q)))
            .fold(0.0, f64::max);
        assert_eq!(hull.diameter(), brute);
    }
}

#[test]
fn cauchy_formula_recovers_perimeter() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let pts = random_points(&mut rng, 15);
        let hull = geom::convex_hull(&pts).unwrap();
        let v = hull.vertices().to_vec();
        let width = |theta: f64| {
            let u = Point2::new(theta.cos(), theta.sin());
            let (lo, hi) = v.iter().fold((f64::MAX, f64::MIN), |(a, b), p| {
                (a.min(p.dot(u)), b.max(p.dot(u)))
            });
            hi - lo
        };
        // Width is smooth between directions perpendicular to point pairs.
        let mut cuts = vec![0.0, PI];
        for (i, p) in pts.iter().enumerate() {
            for q in &pts[i + 1..] {
                let d = *q - *p;
                cuts.push((d.x.atan2(-d.y)).rem_euclid(PI));
            }
        }
        cuts.sort_by(f64::total_cmp);
        let cauchy: f64 = cuts
            .windows(2)
            .map(|w| quad::adaptive_quad(width, w[0], w[1], 1e-14).unwrap().value)
            .sum();
        assert!(
            (cauchy - hull.perimeter()).abs() < 1e-10,
            "{cauchy} vs {}",
            hull.perimeter()
        );
    }
}

#[test]
fn known_shapes() {
    let sq = geom::convex_hull(&[
        Point2::new(0.0, 0.0),
        Point2::new(2.0, 0.0),
        Point2::new(2.0, 2.0),
        Point2::new(0.0, 2.0),
        Point2::new(1.0, 1.0),
    ])
    .unwrap();
    assert_eq!(sq.len(), 4);
    assert_eq!(sq.perimeter(), 8.0);
    assert_eq!(sq.area(), 4.0);
    assert!((sq.diameter() - 8f64.sqrt()).abs() < 1e-15);
    let c = geom::chebyshev_center(&sq).unwrap();
    assert!((c.radius - 1.0).abs() < 1e-12);
    assert!(c.center.dist(Point2::new(1.0, 1.0)) < 1e-12);
    let m = geom::min_enclosing_circle(sq.vertices()).unwrap();
    assert!((m.radius - 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn lp_rejects_and_detects() {
    let unbounded = LinearProgram::new(vec![1.0, 0.0], vec![(vec![0.0, 1.0], 1.0)]).unwrap();
    assert_eq!(linprog::solve(&unbounded).status, LpStatus::Unbounded);
    let infeasible =
        LinearProgram::new(vec![1.0], vec![(vec![1.0], -1.0), (vec![-1.0], -1.0)]).unwrap();
    assert_eq!(linprog::solve(&infeasible).status, LpStatus::Infeasible);
    assert!(LinearProgram::new(vec![], vec![]).is_err());
    assert!(LinearProgram::new(vec![1.0], vec![(vec![1.0, 2.0], 1.0)]).is_err());
}

fn point() -> impl Strategy<Value = Point2> {
    (-10.0..10.0f64, -10.0..10.0f64).prop_map(|(x, y)| Point2::new(x, y))
}

fn lp_case() -> impl Strategy<Value = (Vec<f64>, Vec<(Vec<f64>, f64)>)> {
    let cut = ((-1.0..1.0f64, -1.0..1.0f64), 0.1..3.0f64).prop_map(|((a, b), h)| (vec![a, b], h));
    (
        (-1.0..1.0f64, -1.0..1.0f64),
        proptest::collection::vec(cut, 1..8),
    )
        .prop_map(|((c0, c1), cuts)| {
            let mut rows = vec![
                (vec![1.0, 0.0], 5.0),
                (vec![-1.0, 0.0], 5.0),
                (vec![0.0, 1.0], 5.0),
                (vec![0.0, -1.0], 5.0),
            ];
            rows.extend(cuts);
            (vec![c0, c1], rows)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn hull_is_idempotent_and_contains_input(pts in proptest::collection::vec(point(), 1..80)) {
        let h = geom::convex_hull(&pts).unwrap();
        prop_assert_eq!(&geom::convex_hull(h.vertices()).unwrap(), &h);
        if !h.is_degenerate() {
            for p in &pts {
                prop_assert!(h.contains(*p));
            }
        }
    }

    #[test]
    fn geometric_inequalities(pts in proptest::collection::vec(point(), 3..60)) {
        let h = geom::convex_hull(&pts).unwrap();
        prop_assume!(!h.is_degenerate() && h.area() > 1e-6);
        let (p, a, d) = (h.perimeter(), h.area(), h.diameter());
        let big_r = geom::min_enclosing_circle(h.vertices()).unwrap().radius;
        let r = geom::chebyshev_center(&h).unwrap().radius;
        let tol = 1e-9 * (1.0 + p);
        prop_assert!(2.0 * d <= p + tol && p <= PI * d + tol);
        prop_assert!(4.0 * big_r <= p + tol && p <= 2.0 * PI * big_r + tol);
        prop_assert!(PI * r * r <= a + tol);
        prop_assert!(d <= 2.0 * big_r + tol && r <= big_r + tol);
        prop_assert!(4.0 * PI * a <= p * p + tol);
        let deficit = (p * p - 4.0 * PI * a).max(0.0).sqrt();
        prop_assert!((p - deficit) / (2.0 * PI) <= r + tol);
        prop_assert!(big_r <= (p + deficit) / (2.0 * PI) + tol);
    }

    #[test]
    fn lp_invariant_under_row_order_and_scaling(
        (c, rows) in lp_case(),
        shift in 0usize..8,
        scale in 0.1..10.0f64,
    ) {
        let base = linprog::solve(&LinearProgram::new(c.clone(), rows.clone()).unwrap());
        prop_assert_eq!(base.status, LpStatus::Optimal);
        let mut permuted = rows.clone();
        permuted.rotate_left(shift % rows.len());
        permuted.reverse();
        let perm = linprog::solve(&LinearProgram::new(c.clone(), permuted).unwrap());
        prop_assert!((perm.objective_value - base.objective_value).abs() < 1e-9);
        let scaled: Vec<_> = rows
            .iter()
            .map(|(g, h)| (g.iter().map(|x| x * scale).collect(), h * scale))
            .collect();
        let sc = linprog::solve(&LinearProgram::new(c, scaled).unwrap());
        prop_assert!((sc.objective_value - base.objective_value).abs() < 1e-9);
    }

    #[test]
    fn functionals_scale_with_the_plane(pts in proptest::collection::vec(point(), 3..40), k in 0.1..10.0f64) {
        let h = geom::convex_hull(&pts).unwrap();
        prop_assume!(!h.is_degenerate() && h.area() > 1e-6);
        let scaled: Vec<_> = pts.iter().map(|p| *p * k).collect();
        let hk = geom::convex_hull(&scaled).unwrap();
        prop_assert!((hk.perimeter() - k * h.perimeter()).abs() < 1e-9 * k * h.perimeter());
        prop_assert!((hk.area() - k * k * h.area()).abs() < 1e-9 * k * k * h.area());
        let (r, rk) = (
            geom::chebyshev_center(&h).unwrap().radius,
            geom::chebyshev_center(&hk).unwrap().radius,
        );
        prop_assert!((rk - k * r).abs() < 1e-8 * k * (1.0 + r));
    }
}
