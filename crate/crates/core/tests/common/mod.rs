//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use brownian_hull::geom::{ConvexPolygon, Point2};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<Point2> {
    (0..n)
        .map(|_| Point2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

fn circumcircle(a: Point2, b: Point2, c: Point2) -> Option<(Point2, f64)> {
    let (bp, cp) = (b - a, c - a);
    let d = 2.0 * bp.cross(cp);
    if d.abs() < 1e-12 {
        return None;
    }
    let (b2, c2) = (bp.norm_sq(), cp.norm_sq());
    let u = Point2::new((cp.y * b2 - bp.y * c2) / d, (bp.x * c2 - cp.x * b2) / d);
    Some((a + u, u.norm()))
}

/// Smallest of all pair and triple circles that cover the set.
pub fn brute_mec(pts: &[Point2]) -> f64 {
    let covers = |c: Point2, r: f64| pts.iter().all(|p| p.dist(c) <= r + 1e-12);
    let mut best = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let r = 0.5 * pts[i].dist(pts[j]);
            if r < best && covers((pts[i] + pts[j]) * 0.5, r) {
                best = r;
            }
            for k in j + 1..pts.len() {
                if let Some((c, r)) = circumcircle(pts[i], pts[j], pts[k]) {
                    if r < best && covers(c, r) {
                        best = r;
                    }
                }
            }
        }
    }
    best
}

/// Maximum of a concave function on `[lo, hi]` by repeated grid refinement:
/// the maximizer lies between the neighbours of the grid argmax.
fn zoom_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let n = 20;
    let mut best = f64::NEG_INFINITY;
    while hi - lo > 1e-13 * (1.0 + lo.abs().max(hi.abs())) {
        let h = (hi - lo) / n as f64;
        let (k, v) = (0..=n)
            .map(|k| (k, f(lo + h * k as f64)))
            .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
        best = best.max(v);
        let mid = lo + h * k as f64;
        (lo, hi) = (mid - h, mid + h);
    }
    best
}

/// Maximum over nested zooming grids of the distance to the polygon
/// boundary. The distance is concave in the plane, and so is its maximum over
/// vertical lines.
pub fn grid_inradius(poly: &ConvexPolygon) -> f64 {
    let planes = poly.to_halfplanes().unwrap();
    let depth = |x: f64, y: f64| {
        let p = Point2::new(x, y);
        planes
            .iter()
            .map(|h| -h.excess(p) / h.a.norm())
            .fold(f64::INFINITY, f64::min)
    };
    let v = poly.vertices();
    let (x0, x1) = v
        .iter()
        .fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p.x), b.max(p.x)));
    let (y0, y1) = v
        .iter()
        .fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p.y), b.max(p.y)));
    zoom_max(|x| zoom_max(|y| depth(x, y), y0, y1), x0, x1)
}

/// Mean hull perimeter of `n` Gaussian steps with variance `dt` per
/// coordinate: `√(2π dt) Σ_{k≤n} k^{−1/2}`.
pub fn discrete_mean_perimeter(n: u64, dt: f64) -> f64 {
    (2.0 * PI * dt).sqrt() * (1..=n).map(|k| (k as f64).powf(-0.5)).sum::<f64>()
}

/// Mean hull area of the same walk: `(dt/2) Σ_{i+j≤n} (ij)^{−1/2}`.
pub fn discrete_mean_area(n: u64, dt: f64) -> f64 {
    let n = n as usize;
    let mut prefix = vec![0.0; n + 1];
    for k in 1..=n {
        prefix[k] = prefix[k - 1] + (k as f64).powf(-0.5);
    }
    let s: f64 = (1..n).map(|i| (i as f64).powf(-0.5) * prefix[n - i]).sum();
    0.5 * dt * s
}
