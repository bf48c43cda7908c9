//! Planar geometry on point sets and convex polygons.
//!
//! All predicates run in double precision with an absolute tolerance of
//! [`CROSS_EPS`] on cross products. Inputs in this crate come from continuous
//! random paths, so exact degeneracies are measure-zero events.

use std::ops::{Add, Mul, Sub};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::linprog::{self, LinearProgram, LpStatus};

/// Tolerance on cross products for orientation tests.
pub const CROSS_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of `self × o`.
    #[inline]
    pub fn cross(self, o: Self) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    #[inline]
    pub fn dist_sq(self, o: Self) -> f64 {
        (self - o).norm_sq()
    }

    #[inline]
    pub fn dist(self, o: Self) -> f64 {
        (self - o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    #[inline]
    fn add(self, o: Self) -> Self {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    #[inline]
    fn mul(self, s: f64) -> Self {
        Point2::new(self.x * s, self.y * s)
    }
}

/// Orientation of `c` relative to the directed line `a → b` (positive = left).
#[inline]
pub fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    (b - a).cross(c - a)
}

/// Convex polygon stored counter-clockwise, starting at the lexicographically
/// smallest vertex, with no three consecutive vertices collinear.
///
/// Polygons with fewer than three vertices (a point or a segment) are allowed
/// and represent degenerate hulls.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point2,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Point2, radius: f64) -> Self {
        Self { center, radius }
    }

    /// Membership with a small relative slack so that boundary points count.
    #[inline]
    pub fn contains(&self, p: Point2) -> bool {
        let slack = 1e-12 * self.radius.max(1e-300) + 1e-15;
        p.dist(self.center) <= self.radius + slack
    }
}

/// The constraint `a·x ≤ b`, with `a` the outward unit normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlane {
    pub a: Point2,
    pub b: f64,
}

impl HalfPlane {
    /// Signed amount by which `p` violates the constraint (≤ 0 inside).
    #[inline]
    pub fn excess(&self, p: Point2) -> f64 {
        self.a.dot(p) - self.b
    }

    pub fn contains(&self, p: Point2) -> bool {
        self.excess(p) <= CROSS_EPS
    }
}

/// Andrew's monotone chain. Collinear points on edges are dropped.
pub fn convex_hull(points: &[Point2]) -> Result<ConvexPolygon> {
    if points.is_empty() {
        return domain("convex hull of an empty point set");
    }
    if let Some(p) = points.iter().find(|p| !p.is_finite()) {
        return domain(format!("non-finite point {p:?}"));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    Ok(ConvexPolygon {
        vertices: monotone_chain(&pts),
    })
}

/// Hull of lexicographically sorted, deduplicated points.
pub(crate) fn monotone_chain(pts: &[Point2]) -> Vec<Point2> {
    let n = pts.len();
    if n < 3 {
        return pts.to_vec();
    }
    let mut hull: Vec<Point2> = Vec::with_capacity(n + 1);
    for &p in pts {
        while hull.len() >= 2 && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= CROSS_EPS
        {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len
            && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= CROSS_EPS
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

impl ConvexPolygon {
    /// Builds a polygon from vertices already in canonical order, checking the
    /// convexity and orientation invariants.
    pub fn from_ccw(vertices: Vec<Point2>) -> Result<Self> {
        if vertices.iter().any(|p| !p.is_finite()) {
            return domain("polygon vertex is not finite");
        }
        let n = vertices.len();
        if n >= 3 {
            for i in 0..n {
                let (a, b, c) = (vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
                if orient(a, b, c) <= CROSS_EPS {
                    return domain(format!("vertex {} is not a strict left turn", (i + 1) % n));
                }
            }
        }
        let canonical = convex_hull(&vertices)?;
        if canonical.vertices.len() != n {
            return domain("vertex list is not a strictly convex polygon");
        }
        Ok(canonical)
    }

    /// Wraps output of [`monotone_chain`] without re-validating it.
    pub(crate) fn from_hull_unchecked(vertices: Vec<Point2>) -> Self {
        Self { vertices }
    }

    pub(crate) fn into_vertices(self) -> Vec<Point2> {
        self.vertices
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// True for point and segment hulls.
    pub fn is_degenerate(&self) -> bool {
        self.vertices.len() < 3
    }

    /// Boundary length. A segment counts both of its sides.
    pub fn perimeter(&self) -> f64 {
        let v = &self.vertices;
        match v.len() {
            0 | 1 => 0.0,
            2 => 2.0 * v[0].dist(v[1]),
            n => (0..n).map(|i| v[i].dist(v[(i + 1) % n])).sum(),
        }
    }

    /// Shoelace area; zero for degenerate polygons.
    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        if n < 3 {
            return 0.0;
        }
        let o = v[0];
        let twice: f64 = (1..n - 1).map(|i| (v[i] - o).cross(v[i + 1] - o)).sum();
        0.5 * twice
    }

    /// Maximum vertex distance by rotating calipers.
    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        match n {
            0 | 1 => return 0.0,
            2 => return v[0].dist(v[1]),
            _ => {}
        }
        let mut best = 0.0f64;
        let mut j = 1;
        for i in 0..n {
            let ni = (i + 1) % n;
            let edge = v[ni] - v[i];
            while edge.cross(v[(j + 1) % n] - v[i]) > edge.cross(v[j] - v[i]) {
                j = (j + 1) % n;
            }
            best = best.max(v[i].dist_sq(v[j])).max(v[ni].dist_sq(v[j]));
        }
        best.sqrt()
    }

    /// Point-in-polygon with boundary counted as inside.
    pub fn contains(&self, p: Point2) -> bool {
        let v = &self.vertices;
        match v.len() {
            0 => false,
            1 => v[0] == p,
            2 => {
                orient(v[0], v[1], p).abs() <= CROSS_EPS
                    && (p - v[0]).dot(v[1] - v[0]) >= 0.0
                    && (p - v[1]).dot(v[0] - v[1]) >= 0.0
            }
            n => (0..n).all(|i| orient(v[i], v[(i + 1) % n], p) >= -CROSS_EPS),
        }
    }

    /// One half-plane per edge, with unit outward normals.
    pub fn to_halfplanes(&self) -> Result<Vec<HalfPlane>> {
        let v = &self.vertices;
        let n = v.len();
        if n < 3 {
            return domain("half-plane form needs at least three vertices");
        }
        Ok((0..n)
            .map(|i| {
                let (p, q) = (v[i], v[(i + 1) % n]);
                let d = q - p;
                let len = d.norm();
                let a = Point2::new(d.y / len, -d.x / len);
                HalfPlane { a, b: a.dot(p) }
            })
            .collect())
    }

    /// Mean of the vertices; an interior point for non-degenerate polygons.
    pub fn vertex_centroid(&self) -> Point2 {
        let n = self.vertices.len().max(1) as f64;
        let s = self.vertices.iter().fold(Point2::ORIGIN, |acc, &p| acc + p);
        s * (1.0 / n)
    }
}

pub fn perimeter(poly: &ConvexPolygon) -> f64 {
    poly.perimeter()
}

pub fn area(poly: &ConvexPolygon) -> f64 {
    poly.area()
}

pub fn diameter(poly: &ConvexPolygon) -> f64 {
    poly.diameter()
}

pub fn to_halfplanes(poly: &ConvexPolygon) -> Result<Vec<HalfPlane>> {
    poly.to_halfplanes()
}

fn circle_from_two(a: Point2, b: Point2) -> Circle {
    let c = (a + b) * 0.5;
    Circle::new(c, 0.5 * a.dist(b))
}

/// Circle through three points, or the widest two-point circle if collinear.
fn circle_from_three(a: Point2, b: Point2, c: Point2) -> Circle {
    let (bp, cp) = (b - a, c - a);
    let d = 2.0 * bp.cross(cp);
    let scale = bp.norm_sq().max(cp.norm_sq());
    if d.abs() <= 1e-14 * scale {
        let pairs = [(a, b), (a, c), (b, c)];
        let (p, q) = pairs
            .into_iter()
            .max_by(|x, y| x.0.dist_sq(x.1).total_cmp(&y.0.dist_sq(y.1)))
            .unwrap();
        return circle_from_two(p, q);
    }
    let (b2, c2) = (bp.norm_sq(), cp.norm_sq());
    let u = Point2::new((cp.y * b2 - bp.y * c2) / d, (bp.x * c2 - cp.x * b2) / d);
    Circle::new(a + u, u.norm())
}

/// Smallest enclosing circle (Welzl's algorithm in its iterative
/// randomized-incremental form, expected linear time).
///
/// The shuffle uses a fixed seed so results are reproducible.
pub fn min_enclosing_circle(points: &[Point2]) -> Result<Circle> {
    if points.is_empty() {
        return domain("enclosing circle of an empty point set");
    }
    if points.iter().any(|p| !p.is_finite()) {
        return domain("non-finite point in enclosing circle input");
    }
    let mut pts = points.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c1c1e);
    pts.shuffle(&mut rng);

    let mut c = Circle::new(pts[0], 0.0);
    for i in 1..pts.len() {
        if c.contains(pts[i]) {
            continue;
        }
        c = Circle::new(pts[i], 0.0);
        for j in 0..i {
            if c.contains(pts[j]) {
                continue;
            }
            c = circle_from_two(pts[i], pts[j]);
            for k in 0..j {
                if !c.contains(pts[k]) {
                    c = circle_from_three(pts[i], pts[j], pts[k]);
                }
            }
        }
    }
    Ok(c)
}

/// Largest inscribed circle of a convex polygon, via the linear program
/// `maximize ρ s.t. aᵢ·x + ρ‖aᵢ‖ ≤ bᵢ`.
///
/// The inradius is unique even when the center is not; in that case one
/// optimal center is returned.
pub fn chebyshev_center(poly: &ConvexPolygon) -> Result<Circle> {
    if poly.is_degenerate() || poly.area() <= 0.0 {
        return domain("Chebyshev center of a polygon with zero area");
    }
    // Work in coordinates centred on the polygon for conditioning.
    let shift = poly.vertex_centroid();
    let planes = poly.to_halfplanes()?;
    let mut rows: Vec<(Vec<f64>, f64)> = planes
        .iter()
        .map(|h| (vec![h.a.x, h.a.y, h.a.norm()], h.b - h.a.dot(shift)))
        .collect();
    rows.push((vec![0.0, 0.0, -1.0], 0.0));
    let lp = LinearProgram::new(vec![0.0, 0.0, 1.0], rows)?;
    let sol = linprog::solve(&lp);
    if sol.status != LpStatus::Optimal {
        return domain(format!(
            "inradius program ended with status {:?}",
            sol.status
        ));
    }
    Ok(Circle::new(
        Point2::new(sol.z[0], sol.z[1]) + shift,
        sol.z[2].max(0.0),
    ))
}
