use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::geom::{self, ConvexPolygon, Point2};

use super::FunctionalKind;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HullFunctionals {
    pub perimeter: f64,
    pub area: f64,
    pub diameter: f64,
    pub circumradius: f64,
    pub inradius: f64,
}

impl HullFunctionals {
    pub fn of(poly: &ConvexPolygon) -> Self {
        if poly.is_empty() {
            return Self::default();
        }
        let circumradius = geom::min_enclosing_circle(poly.vertices()).map_or(0.0, |c| c.radius);
        let inradius = if poly.is_degenerate() {
            0.0
        } else {
            geom::chebyshev_center(poly).map_or(0.0, |c| c.radius)
        };
        Self {
            perimeter: poly.perimeter(),
            area: poly.area(),
            diameter: poly.diameter(),
            circumradius,
            inradius,
        }
    }

    /// Value of a hull functional; `None` for the range kinds.
    pub fn get(&self, kind: FunctionalKind) -> Option<f64> {
        match kind {
            FunctionalKind::Perimeter => Some(self.perimeter),
            FunctionalKind::Area => Some(self.area),
            FunctionalKind::Diameter => Some(self.diameter),
            FunctionalKind::Circumradius => Some(self.circumradius),
            FunctionalKind::Inradius => Some(self.inradius),
            _ => None,
        }
    }

    /// `P² − 4πA`, clamped at zero.
    pub fn isoperimetric_deficit(&self) -> f64 {
        (self.perimeter * self.perimeter - 4.0 * PI * self.area).max(0.0)
    }

    /// Bonnesen lower bound on the inradius, `(P − √(P² − 4πA))/(2π)`.
    pub fn bonnesen_inradius_lower(&self) -> f64 {
        (self.perimeter - self.isoperimetric_deficit().sqrt()) / (2.0 * PI)
    }

    /// Bonnesen upper bound on the circumradius, `(P + √(P² − 4πA))/(2π)`.
    pub fn bonnesen_circumradius_upper(&self) -> f64 {
        (self.perimeter + self.isoperimetric_deficit().sqrt()) / (2.0 * PI)
    }
}

#[derive(Debug, Clone, Default)]
struct EdgeLines {
    nx: Vec<f64>,
    ny: Vec<f64>,
    c: Vec<f64>,
}

impl EdgeLines {
    fn clear(&mut self) {
        self.nx.clear();
        self.ny.clear();
        self.c.clear();
    }

    fn push_edge(&mut self, a: Point2, b: Point2) {
        let e = b - a;
        let inv = 1.0 / e.norm();
        let (nx, ny) = (-e.y * inv, e.x * inv);
        self.nx.push(nx);
        self.ny.push(ny);
        self.c.push(nx * a.x + ny * a.y);
    }

    fn push_copy(&mut self, from: &EdgeLines, k: usize) {
        self.nx.push(from.nx[k]);
        self.ny.push(from.ny[k]);
        self.c.push(from.c[k]);
    }

    fn rotate_left(&mut self, m: usize) {
        self.nx.rotate_left(m);
        self.ny.rotate_left(m);
        self.c.rotate_left(m);
    }

    #[inline]
    fn signed_dist(&self, k: usize, p: Point2) -> f64 {
        self.nx[k] * p.x + self.ny[k] * p.y - self.c[k]
    }
}

/// Convex hull of a growing point sequence.
///
/// Points inside a disk around the last point known to be interior are
/// skipped in constant time; other points get an `O(h)` inside test against
/// the edge lines. A point outside replaces the chain of edges it sees.
#[derive(Debug, Clone)]
pub struct IncrementalHull {
    poly: ConvexPolygon,
    /// Edge `i` (from vertex `i` to `i + 1`) as `n·x = c` with unit inward `n`.
    lines: EdgeLines,
    spare_lines: EdgeLines,
    spare_ring: Vec<Point2>,
    anchor: Point2,
    safe_r2: f64,
}

/// Distance tolerance for the inside test.
const INSIDE_EPS: f64 = 1e-12;

impl IncrementalHull {
    pub fn new(p: Point2) -> Self {
        Self {
            poly: ConvexPolygon::from_hull_unchecked(vec![p]),
            lines: EdgeLines::default(),
            spare_lines: EdgeLines::default(),
            spare_ring: Vec::new(),
            anchor: p,
            safe_r2: 0.0,
        }
    }

    pub fn polygon(&self) -> &ConvexPolygon {
        &self.poly
    }

    pub fn vertices(&self) -> &[Point2] {
        self.poly.vertices()
    }

    /// Adds a point. Returns true if the hull changed.
    pub fn push(&mut self, p: Point2) -> bool {
        if (p - self.anchor).norm_sq() < self.safe_r2 {
            return false;
        }
        let n = self.poly.len();
        if n < 3 {
            if self.poly.contains(p) {
                return false;
            }
            self.rebuild_small(p);
            return true;
        }
        let l = &self.lines;
        let mut depth = f64::INFINITY;
        for ((nx, ny), c) in l.nx.iter().zip(&l.ny).zip(&l.c) {
            let d = nx * p.x + ny * p.y - c;
            depth = if d < depth { d } else { depth };
        }
        if depth < -INSIDE_EPS {
            let seed = (0..n).find(|&k| l.signed_dist(k, p) < -INSIDE_EPS).unwrap();
            self.insert_outside(p, seed);
            return true;
        }
        self.anchor = p;
        self.safe_r2 = depth * depth;
        false
    }

    fn rebuild_small(&mut self, p: Point2) {
        let mut pts = std::mem::take(&mut self.poly).into_vertices();
        pts.push(p);
        pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        pts.dedup();
        let ring = geom::monotone_chain(&pts);
        let n = ring.len();
        self.lines.clear();
        if n >= 3 {
            for i in 0..n {
                self.lines.push_edge(ring[i], ring[(i + 1) % n]);
            }
        }
        self.poly = ConvexPolygon::from_hull_unchecked(ring);
        self.anchor = p;
        self.safe_r2 = 0.0;
    }

    /// Replaces the chain of edges visible from `p`, which contains edge
    /// `seed`, by the two edges through `p`.
    fn insert_outside(&mut self, p: Point2, seed: usize) {
        let v = self.poly.vertices();
        let n = v.len();
        let lines = &self.lines;
        let prev = |k: usize| if k == 0 { n - 1 } else { k - 1 };
        let next = |k: usize| if k + 1 == n { 0 } else { k + 1 };
        let visible = |k: usize| lines.signed_dist(k, p) <= INSIDE_EPS;
        let (mut lo, mut hi, mut span) = (seed, seed, 1);
        while span < n && visible(prev(lo)) {
            lo = prev(lo);
            span += 1;
        }
        while span < n && visible(next(hi)) {
            hi = next(hi);
            span += 1;
        }
        // Keep vertices hi+1, ..., lo (cyclically) and close the ring with p.
        let first = next(hi);
        let ring = &mut self.spare_ring;
        let out = &mut self.spare_lines;
        ring.clear();
        out.clear();
        ring.push(p);
        out.push_edge(p, v[first]);
        let mut k = first;
        loop {
            ring.push(v[k]);
            if k == lo {
                out.push_edge(v[k], p);
                break;
            }
            out.push_copy(lines, k);
            k = next(k);
        }
        // Restore the canonical start at the lexicographically smallest vertex.
        let mut m = 0;
        for i in 1..ring.len() {
            if (ring[i].x, ring[i].y) < (ring[m].x, ring[m].y) {
                m = i;
            }
        }
        ring.rotate_left(m);
        out.rotate_left(m);
        let old = std::mem::replace(
            &mut self.poly,
            ConvexPolygon::from_hull_unchecked(std::mem::take(ring)),
        );
        self.spare_ring = old.into_vertices();
        std::mem::swap(&mut self.lines, &mut self.spare_lines);
        self.anchor = p;
        self.safe_r2 = 0.0;
    }
}

/// Running state of one path: position, time, hull and coordinate extrema.
#[derive(Debug, Clone)]
pub struct PathState {
    pub position: Point2,
    pub time: f64,
    pub coord_min: Point2,
    pub coord_max: Point2,
    hull: IncrementalHull,
}

impl Default for PathState {
    fn default() -> Self {
        Self::new()
    }
}

impl PathState {
    /// State at time zero with the path at the origin.
    pub fn new() -> Self {
        Self {
            position: Point2::ORIGIN,
            time: 0.0,
            coord_min: Point2::ORIGIN,
            coord_max: Point2::ORIGIN,
            hull: IncrementalHull::new(Point2::ORIGIN),
        }
    }

    /// Records the next grid point. Returns true if the hull changed.
    #[inline]
    pub fn advance(&mut self, p: Point2, time: f64) -> bool {
        self.position = p;
        self.time = time;
        self.coord_min.x = self.coord_min.x.min(p.x);
        self.coord_min.y = self.coord_min.y.min(p.y);
        self.coord_max.x = self.coord_max.x.max(p.x);
        self.coord_max.y = self.coord_max.y.max(p.y);
        self.hull.push(p)
    }

    pub fn hull(&self) -> &ConvexPolygon {
        self.hull.polygon()
    }

    pub fn range_x(&self) -> f64 {
        self.coord_max.x - self.coord_min.x
    }

    pub fn range_y(&self) -> f64 {
        self.coord_max.y - self.coord_min.y
    }

    pub fn functionals(&self) -> HullFunctionals {
        HullFunctionals::of(self.hull())
    }
}

/// Everything recorded about one path at time one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSummary {
    pub functionals: HullFunctionals,
    pub range_x: f64,
    pub range_y: f64,
    /// Inradius of the triangle `W(0)`, `W(1/2)`, `W(1)`.
    pub chord_inradius: f64,
    /// Names of violated hull inequalities; empty on a healthy hull.
    #[serde(skip_deserializing)]
    pub violations: Vec<&'static str>,
}

impl PathSummary {
    pub fn new(state: &PathState, midpoint: Point2) -> Self {
        let functionals = state.functionals();
        let violations = audit(
            &functionals,
            state.hull(),
            state.range_x(),
            state.range_y(),
            AUDIT_SLACK,
        );
        Self {
            functionals,
            range_x: state.range_x(),
            range_y: state.range_y(),
            chord_inradius: super::triangle_inradius(Point2::ORIGIN, midpoint, state.position),
            violations,
        }
    }
}

/// Relative slack used by the per-path audit.
pub const AUDIT_SLACK: f64 = 1e-9;

/// Checks the per-hull inequalities and returns the names of those violated
/// beyond `slack` (relative to the larger side, plus `slack` absolute).
pub fn audit(
    f: &HullFunctionals,
    poly: &ConvexPolygon,
    range_x: f64,
    range_y: f64,
    slack: f64,
) -> Vec<&'static str> {
    let le = |a: f64, b: f64| a <= b + slack * (1.0 + a.abs().max(b.abs()));
    let (p, a, d, big_r, r) = (f.perimeter, f.area, f.diameter, f.circumradius, f.inradius);
    let mut bad = Vec::new();
    if poly.len() >= 3 && !(le(2.0 * d, p) && le(p, PI * d)) {
        bad.push("2D <= P <= pi D");
    }
    if !(le(4.0 * big_r, p) && le(p, 2.0 * PI * big_r)) {
        bad.push("4R <= P <= 2 pi R");
    }
    if !le(PI * r * r, a) {
        bad.push("A >= pi r^2");
    }
    if !(le(d, 2.0 * big_r) && le(r, big_r) && le(4.0 * PI * a, p * p)) {
        bad.push("D <= 2R, r <= R, P^2 >= 4 pi A");
    }
    if !(le(f.bonnesen_inradius_lower(), r) && le(big_r, f.bonnesen_circumradius_upper())) {
        bad.push("Bonnesen sandwich");
    }
    if !(le(range_x.max(range_y), d) && le(d, range_x.hypot(range_y))) {
        bad.push("max(R1, R2) <= D <= sqrt(R1^2 + R2^2)");
    }
    if !le(r, big_r) {
        bad.push("inradius <= circumradius");
    }
    match geom::convex_hull(poly.vertices()) {
        Ok(h) if h == *poly => {}
        _ => bad.push("hull idempotence"),
    }
    bad
}
