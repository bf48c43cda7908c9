use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::geom::{self, ConvexPolygon, Point2};

use super::hull::{PathState, PathSummary};
use super::{BrownianPath, FunctionalKind, Passage, PathConfig};

/// A first-passage question: when does `kind` first exceed `level`, looking
/// no further than `horizon`?
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub kind: FunctionalKind,
    pub level: f64,
    pub horizon: f64,
}

/// Hull changes buffered between exact inradius checks.
const INRADIUS_CHECK_EVERY: usize = 8;

fn inradius_of(vertices: &[Point2]) -> f64 {
    if vertices.len() < 3 {
        return 0.0;
    }
    let poly = ConvexPolygon::from_hull_unchecked(vertices.to_vec());
    geom::chebyshev_center(&poly).map_or(0.0, |c| c.radius)
}

/// Lazy first-passage tracking for the inradius.
///
/// Cheap bounds `(P − √(P² − 4πA))/(2π) ≤ r ≤ min(2A/P, √(A/π))` settle most
/// hull changes. Undecided hulls are buffered and one linear program is
/// solved per [`INRADIUS_CHECK_EVERY`] of them; once a check succeeds, a
/// bisection over the buffer finds the first hull above the level. Inradius
/// is monotone in the hull, so the bisection is exact.
#[derive(Debug, Default)]
struct InradiusTracker {
    pending: Vec<(f64, Vec<Point2>)>,
}

impl InradiusTracker {
    fn first_hit_in_pending(&self, level: f64) -> Option<f64> {
        let last = self.pending.last()?;
        if inradius_of(&last.1) <= level {
            return None;
        }
        let (mut lo, mut hi) = (0usize, self.pending.len() - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if inradius_of(&self.pending[mid].1) > level {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Some(self.pending[lo].0)
    }

    fn on_hull_change(
        &mut self,
        time: f64,
        vertices: &[Point2],
        p: f64,
        a: f64,
        level: f64,
    ) -> Option<f64> {
        if vertices.len() < 3 || p <= 0.0 {
            return None;
        }
        let upper = (2.0 * a / p).min((a / PI).sqrt());
        if upper <= level {
            self.pending.clear();
            return None;
        }
        let lower = (p - (p * p - 4.0 * PI * a).max(0.0).sqrt()) / (2.0 * PI);
        if lower > level {
            return Some(self.first_hit_in_pending(level).unwrap_or(time));
        }
        self.pending.push((time, vertices.to_vec()));
        if self.pending.len() >= INRADIUS_CHECK_EVERY {
            let hit = self.first_hit_in_pending(level);
            self.pending.clear();
            return hit;
        }
        None
    }

    fn finish(&mut self, level: f64) -> Option<f64> {
        let hit = self.first_hit_in_pending(level);
        self.pending.clear();
        hit
    }
}

struct Tracker {
    target: Target,
    last_step: u64,
    result: Option<Passage>,
    inradius: InradiusTracker,
}

/// Hull quantities shared by all targets at one hull change, computed on
/// demand.
struct HullView<'a> {
    vertices: &'a [Point2],
    poly: &'a ConvexPolygon,
    perimeter: Option<f64>,
    area: Option<f64>,
    diameter: Option<f64>,
}

impl<'a> HullView<'a> {
    fn perimeter(&mut self) -> f64 {
        *self.perimeter.get_or_insert_with(|| self.poly.perimeter())
    }
    fn area(&mut self) -> f64 {
        *self.area.get_or_insert_with(|| self.poly.area())
    }
    fn diameter(&mut self) -> f64 {
        *self.diameter.get_or_insert_with(|| self.poly.diameter())
    }
}

/// Result of [`joint_sample`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointSample {
    /// Summary of the path on `[0, 1]`, when requested.
    pub at_one: Option<PathSummary>,
    /// One passage per target, in target order.
    pub passages: Vec<Passage>,
}

/// Follows one path until every target is resolved, optionally recording the
/// hull at time one on the way. Target horizons replace `cfg.horizon`.
pub fn joint_sample(
    cfg: &PathConfig,
    path_index: u64,
    targets: &[Target],
    record_at_one: bool,
) -> JointSample {
    let mut trackers: Vec<Tracker> = targets
        .iter()
        .map(|&target| Tracker {
            target,
            last_step: cfg.steps_to(target.horizon),
            result: None,
            inradius: InradiusTracker::default(),
        })
        .collect();
    let one = cfg.n_steps;
    let mut at_one = None;
    let mut mid = Point2::ORIGIN;
    let mut path = BrownianPath::new(cfg, path_index);
    let mut state = PathState::new();
    let mut open = trackers.len();
    let dt = cfg.dt();

    let mut step = 0u64;
    while open > 0 || (record_at_one && step < one) {
        let p = path.advance();
        step = path.step();
        let t = step as f64 * dt;
        let changed = state.advance(p, t);
        if record_at_one {
            if step == one / 2 {
                mid = p;
            }
            if step == one {
                at_one = Some(PathSummary::new(&state, mid));
            }
        }
        if open == 0 {
            continue;
        }
        let mut view = HullView {
            vertices: state.hull().vertices(),
            poly: state.hull(),
            perimeter: None,
            area: None,
            diameter: None,
        };
        let (rx, ry) = (state.range_x(), state.range_y());
        for tr in trackers.iter_mut().filter(|tr| tr.result.is_none()) {
            let level = tr.target.level;
            let hit = match tr.target.kind {
                FunctionalKind::RangeX => rx > level,
                FunctionalKind::RangeY => ry > level,
                FunctionalKind::RangeMin => rx.max(ry) > level,
                _ if !changed => false,
                FunctionalKind::Perimeter => view.perimeter() > level,
                FunctionalKind::Area => view.area() > level,
                FunctionalKind::Diameter => view.diameter() > level,
                FunctionalKind::Circumradius => {
                    let d = view.diameter();
                    if d / 3f64.sqrt() <= level {
                        false
                    } else if 0.5 * d > level {
                        true
                    } else {
                        geom::min_enclosing_circle(view.vertices).map_or(0.0, |c| c.radius) > level
                    }
                }
                FunctionalKind::Inradius => {
                    let (per, area) = (view.perimeter(), view.area());
                    if let Some(t_hit) =
                        tr.inradius
                            .on_hull_change(t, view.vertices, per, area, level)
                    {
                        tr.result = Some(Passage::Hit(t_hit));
                        open -= 1;
                    }
                    false
                }
            };
            if hit {
                tr.result = Some(Passage::Hit(t));
                open -= 1;
            } else if tr.result.is_none() && step >= tr.last_step {
                tr.result = Some(match tr.inradius.finish(level) {
                    Some(t_hit) => Passage::Hit(t_hit),
                    None => Passage::Censored(tr.last_step as f64 * dt),
                });
                open -= 1;
            }
        }
    }
    JointSample {
        at_one,
        passages: trackers.into_iter().map(|t| t.result.unwrap()).collect(),
    }
}

/// First passages of several targets along one path.
pub fn first_passages(cfg: &PathConfig, path_index: u64, targets: &[Target]) -> Vec<Passage> {
    joint_sample(cfg, path_index, targets, false).passages
}

/// First sampled time at which `kind` exceeds `level`, censored at
/// `cfg.horizon`.
pub fn hitting_time(
    cfg: &PathConfig,
    path_index: u64,
    kind: FunctionalKind,
    level: f64,
) -> Passage {
    first_passages(
        cfg,
        path_index,
        &[Target {
            kind,
            level,
            horizon: cfg.horizon,
        }],
    )[0]
}

/// First time either coordinate range exceeds `level`.
pub fn min_inverse_range_sample(cfg: &PathConfig, path_index: u64, level: f64) -> Passage {
    hitting_time(cfg, path_index, FunctionalKind::RangeMin, level)
}
