use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::geom::Point2;

use super::{BrownianPath, Passage, PathConfig};

/// The plane minus `n` rays `{ρ u_k : ρ ≥ radius}` with `u_k` at angles
/// `2πk/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlitPlane {
    directions: Vec<Point2>,
    radius: f64,
}

impl SlitPlane {
    pub fn new(n_slits: u32, radius: f64) -> Result<Self> {
        if n_slits < 1 {
            return domain("the slit plane needs at least one slit");
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return domain(format!("slit radius must be positive, got {radius}"));
        }
        let directions = (0..n_slits)
            .map(|k| {
                let (s, c) = (2.0 * PI * k as f64 / n_slits as f64).sin_cos();
                Point2::new(c, s)
            })
            .collect();
        Ok(Self { directions, radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// True if the closed segment `ab` meets one of the slits.
    pub fn crosses(&self, a: Point2, b: Point2) -> bool {
        let r2 = self.radius * self.radius;
        if a.norm_sq() < r2 && b.norm_sq() < r2 {
            return false;
        }
        let ab = b - a;
        self.directions.iter().any(|&u| {
            let ca = u.cross(a);
            let cb = u.cross(b);
            if ca * cb > 0.0 {
                return false;
            }
            let denom = ca - cb;
            let q = if denom == 0.0 {
                // Segment lies on the slit line: its far end decides.
                return a.dot(u).max(b.dot(u)) >= self.radius;
            } else {
                a + ab * (ca / denom)
            };
            q.dot(u) >= self.radius
        })
    }
}

/// First grid time at which the segment between consecutive samples meets a
/// slit, censored at `cfg.horizon`.
pub fn slit_exit_sample(
    cfg: &PathConfig,
    path_index: u64,
    n_slits: u32,
    radius: f64,
) -> Result<Passage> {
    let plane = SlitPlane::new(n_slits, radius)?;
    let mut path = BrownianPath::new(cfg, path_index);
    let last = cfg.steps_to(cfg.horizon);
    let mut prev = path.position();
    for _ in 0..last {
        let p = path.advance();
        if plane.crosses(prev, p) {
            return Ok(Passage::Hit(path.time()));
        }
        prev = p;
    }
    Ok(Passage::Censored(last as f64 * cfg.dt()))
}
