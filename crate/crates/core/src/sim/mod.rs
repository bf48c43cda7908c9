//! Monte Carlo engine for planar Brownian paths and their convex hulls.
//!
//! Paths are sampled on the grid `kΔt` with `Δt = 1/n_steps`. Each path owns
//! a ChaCha8 stream selected by its index, so results do not depend on how
//! paths are distributed over worker threads.

mod hull;
mod passage;
mod slit;

pub use hull::{audit, HullFunctionals, IncrementalHull, PathState, PathSummary};
pub use passage::{
    first_passages, hitting_time, joint_sample, min_inverse_range_sample, JointSample, Target,
};
pub use slit::{slit_exit_sample, SlitPlane};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point2;

/// Steps per unit time above which the documented accuracy holds.
pub const MIN_PRODUCTION_STEPS: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathConfig {
    /// Steps per unit time.
    pub n_steps: u64,
    /// Largest simulated time.
    pub horizon: f64,
    pub master_seed: u64,
    pub n_paths: u64,
}

impl PathConfig {
    pub fn new(n_steps: u64, horizon: f64, master_seed: u64, n_paths: u64) -> Result<Self> {
        let cfg = Self {
            n_steps,
            horizon,
            master_seed,
            n_paths,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_steps == 0 {
            return Err(Error::Config("n_steps must be at least 1".into()));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::Config(format!(
                "horizon must be positive, got {}",
                self.horizon
            )));
        }
        if self.n_paths == 0 {
            return Err(Error::Config("n_paths must be at least 1".into()));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.n_steps as f64
    }

    /// Number of grid steps needed to reach time `t`.
    pub fn steps_to(&self, t: f64) -> u64 {
        (t * self.n_steps as f64).round() as u64
    }

    pub fn with_horizon(self, horizon: f64) -> Self {
        Self { horizon, ..self }
    }
}

/// Random stream of path `path_index`.
pub fn path_rng(master_seed: u64, path_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(path_index);
    rng
}

/// Brownian path started at the origin, advanced one grid step at a time.
pub struct BrownianPath {
    rng: ChaCha8Rng,
    sd: f64,
    dt: f64,
    position: Point2,
    step: u64,
}

impl BrownianPath {
    pub fn new(cfg: &PathConfig, path_index: u64) -> Self {
        Self {
            rng: path_rng(cfg.master_seed, path_index),
            sd: cfg.dt().sqrt(),
            dt: cfg.dt(),
            position: Point2::ORIGIN,
            step: 0,
        }
    }

    pub fn position(&self) -> Point2 {
        self.position
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.dt
    }

    /// Moves to the next grid point and returns it.
    #[inline]
    pub fn advance(&mut self) -> Point2 {
        let dx: f64 = StandardNormal.sample(&mut self.rng);
        let dy: f64 = StandardNormal.sample(&mut self.rng);
        self.position = Point2::new(
            self.position.x + self.sd * dx,
            self.position.y + self.sd * dy,
        );
        self.step += 1;
        self.position
    }
}

/// Grid points `W(kΔt)` for `k = 0..=round(horizon·n_steps)`.
pub fn generate_path(cfg: &PathConfig, path_index: u64) -> Vec<Point2> {
    let n = cfg.steps_to(cfg.horizon);
    let mut path = BrownianPath::new(cfg, path_index);
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(Point2::ORIGIN);
    for _ in 0..n {
        out.push(path.advance());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionalKind {
    Perimeter,
    Area,
    Diameter,
    Circumradius,
    Inradius,
    /// Larger of the two coordinate ranges; its inverse is the minimum of the
    /// two inverse range times.
    RangeMin,
    RangeX,
    RangeY,
}

impl FunctionalKind {
    pub const ALL: [FunctionalKind; 8] = [
        FunctionalKind::Perimeter,
        FunctionalKind::Area,
        FunctionalKind::Diameter,
        FunctionalKind::Circumradius,
        FunctionalKind::Inradius,
        FunctionalKind::RangeMin,
        FunctionalKind::RangeX,
        FunctionalKind::RangeY,
    ];

    pub fn is_hull(self) -> bool {
        !matches!(
            self,
            FunctionalKind::RangeMin | FunctionalKind::RangeX | FunctionalKind::RangeY
        )
    }

    /// Exponent `e` with `Θ^X(y) =ᵈ y^e Θ^X(1)`.
    pub fn time_scaling_exponent(self) -> f64 {
        match self {
            FunctionalKind::Area => 1.0,
            _ => 2.0,
        }
    }
}

/// First-passage result: the hitting time, or the horizon if the level was not
/// reached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Passage {
    Hit(f64),
    Censored(f64),
}

impl Passage {
    pub fn time(self) -> f64 {
        match self {
            Passage::Hit(t) | Passage::Censored(t) => t,
        }
    }

    pub fn is_censored(self) -> bool {
        matches!(self, Passage::Censored(_))
    }

    /// Multiplies the time by `factor`, keeping the censoring flag.
    pub fn scaled(self, factor: f64) -> Passage {
        match self {
            Passage::Hit(t) => Passage::Hit(t * factor),
            Passage::Censored(t) => Passage::Censored(t * factor),
        }
    }
}

/// One observation fed to [`summarize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub value: f64,
    pub censored: bool,
}

impl From<f64> for Sample {
    fn from(value: f64) -> Self {
        Sample {
            value,
            censored: false,
        }
    }
}

impl From<Passage> for Sample {
    fn from(p: Passage) -> Self {
        Sample {
            value: p.time(),
            censored: p.is_censored(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateCI {
    pub mean: f64,
    pub std_error: f64,
    pub n: u64,
    /// Share of samples truncated at the horizon; these enter the mean at the
    /// horizon value.
    pub censored_fraction: f64,
}

/// Neumaier's compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Mean and standard error of samples taken in the given order.
pub fn summarize<I>(samples: I) -> Result<EstimateCI>
where
    I: IntoIterator<Item = Sample>,
{
    let samples: Vec<Sample> = samples.into_iter().collect();
    let n = samples.len();
    if n < 2 {
        return Err(Error::Domain(format!(
            "an estimate needs at least two samples, got {n}"
        )));
    }
    let censored = samples.iter().filter(|s| s.censored).count();
    if censored == n {
        return Err(Error::AllCensored(n));
    }
    let mut sum = CompensatedSum::default();
    for s in &samples {
        sum.add(s.value);
    }
    let mean = sum.value() / n as f64;
    let mut ss = CompensatedSum::default();
    for s in &samples {
        let d = s.value - mean;
        ss.add(d * d);
    }
    let var = ss.value() / (n - 1) as f64;
    Ok(EstimateCI {
        mean,
        std_error: (var / n as f64).sqrt(),
        n: n as u64,
        censored_fraction: censored as f64 / n as f64,
    })
}

/// Runs `sampler` on every path index in parallel and returns the results in
/// index order.
pub fn run_paths<T, S>(n_paths: u64, sampler: S) -> Vec<T>
where
    T: Send,
    S: Fn(u64) -> T + Sync,
{
    (0..n_paths).into_par_iter().map(&sampler).collect()
}

/// Simulates `cfg.n_paths` paths and estimates the mean of `transform`.
pub fn estimate<T, S, X, O>(cfg: &PathConfig, sampler: S, transform: X) -> Result<EstimateCI>
where
    T: Send,
    S: Fn(u64) -> T + Sync,
    X: Fn(&T) -> O,
    O: Into<Sample>,
{
    cfg.validate()?;
    let raw = run_paths(cfg.n_paths, sampler);
    summarize(raw.iter().map(|t| transform(t).into()))
}

/// Hull functionals of the path on `[0, 1]`.
pub fn hull_functionals_at_one(cfg: &PathConfig, path_index: u64) -> HullFunctionals {
    path_summary_at_one(cfg, path_index).functionals
}

/// Hull functionals, coordinate ranges and chord-triangle inradius of the path
/// on `[0, 1]`.
pub fn path_summary_at_one(cfg: &PathConfig, path_index: u64) -> PathSummary {
    let mut path = BrownianPath::new(cfg, path_index);
    let mut state = PathState::new();
    let n = cfg.n_steps;
    let mut mid = Point2::ORIGIN;
    for k in 1..=n {
        let p = path.advance();
        state.advance(p, path.time());
        if k == n / 2 {
            mid = p;
        }
    }
    PathSummary::new(&state, mid)
}

/// Inradius of the triangle `W(0)`, `W(1/2)`, `W(1)`; zero when degenerate.
/// With an odd step count the middle vertex is taken at step `⌊n/2⌋`.
pub fn triangle_chord_sample(cfg: &PathConfig, path_index: u64) -> f64 {
    path_summary_at_one(cfg, path_index).chord_inradius
}

/// Inradius of the triangle `(a, b, c)`: twice the area over the perimeter.
pub fn triangle_inradius(a: Point2, b: Point2, c: Point2) -> f64 {
    let per = a.dist(b) + b.dist(c) + c.dist(a);
    let twice_area = (b - a).cross(c - a).abs();
    if per <= 0.0 || twice_area <= crate::geom::CROSS_EPS * per * per {
        return 0.0;
    }
    twice_area / per
}
