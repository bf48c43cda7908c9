use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::{self, LANCZOS_COEFFS};
use crate::geom::{self, Point2};
use crate::linprog::{self, LinearProgram, LpStatus};
use crate::optim;
use crate::quad;
use crate::sim::{self, PathConfig};

use super::report::{to_csv, to_json, Format};

/// Deliberate corruption used to prove the suite can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Perturbs one Lanczos coefficient in the fifth significant digit.
    Gamma,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub checks: Vec<Check>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn render(&self, format: Format) -> crate::Result<String> {
        match format {
            Format::Json => to_json(self),
            Format::Csv => {
                let mut lines = vec![vec!["check".to_string(), "passed".into(), "detail".into()]];
                for c in &self.checks {
                    lines.push(vec![c.name.clone(), c.passed.to_string(), c.detail.clone()]);
                }
                to_csv(&lines)
            }
            Format::Text => {
                let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
                let mut out = String::new();
                for c in &self.checks {
                    let tag = if c.passed { "PASS" } else { "FAIL" };
                    out.push_str(&format!("{tag}  {:<width$}  {}\n", c.name, c.detail));
                }
                out.push_str(&format!(
                    "{} checks, {} failed\n",
                    self.checks.len(),
                    self.failures().count()
                ));
                Ok(out)
            }
        }
    }
}

type Outcome = Result<String, String>;

fn close(name: &str, got: f64, want: f64, tol: f64) -> Outcome {
    if (got - want).abs() <= tol {
        Ok(format!("{name} = {got:.12} (want {want:.12})"))
    } else {
        Err(format!("{name} = {got:.12}, want {want:.12} +/- {tol:e}"))
    }
}

fn all(parts: Vec<Outcome>) -> Outcome {
    let mut ok = Vec::new();
    for p in parts {
        ok.push(p?);
    }
    Ok(ok.join("; "))
}

fn gamma_identities(coeffs: &[f64; 9]) -> Outcome {
    let g = |x: f64| analytic::gamma_with(x, coeffs).map_err(|e| e.to_string());
    let mut parts = vec![
        close("Gamma(1)", g(1.0)?, 1.0, 1e-13),
        close("Gamma(1/2)", g(0.5)?, PI.sqrt(), 1e-13),
        close("Gamma(5)", g(5.0)?, 24.0, 1e-11),
    ];
    for &x in &[0.3, 1.7, 3.25, 7.5] {
        let lhs = g(x + 1.0)?;
        let rhs = x * g(x)?;
        parts.push(close("Gamma(x+1)/(x Gamma(x))", lhs / rhs, 1.0, 1e-13));
    }
    all(parts)
}

fn gamma_duplication(coeffs: &[f64; 9]) -> Outcome {
    let g = |x: f64| analytic::gamma_with(x, coeffs).map_err(|e| e.to_string());
    let mut parts = Vec::new();
    for &x in &[0.25, 1.0 / 6.0, 0.9, 2.3, 4.1] {
        let lhs = g(x)? * g(x + 0.5)?;
        let rhs = 2f64.powf(1.0 - 2.0 * x) * PI.sqrt() * g(2.0 * x)?;
        parts.push(close("duplication ratio", lhs / rhs, 1.0, 1e-12));
    }
    all(parts)
}

fn slit_mean(coeffs: &[f64; 9]) -> Outcome {
    let g = |x: f64| analytic::gamma_with(x, coeffs).map_err(|e| e.to_string());
    let via_coeffs = g(1.0 / 6.0)? / (2.0 * PI.sqrt() * g(2.0 / 3.0)?);
    let lib = analytic::slit_exit_mean(6).map_err(|e| e.to_string())?;
    all(vec![
        close("six-slit mean", via_coeffs, 1.159_595_267, 1e-8),
        close("library six-slit mean", lib, via_coeffs, 1e-12),
    ])
}

fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<Point2> {
    (0..n)
        .map(|_| Point2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

/// Smallest circle among all pair and triple circles that contain every
/// point.
fn brute_force_mec(pts: &[Point2]) -> f64 {
    let covers = |c: Point2, r: f64| pts.iter().all(|p| p.dist(c) <= r * (1.0 + 1e-12) + 1e-12);
    let mut best = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let c = (pts[i] + pts[j]) * 0.5;
            let r = 0.5 * pts[i].dist(pts[j]);
            if r < best && covers(c, r) {
                best = r;
            }
            for k in j + 1..pts.len() {
                let (a, b, cc) = (pts[i], pts[j], pts[k]);
                let (bp, cp) = (b - a, cc - a);
                let d = 2.0 * bp.cross(cp);
                if d.abs() < 1e-12 {
                    continue;
                }
                let (b2, c2) = (bp.norm_sq(), cp.norm_sq());
                let u = Point2::new((cp.y * b2 - bp.y * c2) / d, (bp.x * c2 - cp.x * b2) / d);
                let r = u.norm();
                if r < best && covers(a + u, r) {
                    best = r;
                }
            }
        }
    }
    best
}

fn welzl_vs_brute_force() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let pts = random_points(&mut rng, 25);
        let w = geom::min_enclosing_circle(&pts).map_err(|e| e.to_string())?;
        worst = worst.max((w.radius - brute_force_mec(&pts)).abs());
    }
    if worst <= 1e-9 {
        Ok(format!("100 sets of 25 points, max radius gap {worst:.2e}"))
    } else {
        Err(format!("radius gap {worst:.2e} exceeds 1e-9"))
    }
}

/// Random bounded LP in two variables: a box plus random cuts through a
/// neighbourhood of the origin, so the origin stays feasible.
fn random_lp(rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<(Vec<f64>, f64)>) {
    let mut rows = vec![
        (vec![1.0, 0.0], 3.0),
        (vec![-1.0, 0.0], 3.0),
        (vec![0.0, 1.0], 3.0),
        (vec![0.0, -1.0], 3.0),
    ];
    for _ in 0..rng.random_range(2..8) {
        let a = vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        rows.push((a, rng.random_range(0.2..2.0)));
    }
    let c = vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
    (c, rows)
}

fn vertex_enumeration(c: &[f64], rows: &[(Vec<f64>, f64)]) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let (a, b) = (&rows[i], &rows[j]);
            let det = a.0[0] * b.0[1] - a.0[1] * b.0[0];
            if det.abs() < 1e-12 {
                continue;
            }
            let x = (a.1 * b.0[1] - a.0[1] * b.1) / det;
            let y = (a.0[0] * b.1 - a.1 * b.0[0]) / det;
            let feasible = rows.iter().all(|(g, h)| g[0] * x + g[1] * y <= h + 1e-9);
            if feasible {
                best = best.max(c[0] * x + c[1] * y);
            }
        }
    }
    best
}

fn lp_vs_vertex_enumeration() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let (c, rows) = random_lp(&mut rng);
        let want = vertex_enumeration(&c, &rows);
        let lp = LinearProgram::new(c, rows).map_err(|e| e.to_string())?;
        let sol = linprog::solve(&lp);
        if sol.status != LpStatus::Optimal {
            return Err(format!("solver reported {:?} on a bounded LP", sol.status));
        }
        worst = worst.max((sol.objective_value - want).abs());
    }
    if worst <= 1e-9 {
        Ok(format!("200 random LPs, max objective gap {worst:.2e}"))
    } else {
        Err(format!("objective gap {worst:.2e} exceeds 1e-9"))
    }
}

fn lp_permutation_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (c, mut rows) = random_lp(&mut rng);
        let a = linprog::solve(&LinearProgram::new(c.clone(), rows.clone()).unwrap());
        rows.reverse();
        rows.rotate_left(2);
        let b = linprog::solve(&LinearProgram::new(c, rows).unwrap());
        worst = worst.max((a.objective_value - b.objective_value).abs());
    }
    if worst <= 1e-9 {
        Ok(format!("100 reordered LPs, max objective gap {worst:.2e}"))
    } else {
        Err(format!(
            "objective changed by {worst:.2e} under row reordering"
        ))
    }
}

fn calipers_vs_all_pairs() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for trial in 0..200 {
        let pts = random_points(&mut rng, 40);
        let hull = geom::convex_hull(&pts).map_err(|e| e.to_string())?;
        let mut brute = 0.0f64;
        for p in &pts {
            for q in &pts {
                brute = brute.max(p.dist(*q));
            }
        }
        if hull.diameter() != brute {
            return Err(format!(
                "set {trial}: calipers {} vs all pairs {brute}",
                hull.diameter()
            ));
        }
    }
    Ok("200 sets of 40 points, exact agreement".into())
}

fn range_density_moments() -> Outcome {
    let mass = quad::adaptive_quad(analytic::range_density, 0.0, f64::INFINITY, 1e-12)
        .map_err(|e| e.to_string())?;
    let mean = quad::adaptive_quad(
        |x| x * analytic::range_density(x),
        0.0,
        f64::INFINITY,
        1e-12,
    )
    .map_err(|e| e.to_string())?;
    all(vec![
        close("range mass", mass.value, 1.0, 1e-9),
        close("range mean", mean.value, (8.0 / PI).sqrt(), 1e-9),
    ])
}

fn theta_density_moments() -> Outcome {
    let mass = quad::adaptive_quad(analytic::theta_density, 0.0, f64::INFINITY, 1e-12)
        .map_err(|e| e.to_string())?;
    let mean = quad::adaptive_quad(
        |t| t * analytic::theta_density(t),
        0.0,
        f64::INFINITY,
        1e-12,
    )
    .map_err(|e| e.to_string())?;
    all(vec![
        close("inverse range mass", mass.value, 1.0, 1e-9),
        close("inverse range mean", mean.value, 0.5, 1e-9),
    ])
}

fn laplace_consistency() -> Outcome {
    let mut parts = Vec::new();
    for &lambda in &[0.5, 2.0, 7.0] {
        let num = quad::adaptive_quad(
            |t| (-lambda * t).exp() * analytic::theta_density(t),
            0.0,
            f64::INFINITY,
            1e-12,
        )
        .map_err(|e| e.to_string())?;
        let exact = analytic::theta_laplace(lambda, 1.0).map_err(|e| e.to_string())?;
        parts.push(close("Laplace transform", num.value, exact, 1e-9));
    }
    all(parts)
}

fn min_range_constant() -> Outcome {
    let c = analytic::integral_constants().min_range;
    close("C", c.value, 0.346_554, 1e-6)
}

fn perimeter_second_moment() -> Outcome {
    let p2 = analytic::integral_constants().perimeter_second_moment;
    let value = close("E[P^2]", p2.value, 26.209_056, 1e-4)?;
    if 8.0 * PI < p2.value {
        Ok(format!("{value}; 8 pi < E[P^2]"))
    } else {
        Err("Jensen check 8 pi < E[P^2] fails".into())
    }
}

fn bounds_ordering() -> Outcome {
    for row in analytic::bounds_table() {
        if !(row.lower > 0.0 && row.lower < row.upper && row.upper.is_finite()) {
            return Err(format!(
                "{}: lower {} upper {}",
                row.quantity.label(),
                row.lower,
                row.upper
            ));
        }
    }
    Ok("7 rows with 0 < lower < upper".into())
}

fn inradius_optimizer() -> Outcome {
    let b = optim::inradius_upper_bound();
    all(vec![
        close("bound", b.bound, 83.40, 0.05),
        close("a*", b.a_star, 9.79, 0.05),
    ])
}

fn per_path_audit() -> Outcome {
    let cfg = PathConfig::new(1000, 1.0, 505, 1000).map_err(|e| e.to_string())?;
    let summaries = sim::run_paths(cfg.n_paths, |i| sim::path_summary_at_one(&cfg, i));
    let bad: Vec<_> = summaries
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.violations.is_empty())
        .collect();
    match bad.first() {
        None => Ok(format!("{} hulls, no violations", summaries.len())),
        Some((i, s)) => Err(format!(
            "{} of {} hulls fail, first path {i}: {}",
            bad.len(),
            summaries.len(),
            s.violations.join(", ")
        )),
    }
}

fn chord_quadrature() -> Outcome {
    let r = analytic::chord_triangle_inradius_mean().map_err(|e| e.to_string())?;
    let value = close("chord-triangle mean", r.value, 0.145_644_608_348, 1e-9)?;
    if r.value > analytic::constructive_inradius_lower() {
        Ok(value)
    } else {
        Err("chord-triangle mean below its closed-form lower bound".into())
    }
}

type CheckFn<'a> = Box<dyn Fn() -> Outcome + 'a>;

/// Runs every check; `fault` corrupts the inputs of the gamma checks.
pub fn run(fault: Option<Fault>) -> SelftestReport {
    let mut coeffs = LANCZOS_COEFFS;
    if fault == Some(Fault::Gamma) {
        coeffs[1] *= 1.0 + 1e-5;
    }
    let suite: Vec<(&str, CheckFn<'_>)> = vec![
        ("gamma-identities", Box::new(|| gamma_identities(&coeffs))),
        ("gamma-duplication", Box::new(|| gamma_duplication(&coeffs))),
        ("slit-exit-mean", Box::new(|| slit_mean(&coeffs))),
        ("welzl-vs-brute-force", Box::new(welzl_vs_brute_force)),
        (
            "lp-vs-vertex-enumeration",
            Box::new(lp_vs_vertex_enumeration),
        ),
        (
            "lp-permutation-invariance",
            Box::new(lp_permutation_invariance),
        ),
        ("calipers-vs-all-pairs", Box::new(calipers_vs_all_pairs)),
        ("range-density-moments", Box::new(range_density_moments)),
        (
            "inverse-range-density-moments",
            Box::new(theta_density_moments),
        ),
        ("laplace-transform", Box::new(laplace_consistency)),
        ("min-range-constant", Box::new(min_range_constant)),
        ("perimeter-second-moment", Box::new(perimeter_second_moment)),
        ("bounds-ordering", Box::new(bounds_ordering)),
        ("inradius-optimizer", Box::new(inradius_optimizer)),
        ("per-path-audit", Box::new(per_path_audit)),
        ("chord-triangle-quadrature", Box::new(chord_quadrature)),
    ];
    let checks = suite
        .into_iter()
        .map(|(name, f)| {
            let (passed, detail) = match f() {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            Check {
                name: name.into(),
                passed,
                detail,
            }
        })
        .collect();
    SelftestReport { checks }
}
