//! Globally adaptive Gauss–Kronrod (7/15) quadrature and the two hard
//! integral constants used by the bounds table.

use std::cell::Cell;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
    /// Set when the subdivision budget ran out before the tolerance was met.
    pub limit_reached: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadOptions {
    pub fn absolute(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: 0.0,
            max_subdivisions: 2000,
        }
    }
}

// Kronrod abscissae on [0, 1]; odd indices are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Segment {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&o.error)
    }
}

/// One 15-point Kronrod panel with the QUADPACK error heuristic.
fn gk15<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let (f1, f2) = (f(center - dx), f(center + dx));
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (value, err)
}

fn adaptive_finite<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    opts: QuadOptions,
) -> QuadResult {
    let (v0, e0) = gk15(f, a, b);
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        a,
        b,
        value: v0,
        error: e0,
    });
    let (mut total, mut total_err) = (v0, e0);
    let mut limit_reached = false;
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * total.abs());
        if total_err <= target {
            break;
        }
        if heap.len() >= opts.max_subdivisions {
            limit_reached = true;
            break;
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            // Interval cannot be split further in double precision.
            heap.push(worst);
            limit_reached = true;
            break;
        }
        let (v1, e1) = gk15(f, worst.a, mid);
        let (v2, e2) = gk15(f, mid, worst.b);
        evaluations += 30;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    // Re-sum to shed drift from the incremental updates.
    let mut value = 0.0;
    let mut err = 0.0;
    for s in heap.iter() {
        value += s.value;
        err += s.error;
    }
    QuadResult {
        value,
        abs_error_estimate: err,
        evaluations,
        limit_reached,
    }
}

/// Integrates `f` over `(a, b)` where either end may be infinite.
/// Infinite ranges are mapped by `t = a + u/(1 − u)`. The integrand is never
/// evaluated at the endpoints.
pub fn adaptive_quad_with<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    opts: QuadOptions,
) -> Result<QuadResult> {
    quad_dyn(&f, a, b, opts)
}

fn quad_dyn(f: &dyn Fn(f64) -> f64, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult> {
    if a.is_nan() || b.is_nan() {
        return domain("integration limit is NaN");
    }
    if !(opts.abs_tol > 0.0 || opts.rel_tol > 0.0) {
        return domain("quadrature tolerance must be positive");
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            evaluations: 0,
            limit_reached: false,
        });
    }
    if a > b {
        let r = quad_dyn(f, b, a, opts)?;
        return Ok(QuadResult {
            value: -r.value,
            ..r
        });
    }
    match (a.is_finite(), b.is_finite()) {
        (true, true) => Ok(adaptive_finite(f, a, b, opts)),
        (true, false) => {
            let g = |u: f64| {
                let s = 1.0 - u;
                f(a + u / s) / (s * s)
            };
            Ok(adaptive_finite(&g, 0.0, 1.0, opts))
        }
        (false, true) => {
            let g = |u: f64| {
                let s = 1.0 - u;
                f(b - u / s) / (s * s)
            };
            Ok(adaptive_finite(&g, 0.0, 1.0, opts))
        }
        (false, false) => {
            let half = QuadOptions {
                abs_tol: 0.5 * opts.abs_tol,
                ..opts
            };
            let l = quad_dyn(f, f64::NEG_INFINITY, 0.0, half)?;
            let r = quad_dyn(f, 0.0, f64::INFINITY, half)?;
            Ok(QuadResult {
                value: l.value + r.value,
                abs_error_estimate: l.abs_error_estimate + r.abs_error_estimate,
                evaluations: l.evaluations + r.evaluations,
                limit_reached: l.limit_reached || r.limit_reached,
            })
        }
    }
}

/// [`adaptive_quad_with`] using an absolute tolerance.
pub fn adaptive_quad<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    if !(tol > 0.0) {
        return domain("quadrature tolerance must be positive");
    }
    adaptive_quad_with(f, a, b, QuadOptions::absolute(tol))
}

/// Below this argument the min-range integrand switches to its power series.
pub const MIN_RANGE_SERIES_CUTOFF: f64 = 0.05;

/// `(1 − 4/(cos t + cosh t)²)/t³` evaluated as written.
pub fn min_range_integrand_naive(t: f64) -> f64 {
    let c = t.cos() + t.cosh();
    (1.0 - 4.0 / (c * c)) / (t * t * t)
}

/// The min-range integrand without cancellation near zero.
///
/// With `e = (cos t + cosh t)/2 − 1 = Σ_{k≥1} t^{4k}/(4k)!`, the integrand is
/// `e(2 + e) / ((1 + e)² t³)`; below the cutoff `e/t³` comes from the series.
pub fn min_range_integrand(t: f64) -> f64 {
    if t >= MIN_RANGE_SERIES_CUTOFF {
        return min_range_integrand_naive(t);
    }
    let t4 = t * t * t * t;
    // 1/4!, 1/8!, 1/12!, 1/16!
    let e_over_t3 = t
        * (1.0 / 24.0
            + t4 * (1.0 / 40_320.0 + t4 * (1.0 / 479_001_600.0 + t4 / 20_922_789_888_000.0)));
    let e = e_over_t3 * t * t * t;
    e_over_t3 * (2.0 + e) / ((1.0 + e) * (1.0 + e))
}

/// Expected minimum of two independent inverse range times at level one:
/// `1/2 − (2/π) ∫₀^∞ (1 − 4/(cos t + cosh t)²) t⁻³ dt`.
pub fn min_range_constant() -> QuadResult {
    min_range_constant_with(MIN_RANGE_TOL)
}

/// Default absolute tolerance for [`min_range_constant`].
pub const MIN_RANGE_TOL: f64 = 1e-13;

/// [`min_range_constant`] with absolute tolerance `tol` on each piece.
pub fn min_range_constant_with(tol: f64) -> QuadResult {
    let opts = QuadOptions {
        abs_tol: tol,
        rel_tol: tol,
        max_subdivisions: 4000,
    };
    let head = adaptive_quad_with(min_range_integrand, 0.0, 8.0, opts).expect("finite limits");
    let tail =
        adaptive_quad_with(min_range_integrand, 8.0, f64::INFINITY, opts).expect("finite limits");
    let scale = 2.0 / PI;
    QuadResult {
        value: 0.5 - scale * (head.value + tail.value),
        abs_error_estimate: scale * (head.abs_error_estimate + tail.abs_error_estimate),
        evaluations: head.evaluations + tail.evaluations,
        limit_reached: head.limit_reached || tail.limit_reached,
    }
}

/// Below this `u` the ratio `(1 − e^{−u(θ+π/2)})/(1 − e^{−uπ})` is replaced
/// by its expansion around zero.
pub const PERIMETER_SMALL_U: f64 = 1e-4;

/// `cosh(uθ)/sinh(uπ/2) · tanh((2θ+π)u/4)` as written; overflows for large `u`.
pub fn perimeter_moment_integrand_naive(theta: f64, u: f64) -> f64 {
    (u * theta).cosh() / (u * FRAC_PI_2).sinh() * ((2.0 * theta + PI) * u / 4.0).tanh()
}

/// The same kernel, rewritten to stay finite for every `u > 0`:
/// `(e^{u(θ−π/2)} + e^{−u(θ+π/2)}) / (1 + e^{−u(θ+π/2)})` times
/// `(1 − e^{−u(θ+π/2)}) / (1 − e^{−uπ})`.
pub fn perimeter_moment_integrand(theta: f64, u: f64) -> f64 {
    let alpha = theta + FRAC_PI_2;
    let decay = (-u * alpha).exp();
    let first = ((u * (theta - FRAC_PI_2)).exp() + decay) / (1.0 + decay);
    first * perimeter_ratio(theta, u)
}

/// `(1 − e^{−u(θ+π/2)}) / (1 − e^{−uπ})`, tending to `1/2 + θ/π` as `u → 0`.
pub fn perimeter_ratio(theta: f64, u: f64) -> f64 {
    let alpha = theta + FRAC_PI_2;
    if u < PERIMETER_SMALL_U {
        // limit plus first-order term
        (alpha / PI) * (1.0 + 0.5 * (PI - alpha) * u)
    } else {
        (-u * alpha).exp_m1() / (-u * PI).exp_m1()
    }
}

/// Second moment of the hull perimeter at time one, as the iterated integral
/// `4π ∫_{−π/2}^{π/2} cos θ ∫₀^∞ K(θ, u) du dθ`.
pub fn perimeter_second_moment() -> QuadResult {
    perimeter_second_moment_with(PERIMETER_MOMENT_TOL)
}

/// Default absolute tolerance of the outer integral in
/// [`perimeter_second_moment`]; the inner integrals use a tenth of it.
pub const PERIMETER_MOMENT_TOL: f64 = 1e-8;

/// [`perimeter_second_moment`] with outer absolute tolerance `tol`.
pub fn perimeter_second_moment_with(tol: f64) -> QuadResult {
    let inner_opts = QuadOptions {
        abs_tol: 0.1 * tol,
        rel_tol: 1e-11,
        max_subdivisions: 2000,
    };
    let outer_opts = QuadOptions {
        abs_tol: tol,
        rel_tol: 1e-12,
        max_subdivisions: 2000,
    };
    let inner_err = Cell::new(0.0f64);
    let inner_evals = Cell::new(0usize);
    let inner_limit = Cell::new(false);
    let outer = |theta: f64| {
        let r = adaptive_quad_with(
            |u| perimeter_moment_integrand(theta, u),
            0.0,
            f64::INFINITY,
            inner_opts,
        )
        .expect("finite limits");
        let c = theta.cos();
        inner_err.set(inner_err.get().max(c * r.abs_error_estimate));
        inner_evals.set(inner_evals.get() + r.evaluations);
        inner_limit.set(inner_limit.get() || r.limit_reached);
        c * r.value
    };
    let r = adaptive_quad_with(outer, -FRAC_PI_2, FRAC_PI_2, outer_opts).expect("finite limits");
    let scale = 4.0 * PI;
    QuadResult {
        value: scale * r.value,
        abs_error_estimate: scale * (r.abs_error_estimate + PI * inner_err.get()),
        evaluations: r.evaluations + inner_evals.get(),
        limit_reached: r.limit_reached || inner_limit.get(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = adaptive_quad(|x| x * x, 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-14);
        assert!(!r.limit_reached);
    }

    #[test]
    fn exponential_tail() {
        let r = adaptive_quad(|t| (-t).exp(), 0.0, f64::INFINITY, 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let r = adaptive_quad(|x| x, 1.0, 0.0, 1e-12).unwrap();
        assert!((r.value + 0.5).abs() < 1e-14);
    }

    #[test]
    fn negative_infinite_limit() {
        let r = adaptive_quad(|t| t.exp(), f64::NEG_INFINITY, 0.0, 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10);
        let g = adaptive_quad(|t| (-t * t).exp(), f64::NEG_INFINITY, f64::INFINITY, 1e-12).unwrap();
        assert!((g.value - PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn bad_tolerance_is_rejected() {
        assert!(adaptive_quad(|x| x, 0.0, 1.0, 0.0).is_err());
        assert!(adaptive_quad(|x| x, f64::NAN, 1.0, 1e-6).is_err());
    }

    #[test]
    fn subdivision_limit_is_flagged() {
        let opts = QuadOptions {
            abs_tol: 1e-15,
            rel_tol: 0.0,
            max_subdivisions: 3,
        };
        let r = adaptive_quad_with(|x: f64| (1.0 / x).sin(), 1e-3, 1.0, opts).unwrap();
        assert!(r.limit_reached);
    }

    #[test]
    fn series_branch_matches_naive_at_point_two() {
        // evaluate the series branch directly above its cutoff
        let t: f64 = 0.2;
        let t4 = t.powi(4);
        let e_over_t3 = t
            * (1.0 / 24.0
                + t4 * (1.0 / 40_320.0 + t4 * (1.0 / 479_001_600.0 + t4 / 20_922_789_888_000.0)));
        let e = e_over_t3 * t.powi(3);
        let series = e_over_t3 * (2.0 + e) / ((1.0 + e) * (1.0 + e));
        assert!((series - min_range_integrand_naive(t)).abs() < 1e-10);
    }

    #[test]
    fn small_t_integrand_is_linear() {
        let t = 1e-3;
        assert!((min_range_integrand(t) / t - 1.0 / 12.0).abs() < 1e-10);
        assert!(min_range_integrand(1e-300).is_finite());
    }

    #[test]
    fn min_range_constant_value() {
        let r = min_range_constant();
        assert!((r.value - 0.346554).abs() < 1e-6, "{r:?}");
        let bare = (0.5 - r.value) * FRAC_PI_2;
        assert!((bare - 0.241032).abs() < 1e-6);
        assert!(r.abs_error_estimate <= 1e-8);
    }

    #[test]
    fn ratio_limit_at_zero() {
        assert!((perimeter_ratio(0.0, 0.0) - 0.5).abs() < 1e-15);
        assert!((perimeter_ratio(0.4, 1e-9) - (0.5 + 0.4 / PI)).abs() < 1e-9);
        // both sides of the crossover agree
        let below = perimeter_ratio(0.3, PERIMETER_SMALL_U * (1.0 - 1e-9));
        let above = perimeter_ratio(0.3, PERIMETER_SMALL_U);
        assert!((below - above).abs() < 1e-9);
    }

    #[test]
    fn rewritten_kernel_matches_naive() {
        let (th, u) = (0.3, 1.0);
        let d = perimeter_moment_integrand(th, u) - perimeter_moment_integrand_naive(th, u);
        assert!(d.abs() < 1e-10);
        assert!(perimeter_moment_integrand(0.3, 2000.0).is_finite());
    }

    #[test]
    fn perimeter_moment_value() {
        let r = perimeter_second_moment();
        assert!((r.value - 26.209056).abs() < 1e-4, "{r:?}");
        assert!(8.0 * PI < r.value);
    }
}
