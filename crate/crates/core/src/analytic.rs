//! Closed-form quantities: exact means, densities and transforms of range and
//! exit times, slit-plane exit means, triangle metrics and the table of bounds
//! on the expected hull functionals and their inverse processes.

use std::f64::consts::{LN_2, PI, SQRT_2};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::optim;
use crate::quad::{self, QuadResult};

/// Mean perimeter of the hull at time `t`: `√(8πt)`.
pub fn exact_mean_perimeter(t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return domain(format!("time must be nonnegative, got {t}"));
    }
    Ok((8.0 * PI * t).sqrt())
}

/// Mean area of the hull at time `t`: `πt/2`.
pub fn exact_mean_area(t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return domain(format!("time must be nonnegative, got {t}"));
    }
    Ok(PI * t / 2.0)
}

const SERIES_TOL: f64 = 1e-14;
const SERIES_CAP: usize = 200;

/// Below this argument the range density is summed in its dual form.
pub const RANGE_DUAL_CUTOFF: f64 = 1.0;

/// `Σ_{n≥1} (−1)^{n−1} n² e^{−n²x²/2}`, stopped once past the peak term and
/// below tolerance.
fn range_direct_sum(x: f64) -> f64 {
    let x2 = x * x;
    let peak = (2.0 / x2).sqrt();
    let mut sum = 0.0;
    for n in 1..=SERIES_CAP {
        let nf = n as f64;
        let term = nf * nf * (-0.5 * nf * nf * x2).exp();
        sum += if n % 2 == 1 { term } else { -term };
        if nf > peak && term < SERIES_TOL {
            break;
        }
    }
    sum
}

/// `Σ_{k≥0} e^{−c_k/(2x²)} (c_k/x⁵ − 1/x³)` with `c_k = π²(2k+1)²`; the Jacobi
/// transform of the direct series, fast for small `x`.
fn range_dual_sum(x: f64) -> f64 {
    let x2 = x * x;
    let x3 = x2 * x;
    let mut sum = 0.0;
    for k in 0..SERIES_CAP {
        let m = (2 * k + 1) as f64;
        let c = PI * PI * m * m;
        let term = (-0.5 * c / x2).exp() * (c / (x3 * x2) - 1.0 / x3);
        sum += term;
        if term.abs() < SERIES_TOL * sum.abs().max(1.0) {
            break;
        }
    }
    sum
}

/// Density of the range of a one-dimensional Brownian motion at time one.
/// Zero for `x ≤ 0`.
pub fn range_density(x: f64) -> f64 {
    if !(x > 0.0) {
        return 0.0;
    }
    if x < RANGE_DUAL_CUTOFF {
        // The density is below e^{-1900} here and the dual terms would overflow.
        if x < 0.05 {
            return 0.0;
        }
        8.0 * range_dual_sum(x)
    } else {
        8.0 / (2.0 * PI).sqrt() * range_direct_sum(x)
    }
}

/// Density of `Θ(1)`, the first time the range of a one-dimensional Brownian
/// motion exceeds one. Zero for `t ≤ 0`.
///
/// Since `Θ(1)` has the law of `R⁻²`, the density equals
/// `½ t^{−3/2} f_R(t^{−1/2})`. The theta series is summed directly for
/// `t ≥ 1` and through the range series below.
pub fn theta_density(t: f64) -> f64 {
    if !(t > 0.0) {
        return 0.0;
    }
    if t >= 1.0 {
        let mut sum = 0.0;
        for k in 0..SERIES_CAP {
            let m = (2 * k + 1) as f64;
            let c = PI * PI * m * m;
            let term = (c * t - 1.0) * (-0.5 * c * t).exp();
            sum += term;
            if term.abs() < SERIES_TOL * sum.abs().max(1e-300) {
                break;
            }
        }
        4.0 * sum
    } else {
        let x = 1.0 / t.sqrt();
        0.5 * x * x * x * range_density(x)
    }
}

/// Laplace transform `E[e^{−λΘ(y)}] = sech²(y√(λ/2))`.
pub fn theta_laplace(lambda: f64, y: f64) -> Result<f64> {
    if !(lambda >= 0.0) {
        return domain(format!(
            "Laplace argument must be nonnegative, got {lambda}"
        ));
    }
    if !(y > 0.0) {
        return domain(format!("level must be positive, got {y}"));
    }
    let a = y * (0.5 * lambda).sqrt();
    let e = (-2.0 * a).exp();
    Ok(4.0 * e / ((1.0 + e) * (1.0 + e)))
}

/// Characteristic function of `Θ^{R₁} − Θ^{R₂}` at `s`:
/// `4/(cos√s + cosh√s)²`. The function is even, so `|s|` is used.
pub fn theta_diff_charfn(s: f64) -> f64 {
    let q = s.abs().sqrt();
    let c = q.cos() + q.cosh();
    4.0 / (c * c)
}

/// Lanczos coefficients for `g = 7`, nine terms.
#[allow(clippy::excessive_precision)]
pub const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];
const LANCZOS_G: f64 = 7.0;

/// Lanczos approximation with an explicit coefficient table. Used directly by
/// the self-test's fault injection.
pub fn gamma_with(x: f64, coeffs: &[f64; 9]) -> Result<f64> {
    if !(x > 0.0) {
        return domain(format!(
            "gamma is only provided for positive arguments, got {x}"
        ));
    }
    if x < 0.5 {
        return Ok(gamma_with(x + 1.0, coeffs)? / x);
    }
    let z = x - 1.0;
    let mut acc = coeffs[0];
    for (i, c) in coeffs.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    Ok((2.0 * PI).sqrt() * ((z + 0.5) * t.ln() - t).exp() * acc)
}

/// Gamma function for `x > 0`.
pub fn gamma_fn(x: f64) -> Result<f64> {
    gamma_with(x, &LANCZOS_COEFFS)
}

/// Mean exit time of planar Brownian motion from the plane with `n` equally
/// spaced radial slits starting at distance one. Infinite for `n ≤ 4`.
pub fn slit_exit_mean(n: u32) -> Result<f64> {
    if n < 1 {
        return domain("the slit plane needs at least one slit");
    }
    if n <= 4 {
        return Ok(f64::INFINITY);
    }
    let q = 2.0 / n as f64;
    Ok(gamma_fn(0.5 - q)? / (2.0 * PI.sqrt() * gamma_fn(1.0 - q)?))
}

/// Second moment of the radial part at the slit-plane exit time, twice the
/// mean exit time.
pub fn radial_exit_second_moment(n: u32) -> Result<f64> {
    Ok(2.0 * slit_exit_mean(n)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TriangleKind {
    A,
    B,
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleMetrics {
    pub kind: TriangleKind,
    pub area: f64,
    pub perimeter: f64,
    pub inradius: f64,
}

/// Area, perimeter and inradius of the triangle of the given kind built from
/// a segment of length `a` and a slit radius `r`.
pub fn triangle_metrics(kind: TriangleKind, a: f64, r: f64) -> Result<TriangleMetrics> {
    if !(a > 0.0 && r > 0.0) || !a.is_finite() || !r.is_finite() {
        return domain(format!(
            "triangle parameters must be positive, got a={a}, r={r}"
        ));
    }
    let s3 = 3.0f64.sqrt();
    let (area, third) = match kind {
        TriangleKind::A => (a * r / 4.0, (a * a + r * r + s3 * a * r).sqrt()),
        TriangleKind::B => (a * r / 4.0, (a * a + r * r - s3 * a * r).sqrt()),
        TriangleKind::C => (a * r / 2.0, (a * a + r * r).sqrt()),
    };
    let perimeter = a + r + third;
    Ok(TriangleMetrics {
        kind,
        area,
        perimeter,
        inradius: 2.0 * area / perimeter,
    })
}

/// Constructive lower bound on the mean inradius, `√π/(8+4√2)`, from the
/// triangle with vertices at times 0, 1/2 and 1.
pub fn constructive_inradius_lower() -> f64 {
    PI.sqrt() / (8.0 + 4.0 * SQRT_2)
}

/// Mean inradius of the triangle with vertices `W(0)`, `W(1/2)`, `W(1)`.
///
/// The two legs are independent with density `2x e^{−x²}` and the angle
/// between them is uniform on `(0, π)`. Passing to polar coordinates in the
/// legs integrates out the radius, leaving
/// `(3/(2√π)) ∫₀^π ∫₀^{π/2} c s · c s sin θ / (c + s + √(1 − 2cs cos θ)) dφ dθ`
/// with `c = cos φ`, `s = sin φ`.
pub fn chord_triangle_inradius_mean() -> Result<QuadResult> {
    let inner_opts = quad::QuadOptions {
        abs_tol: 1e-12,
        rel_tol: 1e-12,
        max_subdivisions: 2000,
    };
    let outer = |theta: f64| {
        let (st, ct) = theta.sin_cos();
        let g = |phi: f64| {
            let (s, c) = phi.sin_cos();
            let cs = c * s;
            cs * cs * st / (c + s + (1.0 - 2.0 * cs * ct).max(0.0).sqrt())
        };
        quad::adaptive_quad_with(g, 0.0, PI / 2.0, inner_opts)
            .map(|r| r.value)
            .unwrap_or(f64::NAN)
    };
    let r = quad::adaptive_quad_with(outer, 0.0, PI, quad::QuadOptions::absolute(1e-11))?;
    let scale = 1.5 / PI.sqrt();
    Ok(QuadResult {
        value: scale * r.value,
        abs_error_estimate: scale * r.abs_error_estimate,
        ..r
    })
}

/// Lower bound on the mean diameter at time one.
pub const DIAMETER_MEAN_LOWER: f64 = 1.856;

/// Upper bound `√(8 log 2)` on the mean diameter at time one.
pub fn diameter_mean_upper() -> f64 {
    (8.0 * LN_2).sqrt()
}

/// Numerically computed constants shared by the bounds table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralConstants {
    /// `E[min{Θ^{R₁}, Θ^{R₂}}]` at level one.
    pub min_range: QuadResult,
    /// `E[P²]` at time one.
    pub perimeter_second_moment: QuadResult,
}

/// Both integral constants, computed once per process.
pub fn integral_constants() -> &'static IntegralConstants {
    static CONSTANTS: OnceLock<IntegralConstants> = OnceLock::new();
    CONSTANTS.get_or_init(|| IntegralConstants {
        min_range: quad::min_range_constant(),
        perimeter_second_moment: quad::perimeter_second_moment(),
    })
}

/// Bonnesen-type upper bound on `E[R]` from the first two perimeter moments:
/// `(√(8π) + √(E[P²] − 2π²))/(2π)`.
pub fn circumradius_upper(perimeter_second_moment: f64) -> f64 {
    ((8.0 * PI).sqrt() + (perimeter_second_moment - 2.0 * PI * PI).sqrt()) / (2.0 * PI)
}

/// Bonnesen-type lower bound on `E[r]`: `(√(8π) − √(E[P²] − 2π²))/(2π)`.
pub fn inradius_lower(perimeter_second_moment: f64) -> f64 {
    ((8.0 * PI).sqrt() - (perimeter_second_moment - 2.0 * PI * PI).sqrt()) / (2.0 * PI)
}

/// Rows of the bounds table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quantity {
    /// `E[R]` at time one.
    Circumradius,
    /// `E[r]` at time one.
    Inradius,
    /// `E[Θ^P]` at level one.
    InversePerimeter,
    /// `E[Θ^A]` at level one.
    InverseArea,
    /// `E[Θ^D]` at level one.
    InverseDiameter,
    /// `E[Θ^R]` at level one.
    InverseCircumradius,
    /// `E[Θ^r]` at level one.
    InverseInradius,
}

impl Quantity {
    pub const ALL: [Quantity; 7] = [
        Quantity::Circumradius,
        Quantity::Inradius,
        Quantity::InversePerimeter,
        Quantity::InverseArea,
        Quantity::InverseDiameter,
        Quantity::InverseCircumradius,
        Quantity::InverseInradius,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Quantity::Circumradius => "E[R]",
            Quantity::Inradius => "E[r]",
            Quantity::InversePerimeter => "E[Theta^P]",
            Quantity::InverseArea => "E[Theta^A]",
            Quantity::InverseDiameter => "E[Theta^D]",
            Quantity::InverseCircumradius => "E[Theta^R]",
            Quantity::InverseInradius => "E[Theta^r]",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub quantity: Quantity,
    pub lower: f64,
    pub upper: f64,
    /// How each side of the bound is obtained.
    pub provenance: String,
}

/// The seven bound pairs on the mean circumradius, inradius and the five
/// inverse processes at level one.
pub fn bounds_table() -> Vec<BoundsRow> {
    let k = integral_constants();
    let c = k.min_range.value;
    let ep2 = k.perimeter_second_moment.value;
    let inrad = optim::inradius_upper_bound();
    let row = |quantity, lower, upper, provenance: &str| BoundsRow {
        quantity,
        lower,
        upper,
        provenance: provenance.to_string(),
    };
    vec![
        row(
            Quantity::Circumradius,
            DIAMETER_MEAN_LOWER / 2.0,
            circumradius_upper(ep2),
            "D <= 2R with E[D] >= 1.856; Bonnesen circumradius inequality with Jensen and E[P^2]",
        ),
        row(
            Quantity::Inradius,
            inradius_lower(ep2),
            (exact_mean_area(1.0).unwrap() / PI).sqrt(),
            "Bonnesen inradius inequality with Jensen and E[P^2]; r <= sqrt(A/pi) with Jensen",
        ),
        row(
            Quantity::InversePerimeter,
            1.0 / (8.0 * PI),
            1.0 / (2.0 * PI * PI),
            "Jensen with E[P]; Jensen with the Cauchy surface area formula",
        ),
        row(
            Quantity::InverseArea,
            2.0 / PI,
            4.0 * c.sqrt(),
            "Jensen with E[A]; triangle squeezed after the minimum range time, min of a^2 C + b^2 under ab/2 = 1",
        ),
        row(
            Quantity::InverseDiameter,
            1.0 / (8.0 * LN_2),
            c,
            "Jensen with E[D] <= sqrt(8 log 2); diameter reaches 1 once either coordinate range does",
        ),
        row(
            Quantity::InverseCircumradius,
            2.0 * c,
            4.0 * c,
            "minimum range time at level sqrt(2); minimum range time at level 2",
        ),
        row(
            Quantity::InverseInradius,
            2.0,
            inrad.bound,
            "isoperimetric inequality with the inverse area lower bound; minimum range time plus six-slit exit time",
        ),
    ]
}
