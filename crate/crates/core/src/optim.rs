//! One-dimensional minimization and the upper bound on the mean time for the
//! inradius to reach one.

use serde::Serialize;

use crate::analytic;
use crate::error::{Error, Result};

/// A real function on the open interval `(lo, hi)`; `hi` may be infinite.
pub struct ScalarObjective<'a> {
    pub f: Box<dyn Fn(f64) -> f64 + Sync + 'a>,
    pub lo: f64,
    pub hi: f64,
    /// Interior points used to find a bracket. Generated from the domain when
    /// `None`.
    pub scan: Option<Vec<f64>>,
}

impl<'a> ScalarObjective<'a> {
    pub fn new(f: impl Fn(f64) -> f64 + Sync + 'a, lo: f64, hi: f64) -> Self {
        Self {
            f: Box::new(f),
            lo,
            hi,
            scan: None,
        }
    }

    pub fn with_scan(mut self, scan: Vec<f64>) -> Self {
        self.scan = Some(scan);
        self
    }

    fn scan_points(&self) -> Vec<f64> {
        if let Some(s) = &self.scan {
            return s.clone();
        }
        if self.hi.is_finite() {
            let n = 32;
            (1..n)
                .map(|i| self.lo + (self.hi - self.lo) * i as f64 / n as f64)
                .collect()
        } else {
            (-10..=20).map(|k| self.lo + 2f64.powi(k)).collect()
        }
    }
}

const GOLDEN: f64 = 0.381_966_011_250_105_1;

/// Brent's method on a bracket found by scanning. Returns `(x*, f(x*))`.
pub fn brent_minimize(obj: &ScalarObjective, tol: f64) -> Result<(f64, f64)> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if !(obj.lo < obj.hi) {
        return Err(Error::Domain(format!(
            "empty domain ({}, {})",
            obj.lo, obj.hi
        )));
    }
    let pts: Vec<f64> = obj
        .scan_points()
        .into_iter()
        .filter(|&x| x > obj.lo && x < obj.hi)
        .collect();
    let vals: Vec<f64> = pts.iter().map(|&x| (obj.f)(x)).collect();
    let best = (0..pts.len())
        .filter(|&i| vals[i].is_finite())
        .min_by(|&i, &j| vals[i].total_cmp(&vals[j]))
        .ok_or_else(|| Error::NoBracket("objective not finite at any scan point".into()))?;
    if best == 0 || best + 1 == pts.len() {
        return Err(Error::NoBracket(format!(
            "smallest scanned value at the scan boundary x = {}",
            pts[best]
        )));
    }
    Ok(brent(
        &*obj.f,
        pts[best - 1],
        pts[best + 1],
        pts[best],
        vals[best],
        tol,
    ))
}

fn brent(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, x0: f64, f0: f64, tol: f64) -> (f64, f64) {
    let (mut x, mut w, mut v) = (x0, x0, x0);
    let (mut fx, mut fw, mut fv) = (f0, f0, f0);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for _ in 0..500 {
        let xm = 0.5 * (a + b);
        let tol1 = 0.5 * tol + 1e-15 * x.abs();
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            if p.abs() < (0.5 * q * e).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if xm >= x { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else {
            x + tol1.copysign(d)
        };
        let fu = f(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            (v, fv) = (w, fw);
            (w, fw) = (x, fx);
            (x, fx) = (u, fu);
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                (v, fv) = (w, fw);
                (w, fw) = (u, fu);
            } else if fu <= fv || v == x || v == w {
                (v, fv) = (u, fu);
            }
        }
    }
    (x, fx)
}

/// Slit radius that makes the type-A triangle inradius equal one for a segment
/// of length `a > 4`: `4(a − (2 − √3))/(a − 4)`.
pub fn slit_radius_for_unit_inradius(a: f64) -> f64 {
    4.0 * (a - (2.0 - 3f64.sqrt())) / (a - 4.0)
}

/// Bound on `E[Θ^r]` as a function of the segment length `a > 4`, given the
/// minimum-range constant `c_min`:
/// `c_min·a² + E[τ_{S₆}]·r(a)²`.
pub fn inradius_objective(c_min: f64, a: f64) -> f64 {
    let slit = analytic::slit_exit_mean(6).expect("six slits");
    let r = slit_radius_for_unit_inradius(a);
    c_min * a * a + slit * r * r
}

/// Scan used to bracket the minimizer of [`inradius_objective`].
pub const INRADIUS_SCAN: [f64; 8] = [4.5, 5.0, 6.0, 8.0, 10.0, 14.0, 20.0, 30.0];

/// Tolerance on the minimizing segment length.
pub const INRADIUS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InradiusBound {
    pub bound: f64,
    pub a_star: f64,
    pub r_star: f64,
    pub min_range_constant: f64,
}

/// Minimizes [`inradius_objective`] over `a > 4` using a given constant.
pub fn inradius_upper_bound_with(c_min: f64) -> Result<InradiusBound> {
    let obj = ScalarObjective::new(move |a| inradius_objective(c_min, a), 4.0, f64::INFINITY)
        .with_scan(INRADIUS_SCAN.to_vec());
    let (a_star, bound) = brent_minimize(&obj, INRADIUS_TOL)?;
    Ok(InradiusBound {
        bound,
        a_star,
        r_star: slit_radius_for_unit_inradius(a_star),
        min_range_constant: c_min,
    })
}

/// Upper bound on `E[Θ^r]` with the computed minimum-range constant.
pub fn inradius_upper_bound() -> InradiusBound {
    let c = analytic::integral_constants().min_range.value;
    inradius_upper_bound_with(c).expect("the scan brackets the minimum")
}
