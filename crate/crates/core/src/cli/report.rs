use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::analytic::{self, Quantity};
use crate::error::{Error, Result};
use crate::optim::{self, InradiusBound};
use crate::quad::{self, QuadResult};
use crate::sim::{self, EstimateCI, FunctionalKind, PathConfig, Sample, Target};

/// Header of every row-based CSV report.
pub const CSV_HEADER: [&str; 6] = ["quantity", "lower", "mc_mean", "mc_se", "censored", "upper"];

/// Largest tolerated share of censored hitting times.
pub const MAX_CENSORED_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Text,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            _ => Err(Error::Config(format!(
                "unknown format {s:?}, expected csv, json or text"
            ))),
        }
    }
}

/// `%g`-style rendering with `digits` significant digits.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| fmt_sig(v, 9))
}

/// How one inverse-process row is simulated: the level actually used, the
/// simulated horizon and the factor dividing the raw times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HittingPlan {
    pub quantity: String,
    pub kind: FunctionalKind,
    pub level: f64,
    pub horizon: f64,
    pub time_divisor: f64,
}

/// Levels at which the five inverse processes are simulated. Times are
/// mapped back to level one with `Θ(y) = y^e Θ(1)`, which keeps the fast
/// processes from resolving within a handful of grid steps.
pub const HITTING_LEVELS: [(Quantity, FunctionalKind, f64, f64); 5] = [
    (
        Quantity::InversePerimeter,
        FunctionalKind::Perimeter,
        5.0,
        1.0,
    ),
    (
        Quantity::InverseArea,
        FunctionalKind::Area,
        std::f64::consts::SQRT_2,
        1.0,
    ),
    (
        Quantity::InverseDiameter,
        FunctionalKind::Diameter,
        2.0,
        1.0,
    ),
    (
        Quantity::InverseCircumradius,
        FunctionalKind::Circumradius,
        1.0,
        1.0,
    ),
    (
        Quantity::InverseInradius,
        FunctionalKind::Inradius,
        0.5,
        4.0,
    ),
];

/// Hitting plan for a horizon expressed in level-one time units. The last
/// tuple field of [`HITTING_LEVELS`] stretches the horizon of slow rows.
pub fn hitting_plan(horizon: f64) -> Vec<HittingPlan> {
    HITTING_LEVELS
        .iter()
        .map(|&(q, kind, level, stretch)| {
            let divisor = level.powf(kind.time_scaling_exponent());
            HittingPlan {
                quantity: q.label().to_string(),
                kind,
                level,
                horizon: horizon * stretch * divisor,
                time_divisor: divisor,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub seed: u64,
    pub n_paths: u64,
    pub n_steps: u64,
    /// Horizon in level-one time units.
    pub horizon: f64,
    pub hitting: Vec<HittingPlan>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub quantity: String,
    pub lower: f64,
    pub mc_mean: f64,
    pub mc_se: f64,
    pub censored: f64,
    pub upper: f64,
}

/// A Monte Carlo mean compared with a reference value rather than a bound
/// pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupplementaryRow {
    pub quantity: String,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub reference: f64,
    /// `exact`, `quadrature` or `published`.
    pub reference_kind: String,
    pub mc_mean: f64,
    pub mc_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantRow {
    pub name: String,
    pub value: f64,
    pub error_estimate: f64,
}

impl ConstantRow {
    fn from_quad(name: &str, q: &QuadResult) -> Self {
        Self {
            name: name.into(),
            value: q.value,
            error_estimate: q.abs_error_estimate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub version: String,
    pub timestamp: Option<String>,
    pub config: ConfigEcho,
    pub rows: Vec<ReportRow>,
    pub supplementary: Vec<SupplementaryRow>,
    pub constants: Vec<ConstantRow>,
    /// Paths whose hull at time one broke one of the audited inequalities.
    pub inequality_violations: u64,
}

impl RunReport {
    /// Rows whose censored share exceeds [`MAX_CENSORED_FRACTION`].
    pub fn over_censored(&self) -> Vec<&ReportRow> {
        self.rows
            .iter()
            .filter(|r| r.censored > MAX_CENSORED_FRACTION)
            .collect()
    }

    pub fn row(&self, quantity: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.quantity == quantity)
    }

    pub fn supplementary_row(&self, quantity: &str) -> Option<&SupplementaryRow> {
        self.supplementary.iter().find(|r| r.quantity == quantity)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => to_json(self),
            Format::Csv => {
                let mut lines = vec![CSV_HEADER.iter().map(|h| h.to_string()).collect::<Vec<_>>()];
                for r in &self.rows {
                    lines.push(vec![
                        r.quantity.clone(),
                        fmt_sig(r.lower, 9),
                        fmt_sig(r.mc_mean, 9),
                        fmt_sig(r.mc_se, 9),
                        fmt_sig(r.censored, 9),
                        fmt_sig(r.upper, 9),
                    ]);
                }
                for r in &self.supplementary {
                    lines.push(vec![
                        r.quantity.clone(),
                        fmt_opt(r.lower),
                        fmt_sig(r.mc_mean, 9),
                        fmt_sig(r.mc_se, 9),
                        "0".into(),
                        fmt_opt(r.upper),
                    ]);
                }
                to_csv(&lines)
            }
            Format::Text => {
                let c = &self.config;
                let mut out = format!(
                    "bhull {}  seed={} paths={} steps={} horizon={}\n\n",
                    self.version,
                    c.seed,
                    c.n_paths,
                    c.n_steps,
                    fmt_sig(c.horizon, 9)
                );
                if let Some(ts) = &self.timestamp {
                    out.push_str(&format!("timestamp {ts}\n\n"));
                }
                let mut table = vec![[
                    "quantity", "lower", "mc_mean", "mc_se", "censored", "upper",
                ]
                .map(String::from)
                .to_vec()];
                for r in &self.rows {
                    table.push(vec![
                        r.quantity.clone(),
                        fmt_sig(r.lower, 6),
                        fmt_sig(r.mc_mean, 6),
                        fmt_sig(r.mc_se, 3),
                        fmt_sig(r.censored, 3),
                        fmt_sig(r.upper, 6),
                    ]);
                }
                out.push_str(&text_table(&table));
                out.push('\n');
                let mut sup = vec![["quantity", "reference", "kind", "mc_mean", "mc_se"]
                    .map(String::from)
                    .to_vec()];
                for r in &self.supplementary {
                    sup.push(vec![
                        r.quantity.clone(),
                        fmt_sig(r.reference, 6),
                        r.reference_kind.clone(),
                        fmt_sig(r.mc_mean, 6),
                        fmt_sig(r.mc_se, 3),
                    ]);
                }
                out.push_str(&text_table(&sup));
                out.push('\n');
                for k in &self.constants {
                    out.push_str(&format!(
                        "{} = {} (error estimate {})\n",
                        k.name,
                        fmt_sig(k.value, 10),
                        fmt_sig(k.error_estimate, 2)
                    ));
                }
                out.push_str(&format!(
                    "inequality violations: {}\n",
                    self.inequality_violations
                ));
                Ok(out)
            }
        }
    }
}

pub(crate) fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Config(format!("cannot serialize report: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub(crate) fn to_csv(lines: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for l in lines {
        w.write_record(l)
            .map_err(|e| Error::Config(format!("cannot write CSV: {e}")))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Config(format!("cannot write CSV: {e}")))?;
    Ok(String::from_utf8(bytes).expect("CSV fields are UTF-8"))
}

/// Left-aligned first column, right-aligned others.
pub(crate) fn text_table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for r in rows {
        let cells: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(i, s)| {
                if i == 0 {
                    format!("{s:<w$}", w = widths[i])
                } else {
                    format!("{s:>w$}", w = widths[i])
                }
            })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

/// Published Monte Carlo values for the hull-size combinations that have no
/// closed form.
const PUBLISHED_DIAMETER_MEAN: f64 = 1.99;
const PUBLISHED_BONNESEN_UPPER: f64 = 1.176;
const PUBLISHED_BONNESEN_LOWER: f64 = 0.418;
const PUBLISHED_AREA_RADIUS: f64 = 0.696;

fn row_from(quantity: &str, lower: f64, upper: f64, e: EstimateCI) -> ReportRow {
    ReportRow {
        quantity: quantity.into(),
        lower,
        mc_mean: e.mean,
        mc_se: e.std_error,
        censored: e.censored_fraction,
        upper,
    }
}

/// Simulates `n_paths` paths, each followed until every inverse
/// process is resolved while also recording its hull at time one, and
/// assembles the full table with bounds, reference values and constants.
pub fn table1(seed: u64, n_paths: u64, n_steps: u64, horizon: f64) -> Result<RunReport> {
    let plan = hitting_plan(horizon);
    let max_horizon = plan.iter().map(|p| p.horizon).fold(1.0, f64::max);
    let cfg = PathConfig::new(n_steps, max_horizon, seed, n_paths)?;
    let targets: Vec<Target> = plan
        .iter()
        .map(|p| Target {
            kind: p.kind,
            level: p.level,
            horizon: p.horizon,
        })
        .collect();
    let samples = sim::run_paths(n_paths, |i| sim::joint_sample(&cfg, i, &targets, true));
    let at_one: Vec<_> = samples
        .iter()
        .map(|s| s.at_one.as_ref().expect("time-one summary requested"))
        .collect();
    let mean_of = |f: &dyn Fn(&sim::PathSummary) -> f64| {
        sim::summarize(at_one.iter().map(|s| Sample::from(f(s))))
    };

    let bounds = analytic::bounds_table();
    let bound = |q: Quantity| {
        let b = bounds.iter().find(|b| b.quantity == q).unwrap();
        (b.lower, b.upper)
    };
    let mut rows = Vec::with_capacity(7);
    let (lo, hi) = bound(Quantity::Circumradius);
    rows.push(row_from(
        Quantity::Circumradius.label(),
        lo,
        hi,
        mean_of(&|s| s.functionals.circumradius)?,
    ));
    let (lo, hi) = bound(Quantity::Inradius);
    rows.push(row_from(
        Quantity::Inradius.label(),
        lo,
        hi,
        mean_of(&|s| s.functionals.inradius)?,
    ));
    for (k, (p, &(q, ..))) in plan.iter().zip(HITTING_LEVELS.iter()).enumerate() {
        let e = sim::summarize(
            samples
                .iter()
                .map(|s| Sample::from(s.passages[k].scaled(1.0 / p.time_divisor))),
        )?;
        let (lo, hi) = bound(q);
        rows.push(row_from(q.label(), lo, hi, e));
    }

    let chord = analytic::chord_triangle_inradius_mean()?;
    let sup = |quantity: &str,
               lower: Option<f64>,
               upper: Option<f64>,
               reference: f64,
               kind: &str,
               e: EstimateCI| SupplementaryRow {
        quantity: quantity.into(),
        lower,
        upper,
        reference,
        reference_kind: kind.into(),
        mc_mean: e.mean,
        mc_se: e.std_error,
    };
    let supplementary = vec![
        sup(
            "E[P]",
            None,
            None,
            analytic::exact_mean_perimeter(1.0)?,
            "exact",
            mean_of(&|s| s.functionals.perimeter)?,
        ),
        sup(
            "E[A]",
            None,
            None,
            analytic::exact_mean_area(1.0)?,
            "exact",
            mean_of(&|s| s.functionals.area)?,
        ),
        sup(
            "E[D]",
            Some(analytic::DIAMETER_MEAN_LOWER),
            Some(analytic::diameter_mean_upper()),
            PUBLISHED_DIAMETER_MEAN,
            "published",
            mean_of(&|s| s.functionals.diameter)?,
        ),
        sup(
            "E[(P+sqrt(P^2-4piA))/(2pi)]",
            None,
            None,
            PUBLISHED_BONNESEN_UPPER,
            "published",
            mean_of(&|s| s.functionals.bonnesen_circumradius_upper())?,
        ),
        sup(
            "E[(P-sqrt(P^2-4piA))/(2pi)]",
            Some(analytic::constructive_inradius_lower()),
            None,
            PUBLISHED_BONNESEN_LOWER,
            "published",
            mean_of(&|s| s.functionals.bonnesen_inradius_lower())?,
        ),
        sup(
            "E[sqrt(A/pi)]",
            None,
            Some((analytic::exact_mean_area(1.0)? / PI).sqrt()),
            PUBLISHED_AREA_RADIUS,
            "published",
            mean_of(&|s| (s.functionals.area / PI).sqrt())?,
        ),
        sup(
            "E[r(chord triangle)]",
            Some(analytic::constructive_inradius_lower()),
            None,
            chord.value,
            "quadrature",
            mean_of(&|s| s.chord_inradius)?,
        ),
    ];

    let k = analytic::integral_constants();
    let inrad = optim::inradius_upper_bound();
    let constants = vec![
        ConstantRow::from_quad("min_range_constant", &k.min_range),
        ConstantRow::from_quad("perimeter_second_moment", &k.perimeter_second_moment),
        ConstantRow::from_quad("chord_triangle_inradius_mean", &chord),
        ConstantRow {
            name: "inradius_upper_bound".into(),
            value: inrad.bound,
            error_estimate: optim::INRADIUS_TOL,
        },
    ];
    let inequality_violations = at_one.iter().filter(|s| !s.violations.is_empty()).count() as u64;

    Ok(RunReport {
        version: env!("CARGO_PKG_VERSION").into(),
        timestamp: None,
        config: ConfigEcho {
            seed,
            n_paths,
            n_steps,
            horizon,
            hitting: plan,
        },
        rows,
        supplementary,
        constants,
        inequality_violations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub rows: Vec<analytic::BoundsRow>,
}

impl BoundsReport {
    pub fn new() -> Self {
        Self {
            rows: analytic::bounds_table(),
        }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => to_json(self),
            Format::Csv => {
                let mut lines = vec![vec![
                    "quantity".to_string(),
                    "lower".into(),
                    "upper".into(),
                    "provenance".into(),
                ]];
                for r in &self.rows {
                    lines.push(vec![
                        r.quantity.label().into(),
                        fmt_sig(r.lower, 9),
                        fmt_sig(r.upper, 9),
                        r.provenance.clone(),
                    ]);
                }
                to_csv(&lines)
            }
            Format::Text => {
                let mut t = vec![vec!["quantity".to_string(), "lower".into(), "upper".into()]];
                for r in &self.rows {
                    t.push(vec![
                        r.quantity.label().into(),
                        fmt_sig(r.lower, 6),
                        fmt_sig(r.upper, 6),
                    ]);
                }
                let mut out = text_table(&t);
                out.push('\n');
                for r in &self.rows {
                    out.push_str(&format!("{}: {}\n", r.quantity.label(), r.provenance));
                }
                Ok(out)
            }
        }
    }
}

impl Default for BoundsReport {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralsReport {
    pub tol: Option<f64>,
    pub min_range_constant: QuadResult,
    pub perimeter_second_moment: QuadResult,
    /// `E[P]² = 8π`, which Jensen's inequality places below `E[P²]`.
    pub squared_mean_perimeter: f64,
    pub jensen_holds: bool,
}

impl IntegralsReport {
    pub fn new(tol: Option<f64>) -> Self {
        let (c, p2) = match tol {
            Some(t) => (
                quad::min_range_constant_with(t),
                quad::perimeter_second_moment_with(t),
            ),
            None => (quad::min_range_constant(), quad::perimeter_second_moment()),
        };
        let squared_mean_perimeter = 8.0 * PI;
        Self {
            tol,
            min_range_constant: c,
            perimeter_second_moment: p2,
            squared_mean_perimeter,
            jensen_holds: squared_mean_perimeter < p2.value,
        }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        let entries = [
            ("min_range_constant", &self.min_range_constant),
            ("perimeter_second_moment", &self.perimeter_second_moment),
        ];
        match format {
            Format::Json => to_json(self),
            Format::Csv => {
                let mut lines = vec![vec![
                    "name".to_string(),
                    "value".into(),
                    "error_estimate".into(),
                    "evaluations".into(),
                ]];
                for (name, q) in entries {
                    lines.push(vec![
                        name.into(),
                        fmt_sig(q.value, 9),
                        fmt_sig(q.abs_error_estimate, 9),
                        q.evaluations.to_string(),
                    ]);
                }
                to_csv(&lines)
            }
            Format::Text => {
                let mut out = String::new();
                for (name, q) in entries {
                    out.push_str(&format!(
                        "{name} = {} (error estimate {}, {} evaluations{})\n",
                        fmt_sig(q.value, 12),
                        fmt_sig(q.abs_error_estimate, 2),
                        q.evaluations,
                        if q.limit_reached {
                            ", subdivision limit reached"
                        } else {
                            ""
                        }
                    ));
                }
                out.push_str(&format!(
                    "Jensen check: 8 pi = {} {} E[P^2]\n",
                    fmt_sig(self.squared_mean_perimeter, 9),
                    if self.jensen_holds { "<" } else { ">=" }
                ));
                Ok(out)
            }
        }
    }
}

pub fn render_inradius_bound(b: &InradiusBound, format: Format) -> Result<String> {
    match format {
        Format::Json => to_json(b),
        Format::Csv => to_csv(&[
            vec![
                "bound".to_string(),
                "a_star".into(),
                "r_star".into(),
                "min_range_constant".into(),
            ],
            vec![
                fmt_sig(b.bound, 9),
                fmt_sig(b.a_star, 9),
                fmt_sig(b.r_star, 9),
                fmt_sig(b.min_range_constant, 9),
            ],
        ]),
        Format::Text => Ok(format!(
            "E[Theta^r] <= {} at a* = {}, r* = {} (C = {})\n",
            fmt_sig(b.bound, 8),
            fmt_sig(b.a_star, 8),
            fmt_sig(b.r_star, 8),
            fmt_sig(b.min_range_constant, 9)
        )),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub kind: String,
    pub level: Option<f64>,
    pub seed: u64,
    pub n_paths: u64,
    pub n_steps: u64,
    pub horizon: Option<f64>,
    pub estimate: EstimateCI,
    pub reference: Option<f64>,
}

impl SimulateReport {
    pub fn render(&self, format: Format) -> Result<String> {
        let e = &self.estimate;
        match format {
            Format::Json => to_json(self),
            Format::Csv => to_csv(&[
                vec![
                    "kind".to_string(),
                    "mc_mean".into(),
                    "mc_se".into(),
                    "n".into(),
                    "censored".into(),
                    "reference".into(),
                ],
                vec![
                    self.kind.clone(),
                    fmt_sig(e.mean, 9),
                    fmt_sig(e.std_error, 9),
                    e.n.to_string(),
                    fmt_sig(e.censored_fraction, 9),
                    fmt_opt(self.reference),
                ],
            ]),
            Format::Text => {
                let mut out = format!(
                    "{}: {} +/- {} (n = {}, censored {})\n",
                    self.kind,
                    fmt_sig(e.mean, 8),
                    fmt_sig(e.std_error, 3),
                    e.n,
                    fmt_sig(e.censored_fraction, 3)
                );
                if let Some(r) = self.reference {
                    out.push_str(&format!("reference: {}\n", fmt_sig(r, 8)));
                }
                Ok(out)
            }
        }
    }
}
