//! The `bhull` command-line interface.

mod config;
mod report;
mod selftest;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::{
    FileConfig, Overrides, Settings, DEFAULT_HORIZON, DEFAULT_PATHS, DEFAULT_SEED, DEFAULT_STEPS,
};
pub use report::{
    fmt_sig, hitting_plan, table1, BoundsReport, ConfigEcho, ConstantRow, Format, HittingPlan,
    IntegralsReport, ReportRow, RunReport, SimulateReport, SupplementaryRow, CSV_HEADER,
    HITTING_LEVELS, MAX_CENSORED_FRACTION,
};
pub use selftest::{Check, Fault, SelftestReport};

use crate::analytic;
use crate::error::{Error, Result};
use crate::optim;
use crate::sim::{self, FunctionalKind, Passage, PathConfig, Sample};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_QUALITY: i32 = 3;
pub const EXIT_SELFTEST: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "bhull",
    version,
    about = "Bounds and Monte Carlo estimates for the convex hull of planar Brownian motion"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Master seed of the path streams.
    #[arg(long, global = true, env = "BH_SEED")]
    pub seed: Option<u64>,
    /// Number of simulated paths.
    #[arg(long, global = true, env = "BH_PATHS")]
    pub paths: Option<u64>,
    /// Grid steps per unit time.
    #[arg(long, global = true, env = "BH_STEPS")]
    pub steps: Option<u64>,
    /// Censoring horizon (level-one time units for `table1`).
    #[arg(long, global = true, env = "BH_HORIZON")]
    pub horizon: Option<f64>,
    /// Level for hitting-time simulations.
    #[arg(long, global = true, env = "BH_LEVEL")]
    pub level: Option<f64>,
    #[arg(long, global = true, env = "BH_FORMAT", value_enum)]
    pub format: Option<FormatArg>,
    /// Absolute quadrature tolerance for `integrals`.
    #[arg(long, global = true, env = "BH_TOL")]
    pub tol: Option<f64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, env = "BH_THREADS")]
    pub threads: Option<u32>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true, env = "BH_OUT")]
    pub out: Option<PathBuf>,
    /// TOML file with default values for the options above.
    #[arg(long, global = true, env = "BH_CONFIG")]
    pub config: Option<PathBuf>,
    /// Stamp reports with the wall-clock time (breaks byte-for-byte
    /// reproducibility).
    #[arg(long, global = true)]
    pub timestamp: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bounds and Monte Carlo means for the seven hull quantities.
    Table1,
    /// Analytic bounds with how each was obtained.
    Bounds,
    /// The two integral constants with error estimates.
    Integrals,
    /// Estimate a single quantity.
    Simulate(SimulateArgs),
    /// Minimize the upper bound on the mean inradius time.
    OptimizeInradius,
    /// Run the oracle checks.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub kind: SimKind,
    /// Number of slits for `slit-exit`.
    #[arg(long, default_value_t = 6)]
    pub slits: u32,
    /// Distance from the origin to the slits for `slit-exit`.
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, value_enum, hide = true)]
    pub inject_fault: Option<FaultArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FaultArg {
    Gamma,
}

/// Quantities accepted by `simulate`: hitting times of a level, functionals
/// at time one, slit-plane exit times and the chord-triangle inradius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimKind {
    Perimeter,
    Area,
    Diameter,
    Circumradius,
    Inradius,
    RangeMin,
    PerimeterMean,
    AreaMean,
    DiameterMean,
    CircumradiusMean,
    InradiusMean,
    SlitExit,
    TriangleChord,
}

impl SimKind {
    fn hitting_kind(self) -> Option<FunctionalKind> {
        Some(match self {
            SimKind::Perimeter => FunctionalKind::Perimeter,
            SimKind::Area => FunctionalKind::Area,
            SimKind::Diameter => FunctionalKind::Diameter,
            SimKind::Circumradius => FunctionalKind::Circumradius,
            SimKind::Inradius => FunctionalKind::Inradius,
            SimKind::RangeMin => FunctionalKind::RangeMin,
            _ => return None,
        })
    }

    fn name(self) -> String {
        self.to_possible_value().unwrap().get_name().to_string()
    }
}

fn overrides(g: &GlobalArgs) -> Overrides {
    Overrides {
        seed: g.seed,
        paths: g.paths,
        steps: g.steps,
        horizon: g.horizon,
        level: g.level,
        format: g
            .format
            .map(|f| f.to_possible_value().unwrap().get_name().to_string()),
        tol: g.tol,
        threads: g.threads,
    }
}

/// Outcome of a command: the rendered report and the exit code to use.
struct Output {
    text: String,
    code: i32,
    diagnostic: Option<String>,
}

impl Output {
    fn ok(text: String) -> Self {
        Self {
            text,
            code: EXIT_OK,
            diagnostic: None,
        }
    }
}

/// Estimate for `simulate`, with the reference value where one is known.
pub fn simulate(
    kind: SimKind,
    settings: &Settings,
    slits: u32,
    radius: f64,
) -> Result<SimulateReport> {
    let level = settings.level.unwrap_or(1.0);
    let cfg = PathConfig::new(
        settings.steps,
        settings.horizon,
        settings.seed,
        settings.paths,
    )?;
    let at_one = |f: fn(&sim::HullFunctionals) -> f64| {
        sim::estimate(&cfg, |i| sim::hull_functionals_at_one(&cfg, i), f)
    };
    let (estimate, reference, level_echo, horizon_echo) = if let Some(fk) = kind.hitting_kind() {
        let e = sim::estimate(
            &cfg,
            |i| sim::hitting_time(&cfg, i, fk, level),
            |p: &Passage| *p,
        )?;
        let reference = match fk {
            FunctionalKind::RangeMin => {
                Some(analytic::integral_constants().min_range.value * level * level)
            }
            _ => None,
        };
        (e, reference, Some(level), Some(settings.horizon))
    } else {
        match kind {
            SimKind::PerimeterMean => (
                at_one(|h| h.perimeter)?,
                Some(analytic::exact_mean_perimeter(1.0)?),
                None,
                None,
            ),
            SimKind::AreaMean => (
                at_one(|h| h.area)?,
                Some(analytic::exact_mean_area(1.0)?),
                None,
                None,
            ),
            SimKind::DiameterMean => (at_one(|h| h.diameter)?, None, None, None),
            SimKind::CircumradiusMean => (at_one(|h| h.circumradius)?, None, None, None),
            SimKind::InradiusMean => (at_one(|h| h.inradius)?, None, None, None),
            SimKind::SlitExit => {
                let plane = sim::SlitPlane::new(slits, radius)?;
                let samples = sim::run_paths(cfg.n_paths, |i| {
                    sim::slit_exit_sample(&cfg, i, slits, radius)
                });
                let samples = samples.into_iter().collect::<Result<Vec<_>>>()?;
                let e = sim::summarize(samples.into_iter().map(Sample::from))?;
                let mean = analytic::slit_exit_mean(slits)?;
                let r = plane.radius();
                let reference = mean.is_finite().then_some(mean * r * r);
                (e, reference, None, Some(settings.horizon))
            }
            SimKind::TriangleChord => (
                sim::estimate(&cfg, |i| sim::triangle_chord_sample(&cfg, i), |v: &f64| *v)?,
                Some(analytic::chord_triangle_inradius_mean()?.value),
                None,
                None,
            ),
            _ => unreachable!("hitting kinds handled above"),
        }
    };
    Ok(SimulateReport {
        kind: kind.name(),
        level: level_echo,
        seed: settings.seed,
        n_paths: settings.paths,
        n_steps: settings.steps,
        horizon: horizon_echo,
        estimate,
        reference,
    })
}

fn timestamp() -> String {
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    format!("unix:{secs}")
}

fn execute(cli: &Cli, settings: &Settings, format: Format) -> Result<Output> {
    match &cli.command {
        Command::Table1 => {
            let mut report = table1(
                settings.seed,
                settings.paths,
                settings.steps,
                settings.horizon,
            )?;
            if cli.global.timestamp {
                report.timestamp = Some(timestamp());
            }
            let text = report.render(format)?;
            let over = report.over_censored();
            if over.is_empty() {
                Ok(Output::ok(text))
            } else {
                let names: Vec<String> = over
                    .iter()
                    .map(|r| format!("{} ({:.2}%)", r.quantity, 100.0 * r.censored))
                    .collect();
                Ok(Output {
                    text,
                    code: EXIT_QUALITY,
                    diagnostic: Some(format!(
                        "censoring above {}% in {}; raise --horizon",
                        100.0 * MAX_CENSORED_FRACTION,
                        names.join(", ")
                    )),
                })
            }
        }
        Command::Bounds => Ok(Output::ok(BoundsReport::new().render(format)?)),
        Command::Integrals => Ok(Output::ok(
            IntegralsReport::new(settings.tol).render(format)?,
        )),
        Command::OptimizeInradius => {
            let b = optim::inradius_upper_bound();
            Ok(Output::ok(report::render_inradius_bound(&b, format)?))
        }
        Command::Simulate(args) => {
            let report = simulate(args.kind, settings, args.slits, args.radius)?;
            let text = report.render(format)?;
            let cf = report.estimate.censored_fraction;
            if cf > MAX_CENSORED_FRACTION {
                Ok(Output {
                    text,
                    code: EXIT_QUALITY,
                    diagnostic: Some(format!(
                        "{:.2}% of samples censored at the horizon; raise --horizon",
                        100.0 * cf
                    )),
                })
            } else {
                Ok(Output::ok(text))
            }
        }
        Command::Selftest(args) => {
            let fault = args.inject_fault.map(|FaultArg::Gamma| Fault::Gamma);
            let report = selftest::run(fault);
            let text = report.render(format)?;
            if report.passed() {
                Ok(Output::ok(text))
            } else {
                let names: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
                Ok(Output {
                    text,
                    code: EXIT_SELFTEST,
                    diagnostic: Some(format!("failed checks: {}", names.join(", "))),
                })
            }
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => EXIT_USAGE,
        Error::AllCensored(_) => EXIT_QUALITY,
        _ => EXIT_FAILURE,
    }
}

fn run_parsed(cli: Cli) -> Result<Output> {
    let file = match &cli.global.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let settings = Settings::resolve(&overrides(&cli.global), &file)?;
    let format = match &settings.format {
        Some(f) => f.parse()?,
        None => Format::Text,
    };
    let output = match settings.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n as usize)
                .build()
                .map_err(|e| Error::Config(format!("cannot start {n} threads: {e}")))?;
            pool.install(|| execute(&cli, &settings, format))?
        }
        None => execute(&cli, &settings, format)?,
    };
    match &cli.global.out {
        Some(path) => std::fs::write(path, &output.text)
            .map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            // A closed pipe is not an error worth reporting.
            let _ = stdout.write_all(output.text.as_bytes());
        }
    }
    Ok(output)
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run_parsed(cli) {
        Ok(out) => {
            if let Some(d) = out.diagnostic {
                eprintln!("bhull: {d}");
            }
            out.code
        }
        Err(e) => {
            eprintln!("bhull: {e}");
            exit_code(&e)
        }
    }
}

pub fn run() -> i32 {
    run_from(std::env::args_os())
}
