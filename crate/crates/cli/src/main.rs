use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use soft_theta::energy::{energy, CMPotential, PotentialDescriptor};
use soft_theta::lattice::{
    deep_hole, honeycomb, named_lattice, ConfigurationDescriptor, DeepHoleOptions, DomainPoint, LatticeBasis,
    LatticeDescriptor, NamedLattice, PeriodicConfiguration,
};
use soft_theta::measure::{MeasureDescriptor, RadialMeasure};
use soft_theta::optimize::{
    alpha_preset, alpha_scan_local_min, geometric_grid, minimize_lattice, minimize_translation, scale_threshold_search,
    ScaleProblem, ScanOptions, Tolerances,
};
use soft_theta::report::{fmt_num, write_csv, ReportRow};
use soft_theta::theta::{config_theta, soft_theta_mc, theta, Strategy, SummationControl};
use soft_theta::verify::{calibration_report, run_criterion, Suite};
use soft_theta::Error;

const EXIT_VALIDATION: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_ACCEPTANCE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "soft-theta", version, about = "Lattice theta functions, soft theta functions and their critical points")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Point theta function theta_{L+z}(alpha).
    Theta(ThetaArgs),
    /// Soft theta function of two radial measures.
    SoftTheta(SoftThetaArgs),
    /// Energy sum_p f(|p + z|^2) of a completely monotone potential.
    Energy(EnergyArgs),
    /// Grid scan and polish over planar lattice shapes (or a local polish in d = 3).
    ScanLattice(ScanLatticeArgs),
    /// Grid scan and polish over translations in the unit cell.
    ScanTranslation(ScanTranslationArgs),
    /// Classify a lattice in its chart over a list of alpha values.
    AlphaScan(AlphaScanArgs),
    /// Strict-minimality verdicts over a grid of measure scales.
    ScaleScan(ScaleScanArgs),
    /// Deepest hole of a lattice.
    DeepHole(DeepHoleArgs),
    /// Run acceptance criteria and print PASS/FAIL lines.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct SumArgs {
    /// Absolute truncation tolerance.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
    strategy: StrategyArg,
}

impl SumArgs {
    fn control(&self) -> SummationControl {
        SummationControl::with_tol(self.tol).with_strategy(match self.strategy {
            StrategyArg::Auto => Strategy::Auto,
            StrategyArg::Direct => Strategy::Direct,
            StrategyArg::Dual => Strategy::Dual,
        })
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum StrategyArg {
    Auto,
    Direct,
    Dual,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct ThetaArgs {
    /// Named lattice (e.g. triangular, cubic:3, bco:1.2,0.8), inline JSON or a JSON file.
    #[arg(long)]
    lattice: String,
    /// Comma-separated translation; defaults to the origin.
    #[arg(long)]
    z: Option<String>,
    #[arg(long)]
    alpha: f64,
    #[command(flatten)]
    sum: SumArgs,
}

#[derive(Args, Debug)]
struct MeasureArgs {
    /// dirac, gaussian:SIGMA, ball:R, or JSON.
    #[arg(long, default_value = "dirac")]
    mu: String,
    #[arg(long, default_value = "dirac")]
    nu: String,
}

impl MeasureArgs {
    fn build(&self, dim: usize) -> Result<(RadialMeasure, RadialMeasure), Error> {
        Ok((parse_measure(&self.mu, dim)?, parse_measure(&self.nu, dim)?))
    }
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct SoftThetaArgs {
    /// Named lattice or lattice JSON; exclusive with --config.
    #[arg(long, conflicts_with = "config")]
    lattice: Option<String>,
    /// `honeycomb` or configuration JSON.
    #[arg(long)]
    config: Option<String>,
    #[arg(long)]
    z: Option<String>,
    #[arg(long)]
    alpha: f64,
    #[command(flatten)]
    measures: MeasureArgs,
    #[command(flatten)]
    sum: SumArgs,
    /// Also print a Monte Carlo estimate with this many samples.
    #[arg(long)]
    mc: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct EnergyArgs {
    #[arg(long)]
    lattice: String,
    #[arg(long)]
    z: Option<String>,
    /// inverse_power:S or JSON.
    #[arg(long)]
    potential: String,
    #[command(flatten)]
    sum: SumArgs,
}

#[derive(Args, Debug)]
struct OutArgs {
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct ScanLatticeArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[command(flatten)]
    measures: MeasureArgs,
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    #[arg(long, default_value_t = 4.0)]
    y_max: f64,
    /// Start for the d = 3 polish: named lattice or comma-separated chart coordinates.
    #[arg(long)]
    start: Option<String>,
    #[command(flatten)]
    sum: SumArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct ScanTranslationArgs {
    #[arg(long, conflicts_with = "config")]
    lattice: Option<String>,
    #[arg(long)]
    config: Option<String>,
    #[arg(long)]
    alpha: f64,
    #[command(flatten)]
    measures: MeasureArgs,
    /// Grid points per axis.
    #[arg(long, default_value_t = 64)]
    grid: usize,
    #[command(flatten)]
    sum: SumArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Preset {
    /// {0.05 k : 1 <= k <= 20}.
    Low,
    /// Reciprocals of `low`.
    High,
    /// {0.001 k : 1 <= k <= 1000}.
    FullLow,
    /// Reciprocals of `full-low`.
    FullHigh,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct AlphaScanArgs {
    #[arg(long)]
    lattice: String,
    /// Comma-separated alpha values.
    #[arg(long, conflicts_with = "preset")]
    alphas: Option<String>,
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    #[command(flatten)]
    measures: MeasureArgs,
    #[command(flatten)]
    sum: SumArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ProblemKind {
    Lattice,
    Translation,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct ScaleScanArgs {
    #[arg(long, value_enum, default_value_t = ProblemKind::Lattice)]
    problem: ProblemKind,
    #[arg(long)]
    lattice: String,
    /// Target translation for the translation problem.
    #[arg(long)]
    z: Option<String>,
    #[arg(long)]
    alpha: f64,
    #[command(flatten)]
    measures: MeasureArgs,
    /// Scales are base^{-k}, k = 0..levels.
    #[arg(long, default_value_t = 2.0)]
    base: f64,
    #[arg(long, default_value_t = 6)]
    levels: usize,
    #[command(flatten)]
    sum: SumArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct DeepHoleArgs {
    #[arg(long)]
    lattice: String,
    #[arg(long, default_value_t = 64)]
    grid: usize,
    #[arg(long, default_value_t = 1e-10)]
    refine_tol: f64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value = "core")]
    suite: String,
    /// Run a single criterion instead of a suite.
    #[arg(long)]
    criterion: Option<u32>,
}

fn read_arg(text: &str) -> Result<String, Error> {
    let t = text.trim();
    if t.starts_with('{') {
        return Ok(t.to_string());
    }
    if t.ends_with(".json") || Path::new(t).is_file() {
        return std::fs::read_to_string(t).map_err(|e| Error::InvalidParameter(format!("cannot read {t}: {e}")));
    }
    Ok(t.to_string())
}

fn json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T, Error> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid {what} JSON: {e}")))
}

fn parse_lattice(text: &str) -> Result<LatticeBasis, Error> {
    let t = read_arg(text)?;
    if t.starts_with('{') {
        return LatticeBasis::from_descriptor(&json::<LatticeDescriptor>(&t, "lattice")?);
    }
    named_lattice(&t.parse::<NamedLattice>()?)
}

fn parse_config(lattice: Option<&str>, config: Option<&str>) -> Result<PeriodicConfiguration, Error> {
    match (lattice, config) {
        (Some(l), None) => Ok(PeriodicConfiguration::single(parse_lattice(l)?)),
        (None, Some(c)) => {
            let t = read_arg(c)?;
            if t.eq_ignore_ascii_case("honeycomb") {
                Ok(honeycomb())
            } else {
                PeriodicConfiguration::from_descriptor(&json::<ConfigurationDescriptor>(&t, "configuration")?)
            }
        }
        _ => Err(Error::InvalidParameter("give exactly one of --lattice or --config".into())),
    }
}

fn parse_measure(text: &str, dim: usize) -> Result<RadialMeasure, Error> {
    let t = read_arg(text)?;
    if t.starts_with('{') {
        return RadialMeasure::from_descriptor(dim, &json::<MeasureDescriptor>(&t, "measure")?);
    }
    let (head, arg) = t.split_once(':').unwrap_or((t.as_str(), ""));
    let num = || arg.trim().parse::<f64>().map_err(|_| Error::Parse(format!("measure `{t}` needs a numeric parameter")));
    match head.trim().to_ascii_lowercase().as_str() {
        "dirac" | "point" => Ok(RadialMeasure::dirac(dim)),
        "gaussian" => RadialMeasure::gaussian(dim, num()?),
        "ball" | "uniform_ball" => RadialMeasure::uniform_ball(dim, num()?),
        _ => Err(Error::Parse(format!("unknown measure `{t}` (dirac, gaussian:SIGMA, ball:R or JSON)"))),
    }
}

fn parse_potential(text: &str, dim: usize) -> Result<CMPotential, Error> {
    let t = read_arg(text)?;
    let desc = if t.starts_with('{') {
        json::<PotentialDescriptor>(&t, "potential")?
    } else {
        match t.split_once(':') {
            Some(("inverse_power", s)) => PotentialDescriptor::InversePower {
                s: s.trim().parse().map_err(|_| Error::Parse(format!("bad exponent in `{t}`")))?,
            },
            _ => return Err(Error::Parse(format!("unknown potential `{t}` (inverse_power:S or JSON)"))),
        }
    };
    CMPotential::from_descriptor(dim, &desc)
}

fn parse_list(text: &str) -> Result<Vec<f64>, Error> {
    text.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{v}` in `{text}`"))))
        .collect()
}

fn parse_z(text: Option<&str>, dim: usize) -> Result<Vec<f64>, Error> {
    let z = match text {
        Some(t) => parse_list(t)?,
        None => vec![0.0; dim],
    };
    if z.len() != dim {
        return Err(Error::InvalidParameter(format!("z has {} entries, expected {dim}", z.len())));
    }
    Ok(z)
}

fn fmt_vec(v: &[f64]) -> String {
    v.iter().map(|x| fmt_num(*x)).collect::<Vec<_>>().join(", ")
}

fn emit_rows(rows: &[ReportRow], out: &OutArgs) -> Result<(), Error> {
    let io = |e: io::Error| Error::Resource(format!("cannot write output: {e}"));
    match &out.out {
        Some(path) => write_csv(File::create(path).map_err(io)?, rows),
        None => write_csv(io::stdout().lock(), rows),
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Theta(a) => {
            let l = parse_lattice(&a.lattice)?;
            let z = parse_z(a.z.as_deref(), l.dim())?;
            println!("{}", fmt_num(theta(&l, &z, a.alpha, &a.sum.control())?));
        }
        Command::SoftTheta(a) => {
            let cfg = parse_config(a.lattice.as_deref(), a.config.as_deref())?;
            let z = parse_z(a.z.as_deref(), cfg.dim())?;
            let (mu, nu) = a.measures.build(cfg.dim())?;
            let ctl = a.sum.control();
            println!("{}", fmt_num(config_theta(&cfg, &z, a.alpha, &mu, &nu, &ctl)?));
            if let Some(n) = a.mc {
                if cfg.shifts().len() != 1 {
                    return Err(Error::InvalidParameter("Monte Carlo is available for single lattices only".into()));
                }
                let est = soft_theta_mc(cfg.base(), &z, a.alpha, &mu, &nu, n, a.seed, &ctl)?;
                println!("mc {} +- {}", fmt_num(est.mean), fmt_num(est.std_err));
            }
        }
        Command::Energy(a) => {
            let l = parse_lattice(&a.lattice)?;
            let z = parse_z(a.z.as_deref(), l.dim())?;
            let f = parse_potential(&a.potential, l.dim())?;
            println!("{}", fmt_num(energy(&f, &l, &z, &a.sum.control())?));
        }
        Command::ScanLattice(a) => {
            let (mu, nu) = a.measures.build(a.dim)?;
            let start = match (&a.start, a.dim) {
                (None, _) => None,
                (Some(s), d) => Some(match parse_list(s) {
                    Ok(c) => DomainPoint::new(d, c)?,
                    Err(_) => parse_lattice(s)?.to_domain_point(),
                }),
            };
            let opts = ScanOptions { grid_step: a.step, y_max: a.y_max, ..Default::default() };
            let res = minimize_lattice(a.alpha, &mu, &nu, start.as_ref(), &opts, &a.sum.control())?;
            eprintln!(
                "minimum at ({}), {} ({} tied)",
                fmt_vec(&res.point.coords),
                res.report.classification,
                res.tied.len()
            );
            emit_rows(&[ReportRow::from_report(&res.report, a.alpha, 0.0, 0.0)], &a.out)?;
        }
        Command::ScanTranslation(a) => {
            let cfg = parse_config(a.lattice.as_deref(), a.config.as_deref())?;
            let (mu, nu) = a.measures.build(cfg.dim())?;
            let opts = ScanOptions { translation_grid: a.grid, ..Default::default() };
            let res = minimize_translation(&cfg, a.alpha, &mu, &nu, &opts, &a.sum.control())?;
            for z in &res.tied {
                eprintln!("minimiser ({})", fmt_vec(z));
            }
            emit_rows(&[ReportRow::from_report(&res.report, a.alpha, 0.0, 0.0)], &a.out)?;
        }
        Command::AlphaScan(a) => {
            let l = parse_lattice(&a.lattice)?;
            let alphas = match (&a.alphas, a.preset) {
                (Some(t), None) => parse_list(t)?,
                (None, Some(p)) => {
                    let (step, n) = match p {
                        Preset::Low | Preset::High => (0.05, 20),
                        Preset::FullLow | Preset::FullHigh => (0.001, 1000),
                    };
                    let base = alpha_preset(step, n);
                    match p {
                        Preset::High | Preset::FullHigh => base.iter().map(|v| 1.0 / v).collect(),
                        _ => base,
                    }
                }
                _ => return Err(Error::InvalidParameter("give --alphas or --preset".into())),
            };
            let (mu, nu) = a.measures.build(l.dim())?;
            let reps = alpha_scan_local_min(&l, &alphas, &mu, &nu, &a.sum.control(), &Tolerances::default())?;
            let rows: Vec<ReportRow> =
                reps.iter().zip(&alphas).map(|(r, al)| ReportRow::from_report(r, *al, 0.0, 0.0)).collect();
            emit_rows(&rows, &a.out)?;
        }
        Command::ScaleScan(a) => {
            let l = parse_lattice(&a.lattice)?;
            let problem = match a.problem {
                ProblemKind::Lattice => ScaleProblem::Lattice(l),
                ProblemKind::Translation => {
                    let z = parse_z(a.z.as_deref(), l.dim())?;
                    ScaleProblem::Translation { cfg: PeriodicConfiguration::single(l), z }
                }
            };
            if !(a.base > 1.0) {
                return Err(Error::InvalidParameter("--base must be > 1".into()));
            }
            let grid = geometric_grid(a.base, a.levels);
            let (mu, nu) = a.measures.build(problem.dim())?;
            let rep = scale_threshold_search(&problem, a.alpha, &mu, &nu, &grid, &grid, &a.sum.control(), &Tolerances::default())?;
            let mut rows = Vec::new();
            for (i, row) in rep.reports.iter().enumerate() {
                for (j, r) in row.iter().enumerate() {
                    rows.push(ReportRow::from_report(r, a.alpha, grid[i], grid[j]));
                }
            }
            emit_rows(&rows, &a.out)?;
            let show = |v: Option<f64>| v.map_or("none".to_string(), fmt_num);
            eprintln!(
                "thresholds eps0 = {}, delta0 = {}; {} monotonicity violations",
                show(rep.eps0),
                show(rep.delta0),
                rep.violations.len()
            );
        }
        Command::DeepHole(a) => {
            let l = parse_lattice(&a.lattice)?;
            let h = deep_hole(&l, &DeepHoleOptions { grid_n: a.grid, refine_tol: a.refine_tol })?;
            println!("point {}", fmt_vec(&h.point));
            println!("distance {}", fmt_num(h.distance));
        }
        Command::Verify(a) => {
            let ids = match a.criterion {
                Some(id) => vec![id],
                None => a.suite.parse::<Suite>()?.ids(),
            };
            let mut all = true;
            let mut stdout = io::stdout().lock();
            for id in &ids {
                let r = run_criterion(*id)?;
                all &= r.passed;
                writeln!(stdout, "{r}").map_err(|e| Error::Resource(e.to_string()))?;
            }
            if ids.contains(&14) {
                write!(stdout, "{}", calibration_report(20, 14)?).map_err(|e| Error::Resource(e.to_string()))?;
            }
            if !all {
                return Ok(EXIT_ACCEPTANCE);
            }
        }
    }
    Ok(0)
}

fn configure_threads() -> Result<(), Error> {
    if let Ok(v) = std::env::var("SOFT_THETA_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| Error::InvalidParameter(format!("SOFT_THETA_THREADS must be a positive integer, got `{v}`")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Resource(format!("cannot configure thread pool: {e}")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match configure_threads().and_then(|_| run(cli)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_VALIDATION })
        }
    }
}
